//! Input and initial-state choices shared by `simulate` and `verify`.

use anyhow::{bail, Result};
use clap::ValueEnum;
use fmsys::algebra::c64;
use fmsys::random::{gaussian_vector, random_lattice_input, random_word_input};
use fmsys::{ComplexVector, LatticeSequence, MultiIndex, Word, WordSequence};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputKind {
    Zero,
    /// First basis vector at the origin.
    Delta,
    /// Seeded Gaussian values on every index up to `--support`.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    Zero,
    /// First basis vector.
    Unit,
    Random,
}

fn unit(dim: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(dim);
    if dim > 0 {
        v[0] = c64(1.0, 0.0);
    }
    v
}

pub fn initial_state(kind: StateKind, dim: usize, rng: &mut ChaCha8Rng) -> ComplexVector {
    match kind {
        StateKind::Zero => ComplexVector::zeros(dim),
        StateKind::Unit => unit(dim),
        StateKind::Random => gaussian_vector(rng, dim),
    }
}

fn check_support(support: usize, level: usize) -> Result<()> {
    if support > level {
        bail!("--support {support} exceeds --level {level}");
    }
    Ok(())
}

pub fn lattice_input(
    kind: InputKind,
    arity: usize,
    dim: usize,
    support: usize,
    level: usize,
    rng: &mut ChaCha8Rng,
) -> Result<LatticeSequence> {
    Ok(match kind {
        InputKind::Zero => LatticeSequence::new(arity, dim, 0),
        InputKind::Delta => {
            let mut u = LatticeSequence::new(arity, dim, 0);
            u.insert(MultiIndex::zero(arity), unit(dim))?;
            u
        }
        InputKind::Random => {
            check_support(support, level)?;
            random_lattice_input(rng, arity, dim, support as u32)
        }
    })
}

pub fn word_input(
    kind: InputKind,
    arity: usize,
    dim: usize,
    support: usize,
    level: usize,
    rng: &mut ChaCha8Rng,
) -> Result<WordSequence> {
    Ok(match kind {
        InputKind::Zero => WordSequence::new(arity, dim, 0),
        InputKind::Delta => {
            let mut u = WordSequence::new(arity, dim, 0);
            u.insert(Word::empty(arity), unit(dim))?;
            u
        }
        InputKind::Random => {
            check_support(support, level)?;
            random_word_input(rng, arity, dim, support)?
        }
    })
}
