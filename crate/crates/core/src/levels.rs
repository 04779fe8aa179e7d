//! Level form of the free-semigroup system.
//!
//! Level `n` collects the `dⁿ` words of length `n` into one stacked vector.
//! The level maps are block diagonal,
//!
//! ```text
//! Ã_n = diag_{dⁿ}(col[A₁; …; A_d])    B̃_n = diag_{dⁿ}(col[B₁; …; B_d])
//! C̃_n = diag_{dⁿ}(C)                  D̃_n = diag_{dⁿ}(D)
//! ```
//!
//! and the word `α` sits at block [`Word::stack_index`].

use crate::algebra::{block_diag_repeat, ComplexMatrix, ComplexVector};
use crate::error::{dim_err, Error, Result};
use crate::noncommutative::WordSequence;
use crate::system::SystemRealization;
use crate::words::{level_size, Word};

pub struct LevelOperators<'a> {
    sys: &'a SystemRealization,
    state_column: ComplexMatrix,
    input_column: ComplexMatrix,
}

impl<'a> LevelOperators<'a> {
    pub fn new(sys: &'a SystemRealization) -> Self {
        Self {
            sys,
            state_column: sys.state_column(),
            input_column: sys.input_column(),
        }
    }

    pub fn words_at(&self, n: usize) -> Result<usize> {
        level_size(self.sys.arity(), n)
            .and_then(|c| usize::try_from(c).ok())
            .ok_or_else(|| Error::Range(format!("d^{n} overflows")))
    }

    /// `Ã_n : X^{dⁿ} → X^{dⁿ⁺¹}`.
    pub fn state_map(&self, n: usize) -> Result<ComplexMatrix> {
        Ok(block_diag_repeat(&self.state_column, self.words_at(n)?))
    }

    /// `B̃_n : U^{dⁿ} → X^{dⁿ⁺¹}`.
    pub fn input_map(&self, n: usize) -> Result<ComplexMatrix> {
        Ok(block_diag_repeat(&self.input_column, self.words_at(n)?))
    }

    /// `C̃_n : X^{dⁿ} → Y^{dⁿ}`.
    pub fn output_map(&self, n: usize) -> Result<ComplexMatrix> {
        Ok(block_diag_repeat(self.sys.c(), self.words_at(n)?))
    }

    /// `D̃_n : U^{dⁿ} → Y^{dⁿ}`.
    pub fn feedthrough_map(&self, n: usize) -> Result<ComplexMatrix> {
        Ok(block_diag_repeat(self.sys.d(), self.words_at(n)?))
    }
}

/// The level-`len` entries of `seq`, stacked in block order.
pub fn stack_level(seq: &WordSequence, len: usize) -> Result<ComplexVector> {
    let d = seq.arity();
    let count = level_size(d, len)
        .and_then(|c| usize::try_from(c).ok())
        .ok_or_else(|| Error::Range(format!("d^{len} overflows")))?;
    let dim = seq.dim();
    let mut out = ComplexVector::zeros(dim * count);
    for (w, v) in seq.iter().filter(|(w, _)| w.len() == len) {
        out.rows_mut(w.stack_index() * dim, dim).copy_from(v);
    }
    Ok(out)
}

/// Inverse of [`stack_level`]: the `(word, value)` pairs of a stacked level vector.
pub fn unstack_level(
    v: &ComplexVector,
    arity: usize,
    len: usize,
    dim: usize,
) -> Result<Vec<(Word, ComplexVector)>> {
    let count = level_size(arity, len)
        .and_then(|c| usize::try_from(c).ok())
        .ok_or_else(|| Error::Range(format!("d^{len} overflows")))?;
    if v.len() != count * dim {
        return Err(dim_err(format!(
            "stacked level vector of length {}, expected {}",
            v.len(),
            count * dim
        )));
    }
    (0..count)
        .map(|pos| {
            Ok((
                Word::from_stack_index(arity, len, pos)?,
                v.rows(pos * dim, dim).into_owned(),
            ))
        })
        .collect()
}
