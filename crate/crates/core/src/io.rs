//! Truncated input-output and observation operators.
//!
//! With the level maps of [`crate::levels`], the map `(u, x(∅)) ↦ y` restricted
//! to words of length at most `N` is
//!
//! ```text
//! ỹ = T_Σ ũ + W_Σ x(∅)
//! T_Σ[n, m] = D̃_n                         n = m
//!           = C̃_n Ã_{n−1} ⋯ Ã_{m+1} B̃_m   n > m
//!           = 0                            n < m
//! W_Σ[n]    = C̃_n Ã_{n−1} ⋯ Ã_0
//! ```
//!
//! For a dissipative realization `[T_Σ W_Σ]` is a compression of a contraction.

use crate::algebra::{hstack, kron, operator_norm, ComplexMatrix, ComplexVector};
use crate::error::{dim_err, Error, Result};
use crate::levels::{stack_level, unstack_level};
use crate::noncommutative::WordSequence;
use crate::system::SystemRealization;
use crate::words::level_size;

/// Largest truncation level accepted by [`build_io_pair`] for `d` letters.
pub fn default_level_cap(d: usize) -> usize {
    match d {
        0..=2 => 8,
        3 => 6,
        _ => 4,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IOOperatorPair {
    level: usize,
    arity: usize,
    dim_x: usize,
    dim_u: usize,
    dim_y: usize,
    t_sigma: ComplexMatrix,
    w_sigma: ComplexMatrix,
    /// Start of output level `n` in the rows of `T_Σ`; one extra entry holds the total.
    row_offsets: Vec<usize>,
    /// Start of input level `m` in the columns of `T_Σ`.
    col_offsets: Vec<usize>,
}

impl IOOperatorPair {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.dim_x, self.dim_u, self.dim_y)
    }

    pub fn t_sigma(&self) -> &ComplexMatrix {
        &self.t_sigma
    }

    pub fn w_sigma(&self) -> &ComplexMatrix {
        &self.w_sigma
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_offsets(&self) -> &[usize] {
        &self.col_offsets
    }

    /// Block `(n, m)` of `T_Σ`.
    pub fn t_block(&self, n: usize, m: usize) -> Result<ComplexMatrix> {
        if n > self.level || m > self.level {
            return Err(Error::Range(format!(
                "block ({n}, {m}) outside truncation level {}",
                self.level
            )));
        }
        let (r0, r1) = (self.row_offsets[n], self.row_offsets[n + 1]);
        let (c0, c1) = (self.col_offsets[m], self.col_offsets[m + 1]);
        Ok(self.t_sigma.view((r0, c0), (r1 - r0, c1 - c0)).into_owned())
    }

    /// Block `n` of `W_Σ`.
    pub fn w_block(&self, n: usize) -> Result<ComplexMatrix> {
        if n > self.level {
            return Err(Error::Range(format!(
                "block {n} outside truncation level {}",
                self.level
            )));
        }
        let (r0, r1) = (self.row_offsets[n], self.row_offsets[n + 1]);
        Ok(self.w_sigma.view((r0, 0), (r1 - r0, self.dim_x)).into_owned())
    }
}

/// `diag_{copies}(block) · m` without materializing the block diagonal.
fn apply_block_diag(block: &ComplexMatrix, copies: usize, m: &ComplexMatrix) -> ComplexMatrix {
    let (r, c) = block.shape();
    debug_assert_eq!(m.nrows(), c * copies);
    let mut out = ComplexMatrix::zeros(r * copies, m.ncols());
    for i in 0..copies {
        let rows = block * m.rows(i * c, c);
        out.rows_mut(i * r, r).copy_from(&rows);
    }
    out
}

fn level_counts(d: usize, level: usize) -> Result<Vec<usize>> {
    (0..=level)
        .map(|n| {
            level_size(d, n)
                .and_then(|c| usize::try_from(c).ok())
                .ok_or_else(|| Error::Range(format!("d^{n} overflows")))
        })
        .collect()
}

fn offsets(counts: &[usize], dim: usize) -> Vec<usize> {
    let mut acc = 0;
    let mut out = Vec::with_capacity(counts.len() + 1);
    out.push(0);
    for c in counts {
        acc += c * dim;
        out.push(acc);
    }
    out
}

/// Assembles `T_Σ` and `W_Σ` up to level `level`, subject to [`default_level_cap`].
pub fn build_io_pair(sys: &SystemRealization, level: usize) -> Result<IOOperatorPair> {
    build_io_pair_capped(sys, level, default_level_cap(sys.arity()))
}

pub fn build_io_pair_capped(sys: &SystemRealization, level: usize, cap: usize) -> Result<IOOperatorPair> {
    if level > cap {
        return Err(Error::Range(format!(
            "truncation level {level} exceeds the cap {cap} for d = {}",
            sys.arity()
        )));
    }
    let d = sys.arity();
    let (dx, du, dy) = (sys.dim_x(), sys.dim_u(), sys.dim_y());
    let counts = level_counts(d, level)?;
    let row_offsets = offsets(&counts, dy);
    let col_offsets = offsets(&counts, du);
    let state_col = sys.state_column();
    let input_col = sys.input_column();

    let mut t_sigma = ComplexMatrix::zeros(row_offsets[level + 1], col_offsets[level + 1]);
    for m in 0..=level {
        let c0 = col_offsets[m];
        let diag = kron(&ComplexMatrix::identity(counts[m], counts[m]), sys.d());
        t_sigma
            .view_mut((row_offsets[m], c0), diag.shape())
            .copy_from(&diag);
        if m == level {
            break;
        }
        // Ã_{n−1} ⋯ Ã_{m+1} B̃_m, advanced one level per step.
        let mut carry = kron(&ComplexMatrix::identity(counts[m], counts[m]), &input_col);
        for n in m + 1..=level {
            let block = apply_block_diag(sys.c(), counts[n], &carry);
            t_sigma
                .view_mut((row_offsets[n], c0), block.shape())
                .copy_from(&block);
            if n < level {
                carry = apply_block_diag(&state_col, counts[n], &carry);
            }
        }
    }

    let mut w_sigma = ComplexMatrix::zeros(row_offsets[level + 1], dx);
    let mut carry = ComplexMatrix::identity(dx, dx);
    for n in 0..=level {
        let block = apply_block_diag(sys.c(), counts[n], &carry);
        w_sigma
            .view_mut((row_offsets[n], 0), block.shape())
            .copy_from(&block);
        if n < level {
            carry = apply_block_diag(&state_col, counts[n], &carry);
        }
    }

    Ok(IOOperatorPair {
        level,
        arity: d,
        dim_x: dx,
        dim_u: du,
        dim_y: dy,
        t_sigma,
        w_sigma,
        row_offsets,
        col_offsets,
    })
}

/// `‖[T_Σ W_Σ]‖`.
pub fn io_contractivity_norm(pair: &IOOperatorPair) -> f64 {
    let joint = hstack(&[&pair.t_sigma, &pair.w_sigma]).expect("same row count");
    if joint.is_empty() {
        0.0
    } else {
        operator_norm(&joint).expect("nonempty")
    }
}

/// `y = T_Σ u + W_Σ x(∅)`, re-indexed by word.
pub fn io_apply(pair: &IOOperatorPair, u: &WordSequence, x0: &ComplexVector) -> Result<WordSequence> {
    if u.arity() != pair.arity || u.dim() != pair.dim_u {
        return Err(dim_err(format!(
            "input over {} letters of dimension {}, operator expects {} and {}",
            u.arity(),
            u.dim(),
            pair.arity,
            pair.dim_u
        )));
    }
    if x0.len() != pair.dim_x {
        return Err(dim_err(format!(
            "initial state of length {}, expected {}",
            x0.len(),
            pair.dim_x
        )));
    }
    if let Some(support) = u.support_len() {
        if support > pair.level {
            return Err(Error::Range(format!(
                "input supported up to |α| = {support}, operator truncated at {}",
                pair.level
            )));
        }
    }
    let mut stacked = ComplexVector::zeros(pair.col_offsets[pair.level + 1]);
    for n in 0..=pair.level {
        let v = stack_level(u, n)?;
        stacked.rows_mut(pair.col_offsets[n], v.len()).copy_from(&v);
    }
    let y = &pair.t_sigma * stacked + &pair.w_sigma * x0;
    let mut out = WordSequence::new(pair.arity, pair.dim_y, pair.level);
    for n in 0..=pair.level {
        let (r0, r1) = (pair.row_offsets[n], pair.row_offsets[n + 1]);
        let level_vec = y.rows(r0, r1 - r0).into_owned();
        for (w, v) in unstack_level(&level_vec, pair.arity, n, pair.dim_y)? {
            out.insert(w, v)?;
        }
    }
    Ok(out)
}

/// `‖T_Σ (I ⊗ b) − (I ⊗ b) T_Σ‖` for a pair built on `K`-valued signals, where
/// every word block of `U` and `Y` factors as `(·) ⊗ K`.
pub fn module_commutation_defect(pair: &IOOperatorPair, b: &ComplexMatrix) -> Result<f64> {
    let k = b.nrows();
    if b.ncols() != k || k == 0 || !pair.dim_u.is_multiple_of(k) || !pair.dim_y.is_multiple_of(k) {
        return Err(dim_err(format!(
            "{}x{} module map does not divide dim_U = {}, dim_Y = {}",
            b.nrows(),
            b.ncols(),
            pair.dim_u,
            pair.dim_y
        )));
    }
    let copies_in = pair.t_sigma.ncols() / k;
    let copies_out = pair.t_sigma.nrows() / k;
    let right = kron(&ComplexMatrix::identity(copies_in, copies_in), b);
    let left = kron(&ComplexMatrix::identity(copies_out, copies_out), b);
    let defect = &pair.t_sigma * right - left * &pair.t_sigma;
    Ok(if defect.is_empty() { 0.0 } else { operator_norm(&defect)? })
}
