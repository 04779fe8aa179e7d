//! Dense complex matrix primitives shared by every system flavor.
//!
//! All operators live on finite-dimensional spaces `ℂⁿ` and are stored as
//! `nalgebra` dense matrices of `Complex64`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{dim_err, Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Condition estimate (1-norm) above which `I - M` is treated as singular.
pub const SINGULARITY_THRESHOLD: f64 = 1e14;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Largest singular value of `m`.
pub fn operator_norm(m: &ComplexMatrix) -> Result<f64> {
    if m.is_empty() {
        return Err(dim_err("operator norm of an empty matrix"));
    }
    Ok(largest_singular_value(m))
}

fn largest_singular_value(m: &ComplexMatrix) -> f64 {
    // The Gram matrix would square the condition number; decompose the thin side instead.
    let sv = if m.nrows() >= m.ncols() {
        m.clone().singular_values()
    } else {
        m.adjoint().singular_values()
    };
    sv.iter().cloned().fold(0.0, f64::max)
}

/// `true` iff `‖m‖ ≤ 1 + tol`. An empty matrix is the zero map and hence a contraction.
pub fn is_contraction(m: &ComplexMatrix, tol: f64) -> bool {
    if m.is_empty() {
        return true;
    }
    largest_singular_value(m) <= 1.0 + tol
}

/// Kronecker product `a ⊗ b`; entry `(i·p + k, j·q + l)` is `a[i,j]·b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (p, q) = b.shape();
    let mut out = ComplexMatrix::zeros(a.nrows() * p, a.ncols() * q);
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let aij = a[(i, j)];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            let mut blk = out.view_mut((i * p, j * q), (p, q));
            blk.zip_apply(b, |o, bkl| *o = aij * bkl);
        }
    }
    out
}

/// Solves `(I - m)·x = rhs`.
///
/// Fails with [`Error::Singular`] when the 1-norm condition estimate of `I - m`
/// exceeds [`SINGULARITY_THRESHOLD`]; this never happens when `‖m‖ < 1`.
pub fn resolvent_solve(m: &ComplexMatrix, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(dim_err(format!(
            "resolvent of non-square {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    if rhs.nrows() != m.nrows() {
        return Err(dim_err(format!(
            "resolvent rhs has {} rows, operator has {}",
            rhs.nrows(),
            m.nrows()
        )));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(rhs.clone());
    }
    let shifted = ComplexMatrix::identity(n, n) - m;
    let lu = shifted.clone().lu();
    let inverse = lu.try_inverse().ok_or(Error::Singular {
        condition: f64::INFINITY,
    })?;
    let condition = one_norm(&shifted) * one_norm(&inverse);
    if !condition.is_finite() || condition > SINGULARITY_THRESHOLD {
        return Err(Error::Singular { condition });
    }
    lu.solve(rhs).ok_or(Error::Singular { condition })
}

fn one_norm(m: &ComplexMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Clips the singular values of `m` at `target_norm`.
///
/// A matrix whose norm is already at most `target_norm` is returned unchanged.
pub fn project_to_contraction(m: &ComplexMatrix, target_norm: f64) -> Result<ComplexMatrix> {
    if !(target_norm > 0.0 && target_norm <= 1.0) {
        return Err(Error::Domain(format!(
            "target norm {target_norm} outside (0, 1]"
        )));
    }
    if m.is_empty() || largest_singular_value(m) <= target_norm {
        return Ok(m.clone());
    }
    let mut svd = m.clone().svd(true, true);
    for s in svd.singular_values.iter_mut() {
        *s = s.min(target_norm);
    }
    svd.recompose().map_err(|e| Error::Domain(e.to_string()))
}

pub fn check_finite(m: &ComplexMatrix, what: &str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// Vertical concatenation; all blocks must share a column count.
pub fn vstack(blocks: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    if blocks.iter().any(|b| b.ncols() != cols) {
        return Err(dim_err("vstack blocks disagree on column count"));
    }
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = ComplexMatrix::zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        out.view_mut((r, 0), b.shape()).copy_from(*b);
        r += b.nrows();
    }
    Ok(out)
}

/// Horizontal concatenation; all blocks must share a row count.
pub fn hstack(blocks: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    if blocks.iter().any(|b| b.nrows() != rows) {
        return Err(dim_err("hstack blocks disagree on row count"));
    }
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = ComplexMatrix::zeros(rows, cols);
    let mut c = 0;
    for b in blocks {
        out.view_mut((0, c), b.shape()).copy_from(*b);
        c += b.ncols();
    }
    Ok(out)
}

/// `copies` copies of `block` along the diagonal.
pub fn block_diag_repeat(block: &ComplexMatrix, copies: usize) -> ComplexMatrix {
    let (p, q) = block.shape();
    let mut out = ComplexMatrix::zeros(p * copies, q * copies);
    for i in 0..copies {
        out.view_mut((i * p, i * q), (p, q)).copy_from(block);
    }
    out
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn vector_max_abs_diff(a: &ComplexVector, b: &ComplexVector) -> f64 {
    assert_eq!(a.len(), b.len(), "vector_max_abs_diff length mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
