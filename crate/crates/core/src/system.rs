use crate::algebra::{
    check_finite, hstack, is_contraction, kron, operator_norm, vstack,
    ComplexMatrix,
};
use crate::error::{dim_err, Error, Result};

/// Tolerance on `‖system matrix‖ ≤ 1` for a realization to count as dissipative.
pub const DISSIPATIVITY_TOL: f64 = 1e-9;

/// The blocks `(A₁…A_d, B₁…B_d, C, D)` of a Fornasini-Marchesini realization.
///
/// The same realization drives both the lattice recursion over `Z₊ᵈ` and the
/// word recursion over the free semigroup.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemRealization {
    a: Vec<ComplexMatrix>,
    b: Vec<ComplexMatrix>,
    c: ComplexMatrix,
    d: ComplexMatrix,
}

impl SystemRealization {
    pub fn new(
        a: Vec<ComplexMatrix>,
        b: Vec<ComplexMatrix>,
        c: ComplexMatrix,
        d: ComplexMatrix,
    ) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Domain("a realization needs at least one letter".into()));
        }
        if a.len() != b.len() {
            return Err(dim_err(format!(
                "{} state maps but {} input maps",
                a.len(),
                b.len()
            )));
        }
        let dim_x = c.ncols();
        let dim_u = d.ncols();
        let dim_y = d.nrows();
        if c.nrows() != dim_y {
            return Err(dim_err(format!(
                "C has {} rows, D has {}",
                c.nrows(),
                dim_y
            )));
        }
        for (k, (ak, bk)) in a.iter().zip(&b).enumerate() {
            if ak.shape() != (dim_x, dim_x) {
                return Err(dim_err(format!(
                    "A{} is {}x{}, expected {dim_x}x{dim_x}",
                    k + 1,
                    ak.nrows(),
                    ak.ncols()
                )));
            }
            if bk.shape() != (dim_x, dim_u) {
                return Err(dim_err(format!(
                    "B{} is {}x{}, expected {dim_x}x{dim_u}",
                    k + 1,
                    bk.nrows(),
                    bk.ncols()
                )));
            }
            check_finite(ak, &format!("A{}", k + 1))?;
            check_finite(bk, &format!("B{}", k + 1))?;
        }
        check_finite(&c, "C")?;
        check_finite(&d, "D")?;
        Ok(Self { a, b, c, d })
    }

    /// Splits a stacked `[A₁ B₁; …; A_d B_d; C D]` back into blocks.
    pub fn from_system_matrix(
        arity: usize,
        dim_x: usize,
        dim_u: usize,
        m: &ComplexMatrix,
    ) -> Result<Self> {
        if m.ncols() != dim_x + dim_u || m.nrows() < arity * dim_x {
            return Err(dim_err(format!(
                "{}x{} system matrix does not fit d={arity}, dim_x={dim_x}, dim_u={dim_u}",
                m.nrows(),
                m.ncols()
            )));
        }
        let dim_y = m.nrows() - arity * dim_x;
        let a = (0..arity)
            .map(|k| m.view((k * dim_x, 0), (dim_x, dim_x)).into_owned())
            .collect();
        let b = (0..arity)
            .map(|k| m.view((k * dim_x, dim_x), (dim_x, dim_u)).into_owned())
            .collect();
        let base = arity * dim_x;
        let c = m.view((base, 0), (dim_y, dim_x)).into_owned();
        let d = m.view((base, dim_x), (dim_y, dim_u)).into_owned();
        Self::new(a, b, c, d)
    }

    /// Zero realization with the given shape.
    pub fn zeros(arity: usize, dim_x: usize, dim_u: usize, dim_y: usize) -> Result<Self> {
        Self::new(
            vec![ComplexMatrix::zeros(dim_x, dim_x); arity],
            vec![ComplexMatrix::zeros(dim_x, dim_u); arity],
            ComplexMatrix::zeros(dim_y, dim_x),
            ComplexMatrix::zeros(dim_y, dim_u),
        )
    }

    pub fn arity(&self) -> usize {
        self.a.len()
    }

    pub fn dim_x(&self) -> usize {
        self.c.ncols()
    }

    pub fn dim_u(&self) -> usize {
        self.d.ncols()
    }

    pub fn dim_y(&self) -> usize {
        self.d.nrows()
    }

    pub fn a(&self) -> &[ComplexMatrix] {
        &self.a
    }

    pub fn b(&self) -> &[ComplexMatrix] {
        &self.b
    }

    pub fn c(&self) -> &ComplexMatrix {
        &self.c
    }

    pub fn d(&self) -> &ComplexMatrix {
        &self.d
    }

    /// `[A₁ B₁; …; A_d B_d; C D]`, mapping `X ⊕ U` into `Xᵈ ⊕ Y`.
    pub fn system_matrix(&self) -> ComplexMatrix {
        let mut rows: Vec<ComplexMatrix> = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| hstack(&[a, b]).expect("validated shapes"))
            .collect();
        rows.push(hstack(&[&self.c, &self.d]).expect("validated shapes"));
        let refs: Vec<&ComplexMatrix> = rows.iter().collect();
        vstack(&refs).expect("validated shapes")
    }

    pub fn system_norm(&self) -> f64 {
        let m = self.system_matrix();
        if m.is_empty() {
            0.0
        } else {
            operator_norm(&m).expect("nonempty")
        }
    }

    pub fn is_dissipative(&self) -> bool {
        is_contraction(&self.system_matrix(), DISSIPATIVITY_TOL)
    }

    /// `col[A₁; …; A_d]`, the state part of the system matrix.
    pub fn state_column(&self) -> ComplexMatrix {
        let refs: Vec<&ComplexMatrix> = self.a.iter().collect();
        vstack(&refs).expect("validated shapes")
    }

    /// `col[B₁; …; B_d]`.
    pub fn input_column(&self) -> ComplexMatrix {
        let refs: Vec<&ComplexMatrix> = self.b.iter().collect();
        vstack(&refs).expect("validated shapes")
    }

    /// `‖col[A₁; …; A_d]‖`; at most 1 for a dissipative realization.
    pub fn state_column_norm(&self) -> f64 {
        norm_or_zero(&self.state_column())
    }

    /// `‖[A₁ ⋯ A_d]‖`.
    pub fn state_row_norm(&self) -> f64 {
        let refs: Vec<&ComplexMatrix> = self.a.iter().collect();
        norm_or_zero(&hstack(&refs).expect("validated shapes"))
    }

    /// The same realization with every block multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let s = |m: &ComplexMatrix| m.map(|z| z * factor);
        Self {
            a: self.a.iter().map(s).collect(),
            b: self.b.iter().map(s).collect(),
            c: s(&self.c),
            d: s(&self.d),
        }
    }

    /// Rescales the realization so that its system matrix has norm `target`.
    pub fn with_system_norm(&self, target: f64) -> Result<Self> {
        let current = self.system_norm();
        if current == 0.0 {
            return Err(Error::Domain("cannot rescale the zero realization".into()));
        }
        Ok(self.scaled(target / current))
    }

    /// Ampliation to `K`-valued signals: `A_j ⊗ I_K`, `B_j ⊗ I_K`, `C ⊗ I_K`, `D ⊗ I_K`.
    pub fn tensor_identity(&self, dim_k: usize) -> Self {
        let id = ComplexMatrix::identity(dim_k, dim_k);
        let lift = |m: &ComplexMatrix| kron(m, &id);
        Self {
            a: self.a.iter().map(lift).collect(),
            b: self.b.iter().map(lift).collect(),
            c: lift(&self.c),
            d: lift(&self.d),
        }
    }
}

fn norm_or_zero(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        0.0
    } else {
        operator_norm(m).expect("nonempty")
    }
}
