//! Commutative Fornasini-Marchesini systems evolving over the lattice `Z₊ᵈ`.
//!
//! ```text
//! x(n) = Σ_j A_j x(n − e_j) + B_j u(n − e_j)      (terms off the lattice vanish)
//! y(n) = C x(n) + D u(n)
//! ```
//!
//! Frequency domain: `ŷ(z) = F(z) û(z) + W(z) x(0)` on the unit ball with
//! `F(z) = D + C (I − Σ z_k A_k)⁻¹ Σ z_k B_k` and `W(z) = C (I − Σ z_k A_k)⁻¹`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::algebra::{resolvent_solve, ComplexMatrix, ComplexVector};
use crate::error::{dim_err, Error, Result};
use crate::system::SystemRealization;
use crate::words::{multi_indices, multi_indices_up_to, omega_weight, MultiIndex};

/// A vector-valued sequence on `{n ∈ Z₊ᵈ : |n| ≤ level}`; absent entries are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSequence {
    arity: usize,
    dim: usize,
    level: u32,
    values: BTreeMap<MultiIndex, ComplexVector>,
}

impl LatticeSequence {
    pub fn new(arity: usize, dim: usize, level: u32) -> Self {
        Self {
            arity,
            dim,
            level,
            values: BTreeMap::new(),
        }
    }

    /// Scalar sequence equal to one on every index up to `level`.
    pub fn constant_ones(arity: usize, level: u32) -> Self {
        let mut s = Self::new(arity, 1, level);
        for n in multi_indices_up_to(arity, level) {
            s.values.insert(n, ComplexVector::from_element(1, Complex64::new(1.0, 0.0)));
        }
        s
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn insert(&mut self, n: MultiIndex, v: ComplexVector) -> Result<()> {
        if n.dim() != self.arity {
            return Err(dim_err(format!(
                "multi-index {n} in a sequence over Z₊^{}",
                self.arity
            )));
        }
        if n.degree() > self.level {
            return Err(Error::Range(format!(
                "|{n}| exceeds truncation level {}",
                self.level
            )));
        }
        if v.len() != self.dim {
            return Err(dim_err(format!(
                "value of length {} in a sequence of dimension {}",
                v.len(),
                self.dim
            )));
        }
        self.values.insert(n, v);
        Ok(())
    }

    pub fn get(&self, n: &MultiIndex) -> Option<&ComplexVector> {
        self.values.get(n)
    }

    /// The stored value, or zero.
    pub fn value(&self, n: &MultiIndex) -> ComplexVector {
        self.values
            .get(n)
            .cloned()
            .unwrap_or_else(|| ComplexVector::zeros(self.dim))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &ComplexVector)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest `|n|` carrying a nonzero value, `None` for the zero sequence.
    pub fn support_degree(&self) -> Option<u32> {
        self.values
            .iter()
            .filter(|(_, v)| v.iter().any(|z| *z != Complex64::new(0.0, 0.0)))
            .map(|(n, _)| n.degree())
            .max()
    }

    /// The sequence `m ↦ v(m − e_j)`, one level deeper.
    pub fn shifted(&self, j: usize) -> Result<Self> {
        if j == 0 || j > self.arity {
            return Err(Error::Domain(format!("shift direction {j} outside 1..={}", self.arity)));
        }
        let mut out = Self::new(self.arity, self.dim, self.level + 1);
        for (n, v) in &self.values {
            out.values.insert(n.shifted_up(j), v.clone());
        }
        Ok(out)
    }
}

/// A point of the open unit ball `Bᵈ ⊂ ℂᵈ`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationPoint {
    z: Vec<Complex64>,
}

impl EvaluationPoint {
    pub fn new(z: Vec<Complex64>) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::Domain("evaluation point needs at least one coordinate".into()));
        }
        if z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite("evaluation point".into()));
        }
        let sq: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        if sq >= 1.0 {
            return Err(Error::Domain(format!(
                "Σ|z_j|² = {sq} is not inside the open unit ball"
            )));
        }
        Ok(Self { z })
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.z
    }

    pub fn arity(&self) -> usize {
        self.z.len()
    }

    /// Euclidean norm `(Σ|z_j|²)^{1/2}`.
    pub fn norm(&self) -> f64 {
        self.z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `zⁿ = z₁^{n₁} ⋯ z_d^{n_d}`.
    pub fn monomial(&self, n: &MultiIndex) -> Complex64 {
        self.z
            .iter()
            .zip(n.components())
            .map(|(z, &p)| z.powu(p))
            .product()
    }
}

/// Input, state and output of a lattice simulation up to `level`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeTrajectory {
    pub input: LatticeSequence,
    pub state: LatticeSequence,
    pub output: LatticeSequence,
    pub level: u32,
}

impl LatticeTrajectory {
    pub fn initial_state(&self) -> ComplexVector {
        self.state.value(&MultiIndex::zero(self.state.arity()))
    }
}

fn check_system_signal(sys: &SystemRealization, u: &LatticeSequence, x0: &ComplexVector) -> Result<()> {
    if u.arity() != sys.arity() {
        return Err(dim_err(format!(
            "input lives on Z₊^{}, system has d = {}",
            u.arity(),
            sys.arity()
        )));
    }
    if u.dim() != sys.dim_u() {
        return Err(dim_err(format!(
            "input dimension {} vs dim_U = {}",
            u.dim(),
            sys.dim_u()
        )));
    }
    if x0.len() != sys.dim_x() {
        return Err(dim_err(format!(
            "initial state dimension {} vs dim_X = {}",
            x0.len(),
            sys.dim_x()
        )));
    }
    Ok(())
}

/// Runs the lattice recursion for every `|n| ≤ level`.
///
/// Input entries beyond `u.level()` are read as zero.
pub fn simulate(
    sys: &SystemRealization,
    u: &LatticeSequence,
    x0: &ComplexVector,
    level: u32,
) -> Result<LatticeTrajectory> {
    check_system_signal(sys, u, x0)?;
    let d = sys.arity();
    let mut state = LatticeSequence::new(d, sys.dim_x(), level);
    let mut output = LatticeSequence::new(d, sys.dim_y(), level);
    let origin = MultiIndex::zero(d);
    state.values.insert(origin, x0.clone());

    for degree in 1..=level {
        for n in multi_indices(d, degree) {
            let mut x = ComplexVector::zeros(sys.dim_x());
            for j in 1..=d {
                if let Some(prev) = n.shifted_down(j) {
                    x += &sys.a()[j - 1] * &state.values[&prev];
                    if let Some(up) = u.get(&prev) {
                        x += &sys.b()[j - 1] * up;
                    }
                }
            }
            state.values.insert(n, x);
        }
    }
    for (n, x) in &state.values {
        let mut y = sys.c() * x;
        if let Some(un) = u.get(n) {
            y += sys.d() * un;
        }
        output.values.insert(n.clone(), y);
    }
    let mut input = LatticeSequence::new(d, sys.dim_u(), level);
    for (n, v) in u.iter().filter(|(n, _)| n.degree() <= level) {
        input.values.insert(n.clone(), v.clone());
    }
    Ok(LatticeTrajectory {
        input,
        state,
        output,
        level,
    })
}

/// Weight attached to the lattice point `n` in an ℓ²-type norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeWeight {
    /// `ω(n) = |n|!/n!`.
    Multinomial,
    /// `1/ω(n) = n!/|n|!`, the weight under which aggregated free-semigroup
    /// trajectories stay contractive.
    InverseMultinomial,
}

impl LatticeWeight {
    pub fn at(self, n: &MultiIndex) -> Result<f64> {
        let w = omega_weight(n)?;
        Ok(match self {
            LatticeWeight::Multinomial => w,
            LatticeWeight::InverseMultinomial => 1.0 / w,
        })
    }
}

/// `Σ_{|n| ≤ level} ω(n)‖v(n)‖²`.
pub fn weighted_l2_norm_sq(v: &LatticeSequence, level: u32) -> Result<f64> {
    weighted_l2_norm_sq_with(v, level, LatticeWeight::Multinomial)
}

pub fn weighted_l2_norm_sq_with(v: &LatticeSequence, level: u32, weight: LatticeWeight) -> Result<f64> {
    let mut total = 0.0;
    for (n, x) in v.iter().filter(|(n, _)| n.degree() <= level) {
        total += weight.at(n)? * x.norm_squared();
    }
    Ok(total)
}

fn level_energy(v: &LatticeSequence, degree: u32, weight: LatticeWeight) -> Result<f64> {
    let mut total = 0.0;
    for (n, x) in v.iter().filter(|(n, _)| n.degree() == degree) {
        total += weight.at(n)? * x.norm_squared();
    }
    Ok(total)
}

/// Telescoped energy-balance slack with the `ω(n)` weight, one entry per level `0..=level`.
///
/// `slack(N) = [Σ_{|n|≤N} ω‖u‖² + ‖x(0)‖²] − [Σ_{|n|≤N} ω‖y‖² + Σ_{|n|=N+1} ω‖x‖²]`.
/// The trajectory must reach level `level + 1`.
pub fn energy_balance_slack(
    sys: &SystemRealization,
    traj: &LatticeTrajectory,
    level: u32,
) -> Result<Vec<f64>> {
    energy_balance_slack_with(sys, traj, level, LatticeWeight::Multinomial)
}

/// [`energy_balance_slack`] under an arbitrary lattice weight.
///
/// Only [`LatticeWeight::InverseMultinomial`] is guaranteed nonnegative for
/// dissipative realizations when `d ≥ 2`; the two weights agree for `d = 1`.
pub fn energy_balance_slack_with(
    sys: &SystemRealization,
    traj: &LatticeTrajectory,
    level: u32,
    weight: LatticeWeight,
) -> Result<Vec<f64>> {
    if traj.level < level + 1 {
        return Err(Error::Range(format!(
            "slack up to level {level} needs a trajectory of level {}, got {}",
            level + 1,
            traj.level
        )));
    }
    if traj.state.arity() != sys.arity() || traj.state.dim() != sys.dim_x() {
        return Err(dim_err("trajectory does not match the realization"));
    }
    let x0 = traj.initial_state().norm_squared();
    let mut supplied = x0;
    let mut emitted = 0.0;
    let mut slacks = Vec::with_capacity(level as usize + 1);
    for n in 0..=level {
        supplied += level_energy(&traj.input, n, weight)?;
        emitted += level_energy(&traj.output, n, weight)?;
        let stored = level_energy(&traj.state, n + 1, weight)?;
        slacks.push(supplied - (emitted + stored));
    }
    Ok(slacks)
}

/// Truncated Z-transform `Σ_{|n| ≤ level} zⁿ v(n)`.
pub fn ztransform(v: &LatticeSequence, z: &EvaluationPoint, level: u32) -> Result<ComplexVector> {
    if z.arity() != v.arity() {
        return Err(dim_err(format!(
            "point in ℂ^{} for a sequence over Z₊^{}",
            z.arity(),
            v.arity()
        )));
    }
    let mut acc = ComplexVector::zeros(v.dim());
    for (n, x) in v.iter().filter(|(n, _)| n.degree() <= level) {
        acc += x * z.monomial(n);
    }
    Ok(acc)
}

fn pencil(mats: &[ComplexMatrix], z: &EvaluationPoint) -> ComplexMatrix {
    let (r, c) = mats[0].shape();
    mats.iter()
        .zip(z.coords())
        .fold(ComplexMatrix::zeros(r, c), |acc, (m, zk)| acc + m * *zk)
}

fn check_point(sys: &SystemRealization, z: &EvaluationPoint) -> Result<()> {
    if z.arity() != sys.arity() {
        return Err(dim_err(format!(
            "point in ℂ^{} for a system with d = {}",
            z.arity(),
            sys.arity()
        )));
    }
    Ok(())
}

/// `F(z) = D + C (I − Σ z_k A_k)⁻¹ (Σ z_k B_k)`.
pub fn transfer_eval(sys: &SystemRealization, z: &EvaluationPoint) -> Result<ComplexMatrix> {
    check_point(sys, z)?;
    let state = pencil(sys.a(), z);
    let input = pencil(sys.b(), z);
    let x = resolvent_solve(&state, &input)?;
    Ok(sys.d() + sys.c() * x)
}

/// `W(z) = C (I − Σ z_k A_k)⁻¹`.
pub fn observation_eval(sys: &SystemRealization, z: &EvaluationPoint) -> Result<ComplexMatrix> {
    check_point(sys, z)?;
    let state = pencil(sys.a(), z);
    let n = sys.dim_x();
    let inv = resolvent_solve(&state, &ComplexMatrix::identity(n, n))?;
    Ok(sys.c() * inv)
}

/// `‖ŷ_N(z) − F(z) û(z) − W(z) x(0)‖` for a finitely supported input.
///
/// The input transform is exact; only the output transform is truncated at `level`.
pub fn frequency_residual(
    sys: &SystemRealization,
    u: &LatticeSequence,
    x0: &ComplexVector,
    z: &EvaluationPoint,
    level: u32,
) -> Result<f64> {
    check_point(sys, z)?;
    if let Some(support) = u.support_degree() {
        if support > level {
            return Err(Error::Range(format!(
                "input supported up to |n| = {support}, beyond truncation level {level}"
            )));
        }
    }
    let traj = simulate(sys, u, x0, level)?;
    let y_hat = ztransform(&traj.output, z, level)?;
    let u_hat = ztransform(u, z, u.level())?;
    let predicted = transfer_eval(sys, z)? * u_hat + observation_eval(sys, z)? * x0;
    Ok((y_hat - predicted).norm())
}
