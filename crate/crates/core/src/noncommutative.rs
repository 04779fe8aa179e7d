//! Noncommutative Fornasini-Marchesini systems evolving along the free semigroup.
//!
//! ```text
//! x(k·α) = A_k x(α) + B_k u(α),   k = 1, …, d
//! y(α)   = C x(α) + D u(α)
//! ```
//!
//! The frequency domain is the set of strict row contractions `T = (T₁, …, T_d)`
//! on `K = ℂ^{dim_K}`, with
//!
//! ```text
//! ŵ(T) = Σ_α w(α) ⊗ T^α
//! F(T) = D ⊗ I + (C ⊗ I)(I − Σ A_k ⊗ T_k)⁻¹ (Σ B_k ⊗ T_k)
//! W(T) = (C ⊗ I)(I − Σ A_k ⊗ T_k)⁻¹
//! ```
//!
//! Kronecker factors are ordered `(system space) ⊗ K`.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::algebra::{
    check_finite, hstack, kron, operator_norm, resolvent_solve, ComplexMatrix, ComplexVector,
};
use crate::commutative::LatticeSequence;
use crate::error::{dim_err, Error, Result};
use crate::levels::{stack_level, unstack_level, LevelOperators};
use crate::system::SystemRealization;
use crate::words::{level_size, words_up_to, MultiIndex, Word};

/// Row contractions must satisfy `‖[T₁ ⋯ T_d]‖ ≤ 1 − STRICTNESS_MARGIN`.
pub const STRICTNESS_MARGIN: f64 = 1e-9;

/// Upper bound on the number of stored word entries in a single simulation.
pub const MAX_WORD_ENTRIES: u64 = 1 << 22;

/// A vector-valued sequence on the words of length at most `level`; absent entries are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct WordSequence {
    arity: usize,
    dim: usize,
    level: usize,
    values: BTreeMap<Word, ComplexVector>,
}

impl WordSequence {
    pub fn new(arity: usize, dim: usize, level: usize) -> Self {
        Self {
            arity,
            dim,
            level,
            values: BTreeMap::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn insert(&mut self, w: Word, v: ComplexVector) -> Result<()> {
        if w.alphabet() != self.arity {
            return Err(dim_err(format!(
                "word over {} letters in a sequence over {}",
                w.alphabet(),
                self.arity
            )));
        }
        if w.len() > self.level {
            return Err(Error::Range(format!(
                "|{w}| exceeds truncation level {}",
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
        self.values.insert(w, v);
        Ok(())
    }

    pub fn get(&self, w: &Word) -> Option<&ComplexVector> {
        self.values.get(w)
    }

    pub fn value(&self, w: &Word) -> ComplexVector {
        self.values
            .get(w)
            .cloned()
            .unwrap_or_else(|| ComplexVector::zeros(self.dim))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &ComplexVector)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn support_len(&self) -> Option<usize> {
        self.values
            .iter()
            .filter(|(_, v)| v.iter().any(|z| *z != Complex64::new(0.0, 0.0)))
            .map(|(w, _)| w.len())
            .max()
    }
}

/// A strict row contraction `T = (T₁, …, T_d)` on `K = ℂ^{dim_K}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RowContractionTuple {
    blocks: Vec<ComplexMatrix>,
    row_norm: f64,
}

impl RowContractionTuple {
    pub fn new(blocks: Vec<ComplexMatrix>) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::Domain("a row contraction needs at least one block".into()))?;
        let k = first.nrows();
        if k == 0 {
            return Err(dim_err("row contraction on a zero-dimensional space"));
        }
        for (j, b) in blocks.iter().enumerate() {
            if b.shape() != (k, k) {
                return Err(dim_err(format!(
                    "T{} is {}x{}, expected {k}x{k}",
                    j + 1,
                    b.nrows(),
                    b.ncols()
                )));
            }
            check_finite(b, &format!("T{}", j + 1))?;
        }
        let refs: Vec<&ComplexMatrix> = blocks.iter().collect();
        let row_norm = operator_norm(&hstack(&refs)?)?;
        if row_norm > 1.0 - STRICTNESS_MARGIN {
            return Err(Error::Domain(format!(
                "‖[T₁ ⋯ T_d]‖ = {row_norm} is not a strict contraction"
            )));
        }
        Ok(Self { blocks, row_norm })
    }

    /// The scalar tuple `(z₁, …, z_d)` acting on `K = ℂ`.
    pub fn from_scalars(z: &[Complex64]) -> Result<Self> {
        Self::new(
            z.iter()
                .map(|&zk| ComplexMatrix::from_element(1, 1, zk))
                .collect(),
        )
    }

    pub fn arity(&self) -> usize {
        self.blocks.len()
    }

    pub fn dim_k(&self) -> usize {
        self.blocks[0].nrows()
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    /// `‖[T₁ ⋯ T_d]‖`.
    pub fn row_norm(&self) -> f64 {
        self.row_norm
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordTrajectory {
    pub input: WordSequence,
    pub state: WordSequence,
    pub output: WordSequence,
    pub level: usize,
}

impl WordTrajectory {
    pub fn initial_state(&self) -> ComplexVector {
        self.state.value(&Word::empty(self.state.arity()))
    }
}

/// Level-stacked trajectory: entry `n` holds the words of length `n` in block order.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelTrajectory {
    pub inputs: Vec<ComplexVector>,
    pub states: Vec<ComplexVector>,
    pub outputs: Vec<ComplexVector>,
}

impl LevelTrajectory {
    pub fn level(&self) -> usize {
        self.states.len() - 1
    }

    /// Re-indexes the stacked outputs by word.
    pub fn output_sequence(&self, arity: usize, dim_y: usize) -> Result<WordSequence> {
        unstack_all(&self.outputs, arity, dim_y)
    }

    pub fn state_sequence(&self, arity: usize, dim_x: usize) -> Result<WordSequence> {
        unstack_all(&self.states, arity, dim_x)
    }
}

fn unstack_all(levels: &[ComplexVector], arity: usize, dim: usize) -> Result<WordSequence> {
    let mut seq = WordSequence::new(arity, dim, levels.len().saturating_sub(1));
    for (n, v) in levels.iter().enumerate() {
        for (w, x) in unstack_level(v, arity, n, dim)? {
            seq.insert(w, x)?;
        }
    }
    Ok(seq)
}

fn check_word_signal(sys: &SystemRealization, u: &WordSequence, x0: &ComplexVector) -> Result<()> {
    if u.arity() != sys.arity() {
        return Err(dim_err(format!(
            "input over {} letters, system has d = {}",
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

fn check_word_budget(d: usize, level: usize) -> Result<()> {
    let total = (0..=level)
        .map(|n| level_size(d, n))
        .try_fold(0u64, |acc, c| c.and_then(|c| acc.checked_add(c)));
    match total {
        Some(t) if t <= MAX_WORD_ENTRIES => Ok(()),
        _ => Err(Error::Range(format!(
            "simulating {d}-letter words up to length {level} exceeds {MAX_WORD_ENTRIES} entries"
        ))),
    }
}

/// Runs the word recursion for every `|α| ≤ level`.
pub fn simulate_words(
    sys: &SystemRealization,
    u: &WordSequence,
    x_empty: &ComplexVector,
    level: usize,
) -> Result<WordTrajectory> {
    check_word_signal(sys, u, x_empty)?;
    let d = sys.arity();
    check_word_budget(d, level)?;
    let mut state = WordSequence::new(d, sys.dim_x(), level);
    let mut output = WordSequence::new(d, sys.dim_y(), level);
    let mut input = WordSequence::new(d, sys.dim_u(), level);

    // Current level in ν order.
    let mut current = vec![x_empty.clone()];
    for n in 0..=level {
        let width = current.len();
        let mut next = if n < level {
            vec![ComplexVector::zeros(sys.dim_x()); width * d]
        } else {
            Vec::new()
        };
        for (j, x) in current.into_iter().enumerate() {
            let w = Word::from_nu_index(d, n, j as u64 + 1)?;
            let uw = u.get(&w);
            if n < level {
                for k in 0..d {
                    let mut xk = &sys.a()[k] * &x;
                    if let Some(uw) = uw {
                        xk += &sys.b()[k] * uw;
                    }
                    // ν(k·α) = ν(α) + (k − 1)·dⁿ
                    next[j + k * width] = xk;
                }
            }
            let mut y = sys.c() * &x;
            if let Some(uw) = uw {
                y += sys.d() * uw;
                input.values.insert(w.clone(), uw.clone());
            }
            output.values.insert(w.clone(), y);
            state.values.insert(w, x);
        }
        current = next;
    }
    Ok(WordTrajectory {
        input,
        state,
        output,
        level,
    })
}

/// Runs the level recursion `x̃(n+1) = Ã_n x̃(n) + B̃_n ũ(n)`, `ỹ(n) = C̃_n x̃(n) + D̃_n ũ(n)`.
pub fn simulate_levels(
    sys: &SystemRealization,
    u: &WordSequence,
    x_empty: &ComplexVector,
    level: usize,
) -> Result<LevelTrajectory> {
    check_word_signal(sys, u, x_empty)?;
    check_word_budget(sys.arity(), level)?;
    let ops = LevelOperators::new(sys);
    let mut inputs = Vec::with_capacity(level + 1);
    let mut states = Vec::with_capacity(level + 1);
    let mut outputs = Vec::with_capacity(level + 1);
    let mut x = x_empty.clone();
    for n in 0..=level {
        let un = stack_level(u, n)?;
        outputs.push(ops.output_map(n)? * &x + ops.feedthrough_map(n)? * &un);
        let next = if n < level {
            ops.state_map(n)? * &x + ops.input_map(n)? * &un
        } else {
            ComplexVector::zeros(0)
        };
        states.push(std::mem::replace(&mut x, next));
        inputs.push(un);
    }
    Ok(LevelTrajectory {
        inputs,
        states,
        outputs,
    })
}

/// `M^α = M_{i_N} ⋯ M_{i₁}` for a tuple of square matrices, `M^∅ = I`.
pub fn word_power(ops: &[ComplexMatrix], w: &Word) -> Result<ComplexMatrix> {
    if w.alphabet() != ops.len() {
        return Err(Error::Domain(format!(
            "word over {} letters applied to a {}-tuple",
            w.alphabet(),
            ops.len()
        )));
    }
    let n = ops.first().map_or(0, |m| m.nrows());
    let mut acc = ComplexMatrix::identity(n, n);
    for k in w.letters() {
        acc *= &ops[k - 1];
    }
    Ok(acc)
}

/// The noncommutative functional calculus `T^α`.
pub fn word_calculus(t: &RowContractionTuple, w: &Word) -> Result<ComplexMatrix> {
    word_power(t.blocks(), w)
}

fn check_tuple(sys: &SystemRealization, t: &RowContractionTuple) -> Result<()> {
    if t.arity() != sys.arity() {
        return Err(Error::Domain(format!(
            "{}-tuple evaluated on a system with d = {}",
            t.arity(),
            sys.arity()
        )));
    }
    Ok(())
}

fn column(v: &ComplexVector) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(v.len(), 1, v.as_slice())
}

/// Truncated transform `Σ_{|α| ≤ level} w(α) ⊗ T^α`, of shape `(dim·dim_K) × dim_K`.
pub fn nc_ztransform(w: &WordSequence, t: &RowContractionTuple, level: usize) -> Result<ComplexMatrix> {
    if w.arity() != t.arity() {
        return Err(Error::Domain(format!(
            "sequence over {} letters, {}-tuple",
            w.arity(),
            t.arity()
        )));
    }
    let k = t.dim_k();
    let mut acc = ComplexMatrix::zeros(w.dim() * k, k);
    for (word, v) in w.iter().filter(|(word, _)| word.len() <= level) {
        acc += kron(&column(v), &word_calculus(t, word)?);
    }
    Ok(acc)
}

/// `Σ_k M_k ⊗ T_k`.
fn kron_pencil(mats: &[ComplexMatrix], t: &RowContractionTuple) -> ComplexMatrix {
    let k = t.dim_k();
    let (r, c) = mats[0].shape();
    mats.iter()
        .zip(t.blocks())
        .fold(ComplexMatrix::zeros(r * k, c * k), |acc, (m, tk)| acc + kron(m, tk))
}

fn amplify(m: &ComplexMatrix, dim_k: usize) -> ComplexMatrix {
    kron(m, &ComplexMatrix::identity(dim_k, dim_k))
}

/// `F(T) = D ⊗ I + (C ⊗ I)(I − Σ A_k ⊗ T_k)⁻¹ (Σ B_k ⊗ T_k)`.
pub fn nc_transfer_eval(sys: &SystemRealization, t: &RowContractionTuple) -> Result<ComplexMatrix> {
    check_tuple(sys, t)?;
    let k = t.dim_k();
    let state = kron_pencil(sys.a(), t);
    let input = kron_pencil(sys.b(), t);
    let x = resolvent_solve(&state, &input)?;
    Ok(amplify(sys.d(), k) + amplify(sys.c(), k) * x)
}

/// `W(T) = (C ⊗ I)(I − Σ A_k ⊗ T_k)⁻¹`.
pub fn nc_observation_eval(sys: &SystemRealization, t: &RowContractionTuple) -> Result<ComplexMatrix> {
    check_tuple(sys, t)?;
    let k = t.dim_k();
    let state = kron_pencil(sys.a(), t);
    let n = state.nrows();
    let inv = resolvent_solve(&state, &ComplexMatrix::identity(n, n))?;
    Ok(amplify(sys.c(), k) * inv)
}

/// `D ⊗ I + Σ_k Σ_{|α| ≤ level} (C A^α B_k) ⊗ T^{α·k}`.
///
/// Terms are grouped by `|α|`: `Σ_{|α|=L} A^α ⊗ T^α` is accumulated level by
/// level from `Σ_k A_k ⊗ T_k`, so no word is ever materialized.
pub fn nc_transfer_series(sys: &SystemRealization, t: &RowContractionTuple, level: usize) -> Result<ComplexMatrix> {
    check_tuple(sys, t)?;
    let k = t.dim_k();
    let step = kron_pencil(sys.a(), t);
    let input = kron_pencil(sys.b(), t);
    let out = amplify(sys.c(), k);
    let mut acc = amplify(sys.d(), k);
    let mut level_sum = input;
    for n in 0..=level {
        acc += &out * &level_sum;
        if n < level {
            level_sum = &step * level_sum;
        }
    }
    Ok(acc)
}

/// [`nc_transfer_series`] by explicit enumeration of every word; exponential in `level`.
pub fn nc_transfer_series_words(
    sys: &SystemRealization,
    t: &RowContractionTuple,
    level: usize,
) -> Result<ComplexMatrix> {
    check_tuple(sys, t)?;
    let mut acc = amplify(sys.d(), t.dim_k());
    for alpha in words_up_to(sys.arity(), level)? {
        let ca = sys.c() * word_power(sys.a(), &alpha)?;
        for k in 1..=sys.arity() {
            let coeff = &ca * &sys.b()[k - 1];
            acc += kron(&coeff, &word_calculus(t, &alpha.append(k)?)?);
        }
    }
    Ok(acc)
}

/// `Σ_{|α| ≤ level} (C A^α) ⊗ T^α`, grouped by level.
pub fn nc_observation_series(sys: &SystemRealization, t: &RowContractionTuple, level: usize) -> Result<ComplexMatrix> {
    check_tuple(sys, t)?;
    let step = kron_pencil(sys.a(), t);
    let n = step.nrows();
    let out = amplify(sys.c(), t.dim_k());
    let mut acc = ComplexMatrix::zeros(out.nrows(), n);
    let mut level_sum = ComplexMatrix::identity(n, n);
    for l in 0..=level {
        acc += &out * &level_sum;
        if l < level {
            level_sum = &step * level_sum;
        }
    }
    Ok(acc)
}

/// [`nc_observation_series`] by explicit word enumeration.
pub fn nc_observation_series_words(
    sys: &SystemRealization,
    t: &RowContractionTuple,
    level: usize,
) -> Result<ComplexMatrix> {
    check_tuple(sys, t)?;
    let mut acc = ComplexMatrix::zeros(sys.dim_y() * t.dim_k(), sys.dim_x() * t.dim_k());
    for alpha in words_up_to(sys.arity(), level)? {
        let ca = sys.c() * word_power(sys.a(), &alpha)?;
        acc += kron(&ca, &word_calculus(t, &alpha)?);
    }
    Ok(acc)
}

/// Contraction ratio `r = ‖col[A₁; …; A_d]‖·‖[T₁ ⋯ T_d]‖`, which bounds `‖Σ A_k ⊗ T_k‖`.
pub fn series_ratio(sys: &SystemRealization, t: &RowContractionTuple) -> f64 {
    sys.state_column_norm() * t.row_norm()
}

/// `r^{level+1} / (1 − r)`, the tail of the level-truncated series when every
/// other block of the system matrix is contractive.
pub fn series_tail_bound(ratio: f64, level: usize) -> f64 {
    if ratio >= 1.0 {
        return f64::INFINITY;
    }
    ratio.powi(level as i32 + 1) / (1.0 - ratio)
}

/// Smallest level whose [`series_tail_bound`] is at most `tol`.
pub fn series_level_for(ratio: f64, tol: f64) -> Option<usize> {
    if ratio >= 1.0 || tol <= 0.0 {
        return None;
    }
    (0..10_000).find(|&n| series_tail_bound(ratio, n) <= tol)
}

/// `Σ_{|α| ≤ level} y(α) ⊗ T^α` for the trajectory driven by `u` and `x(∅)`.
///
/// Accumulated level by level through
/// `Σ_{|β|=L+1} x(β) ⊗ T^β = (Σ_k A_k ⊗ T_k) X_L + Σ_k (B_k ⊗ T_k) U_L`,
/// which is the same linear map as [`simulate_words`] followed by
/// [`nc_ztransform`] but never enumerates the `dᴸ` words.
pub fn nc_output_transform(
    sys: &SystemRealization,
    u: &WordSequence,
    x_empty: &ComplexVector,
    t: &RowContractionTuple,
    level: usize,
) -> Result<ComplexMatrix> {
    check_word_signal(sys, u, x_empty)?;
    check_tuple(sys, t)?;
    let k = t.dim_k();
    let step = kron_pencil(sys.a(), t);
    let inject = kron_pencil(sys.b(), t);
    let out = amplify(sys.c(), k);
    let through = amplify(sys.d(), k);

    let mut input_levels = vec![ComplexMatrix::zeros(sys.dim_u() * k, k); level + 1];
    for (w, v) in u.iter().filter(|(w, _)| w.len() <= level) {
        input_levels[w.len()] += kron(&column(v), &word_calculus(t, w)?);
    }
    let mut x_level = kron(&column(x_empty), &ComplexMatrix::identity(k, k));
    let mut acc = ComplexMatrix::zeros(sys.dim_y() * k, k);
    for (n, u_level) in input_levels.iter().enumerate() {
        acc += &out * &x_level + &through * u_level;
        if n < level {
            x_level = &step * &x_level + &inject * u_level;
        }
    }
    Ok(acc)
}

/// `‖ŷ_N(T) − F(T) û(T) − W(T)(x(∅) ⊗ I_K)‖` for a finitely supported input.
pub fn nc_frequency_residual(
    sys: &SystemRealization,
    u: &WordSequence,
    x_empty: &ComplexVector,
    t: &RowContractionTuple,
    level: usize,
) -> Result<f64> {
    if let Some(support) = u.support_len() {
        if support > level {
            return Err(Error::Range(format!(
                "input supported up to |α| = {support}, beyond truncation level {level}"
            )));
        }
    }
    let y_hat = nc_output_transform(sys, u, x_empty, t, level)?;
    let u_hat = nc_ztransform(u, t, u.level())?;
    let k = t.dim_k();
    let x_op = kron(&column(x_empty), &ComplexMatrix::identity(k, k));
    let predicted = nc_transfer_eval(sys, t)? * u_hat + nc_observation_eval(sys, t)? * x_op;
    operator_norm(&(y_hat - predicted))
}

/// Aggregates `v̄(n) = Σ_{a(α) = n} v(α)` over `|α| ≤ level`.
pub fn symmetrize(w: &WordSequence, level: usize) -> LatticeSequence {
    let level32 = u32::try_from(level).unwrap_or(u32::MAX);
    let mut out = LatticeSequence::new(w.arity(), w.dim(), level32);
    let mut sums: BTreeMap<MultiIndex, ComplexVector> = BTreeMap::new();
    for (word, v) in w.iter().filter(|(word, _)| word.len() <= level) {
        *sums
            .entry(word.abelianize())
            .or_insert_with(|| ComplexVector::zeros(w.dim())) += v;
    }
    for (n, v) in sums {
        out.insert(n, v).expect("degree bounded by level");
    }
    out
}

fn word_level_energy(seq: &WordSequence, len: usize) -> f64 {
    seq.iter()
        .filter(|(w, _)| w.len() == len)
        .map(|(_, v)| v.norm_squared())
        .sum()
}

/// Telescoped energy-balance slack, one entry per level `0..=level`:
/// `[Σ_{|α|≤N} ‖u‖² + ‖x(∅)‖²] − [Σ_{|α|≤N} ‖y‖² + Σ_{|α|=N+1} ‖x‖²]`.
pub fn nc_energy_slack(sys: &SystemRealization, traj: &WordTrajectory, level: usize) -> Result<Vec<f64>> {
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
    let mut supplied = traj.initial_state().norm_squared();
    let mut emitted = 0.0;
    let mut slacks = Vec::with_capacity(level + 1);
    for n in 0..=level {
        supplied += word_level_energy(&traj.input, n);
        emitted += word_level_energy(&traj.output, n);
        slacks.push(supplied - emitted - word_level_energy(&traj.state, n + 1));
    }
    Ok(slacks)
}

/// Partial sums `Σ_{|α| ≤ N} ‖x(α)‖²` for `N = 0..=level`.
pub fn state_energy_partial_sums(traj: &WordTrajectory) -> Vec<f64> {
    let mut total = 0.0;
    (0..=traj.level)
        .map(|n| {
            total += word_level_energy(&traj.state, n);
            total
        })
        .collect()
}
