//! Words over the alphabet `{1, …, d}`, lattice multi-indices, and the
//! multinomial weight that links them.
//!
//! A word `α = i_N ⋯ i₂ i₁` is stored left to right, so `i₁` is the last
//! element. Prepending a letter (`k·α`) is the direction in which the state
//! recursion moves.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest `|n|` accepted by [`omega_weight`].
pub const OMEGA_DEGREE_CAP: u32 = 40;

/// Default largest word length that [`enumerate_words`] will materialize.
pub const DEFAULT_WORD_LEVEL_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    d: usize,
    letters: Vec<u16>,
}

impl Word {
    pub fn empty(d: usize) -> Self {
        Self {
            d,
            letters: Vec::new(),
        }
    }

    /// Builds `α = letters[0] ⋯ letters[N-1]`, i.e. `letters[N-1]` is `i₁`.
    pub fn new(d: usize, letters: impl IntoIterator<Item = usize>) -> Result<Self> {
        if d == 0 || d > u16::MAX as usize {
            return Err(Error::Domain(format!("alphabet size {d} unsupported")));
        }
        let letters = letters
            .into_iter()
            .map(|k| check_letter(d, k).map(|k| k as u16))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { d, letters })
    }

    pub fn letter(d: usize, k: usize) -> Result<Self> {
        Self::new(d, [k])
    }

    pub fn alphabet(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Letters from `i_N` down to `i₁`.
    pub fn letters(&self) -> impl DoubleEndedIterator<Item = usize> + ExactSizeIterator + '_ {
        self.letters.iter().map(|&k| k as usize)
    }

    /// `k·α`: `k` becomes the new leftmost letter.
    pub fn prepend(&self, k: usize) -> Result<Self> {
        let k = check_letter(self.d, k)? as u16;
        let mut letters = Vec::with_capacity(self.len() + 1);
        letters.push(k);
        letters.extend_from_slice(&self.letters);
        Ok(Self { d: self.d, letters })
    }

    /// `α·k`: `k` becomes the new rightmost letter `i₁`.
    pub fn append(&self, k: usize) -> Result<Self> {
        let k = check_letter(self.d, k)? as u16;
        let mut letters = self.letters.clone();
        letters.push(k);
        Ok(Self { d: self.d, letters })
    }

    /// `α·β`.
    pub fn concat_word(&self, other: &Word) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::Domain(format!(
                "cannot concatenate words over alphabets of size {} and {}",
                self.d, other.d
            )));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(Self { d: self.d, letters })
    }

    pub fn reversed(&self) -> Self {
        let mut letters = self.letters.clone();
        letters.reverse();
        Self { d: self.d, letters }
    }

    /// `ν(α) = 1 + Σ_j (i_j − 1)·d^{j−1}`, a bijection from length-`N` words onto `1..=d^N`.
    pub fn nu_index(&self) -> u64 {
        // i₁ is the least significant digit.
        1 + self
            .letters
            .iter()
            .fold(0u64, |acc, &k| acc * self.d as u64 + (k as u64 - 1))
    }

    /// Inverse of [`Word::nu_index`] on words of length `len`.
    pub fn from_nu_index(d: usize, len: usize, index: u64) -> Result<Self> {
        let count = level_size(d, len)
            .ok_or_else(|| Error::Range(format!("d^{len} overflows for d = {d}")))?;
        if index == 0 || index > count {
            return Err(Error::Range(format!(
                "index {index} outside 1..={count} for words of length {len}"
            )));
        }
        let mut rest = index - 1;
        let mut letters = vec![0u16; len];
        for slot in letters.iter_mut().rev() {
            *slot = (rest % d as u64) as u16 + 1;
            rest /= d as u64;
        }
        Ok(Self { d, letters })
    }

    /// Zero-based position of `x(α)` inside the level-stacked state vector.
    ///
    /// The block-diagonal level maps `diag(col[A₁; …; A_d])` place `x(k·α)` at
    /// `d·pos(α) + (k − 1)`, so the most recently applied letter is the least
    /// significant digit. This is the ν-index of the reversed word.
    pub fn stack_index(&self) -> usize {
        self.letters
            .iter()
            .rev()
            .fold(0usize, |acc, &k| acc * self.d + (k as usize - 1))
    }

    pub fn from_stack_index(d: usize, len: usize, pos: usize) -> Result<Self> {
        let w = Self::from_nu_index(d, len, pos as u64 + 1)?;
        Ok(w.reversed())
    }

    pub fn abelianize(&self) -> MultiIndex {
        let mut components = vec![0u32; self.d];
        for &k in &self.letters {
            components[k as usize - 1] += 1;
        }
        MultiIndex { components }
    }
}

fn check_letter(d: usize, k: usize) -> Result<usize> {
    if k == 0 || k > d {
        Err(Error::Domain(format!("letter {k} outside alphabet 1..={d}")))
    } else {
        Ok(k)
    }
}

/// Ordered by length, then by ν-index.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.d
            .cmp(&other.d)
            .then(self.letters.len().cmp(&other.letters.len()))
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("∅");
        }
        let sep = if self.d > 9 { "." } else { "" };
        for (i, k) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(sep)?;
            }
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

/// `k·w`.
pub fn concat(k: usize, w: &Word) -> Result<Word> {
    w.prepend(k)
}

pub fn nu_index(w: &Word) -> u64 {
    w.nu_index()
}

pub fn abelianize(w: &Word) -> MultiIndex {
    w.abelianize()
}

/// `d^len`, or `None` on overflow.
pub fn level_size(d: usize, len: usize) -> Option<u64> {
    (d as u64).checked_pow(u32::try_from(len).ok()?)
}

/// All `d^n` words of length `n`, the word at 1-based position `j` having ν-index `j`.
pub fn enumerate_words(d: usize, n: usize) -> Result<Vec<Word>> {
    enumerate_words_capped(d, n, DEFAULT_WORD_LEVEL_CAP)
}

pub fn enumerate_words_capped(d: usize, n: usize, cap: usize) -> Result<Vec<Word>> {
    if d == 0 {
        return Err(Error::Domain("alphabet must be nonempty".into()));
    }
    if n > cap {
        return Err(Error::Range(format!(
            "word length {n} exceeds enumeration cap {cap}"
        )));
    }
    let count = level_size(d, n).ok_or_else(|| Error::Range("level size overflow".into()))?;
    (1..=count).map(|j| Word::from_nu_index(d, n, j)).collect()
}

/// Words of every length `0..=n`, level by level.
pub fn words_up_to(d: usize, n: usize) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    for len in 0..=n {
        out.extend(enumerate_words(d, len)?);
    }
    Ok(out)
}

/// A point `n = (n₁, …, n_d)` of the lattice `Z₊ᵈ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    components: Vec<u32>,
}

impl MultiIndex {
    pub fn new(components: Vec<u32>) -> Self {
        Self { components }
    }

    pub fn zero(d: usize) -> Self {
        Self {
            components: vec![0; d],
        }
    }

    /// The unit vector `e_j`, `j` in `1..=d`.
    pub fn unit(d: usize, j: usize) -> Result<Self> {
        check_letter(d, j)?;
        let mut m = Self::zero(d);
        m.components[j - 1] = 1;
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[u32] {
        &self.components
    }

    /// `|n| = n₁ + ⋯ + n_d`.
    pub fn degree(&self) -> u32 {
        self.components.iter().sum()
    }

    /// `n + e_j`.
    pub fn shifted_up(&self, j: usize) -> Self {
        let mut m = self.clone();
        m.components[j - 1] += 1;
        m
    }

    /// `n − e_j`, or `None` when it leaves the lattice.
    pub fn shifted_down(&self, j: usize) -> Option<Self> {
        let c = *self.components.get(j.checked_sub(1)?)?;
        if c == 0 {
            return None;
        }
        let mut m = self.clone();
        m.components[j - 1] -= 1;
        Some(m)
    }

    pub fn checked_add(&self, other: &MultiIndex) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!(
                "multi-indices of length {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(Self {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

/// Graded order: degree first, then lexicographic with larger leading components first.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.components.cmp(&self.components))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// All multi-indices in `Z₊ᵈ` of degree exactly `degree`, in graded order.
pub fn multi_indices(d: usize, degree: u32) -> Vec<MultiIndex> {
    fn fill(prefix: &mut Vec<u32>, slots: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
        if slots == 1 {
            prefix.push(remaining);
            out.push(MultiIndex::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for first in (0..=remaining).rev() {
            prefix.push(first);
            fill(prefix, slots - 1, remaining - first, out);
            prefix.pop();
        }
    }
    if d == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    fill(&mut Vec::with_capacity(d), d, degree, &mut out);
    out
}

pub fn multi_indices_up_to(d: usize, max_degree: u32) -> Vec<MultiIndex> {
    (0..=max_degree).flat_map(|l| multi_indices(d, l)).collect()
}

/// `ω(n) = |n|! / (n₁!⋯n_d!)`, the number of words abelianizing to `n`.
pub fn omega_weight(n: &MultiIndex) -> Result<f64> {
    let total = n.degree();
    if total > OMEGA_DEGREE_CAP {
        return Err(Error::Range(format!(
            "|n| = {total} exceeds the weight cap {OMEGA_DEGREE_CAP}"
        )));
    }
    // Product of binomials C(n₁+⋯+n_j, n_j); each factor fits comfortably in u128.
    let mut partial = 0u32;
    let mut weight = 1.0f64;
    for &c in n.components() {
        partial += c;
        weight *= binomial(partial, c) as f64;
    }
    Ok(weight)
}

fn binomial(n: u32, k: u32) -> u128 {
    let k = k.min(n - k);
    (1..=k as u128).fold(1u128, |acc, i| acc * (n as u128 - k as u128 + i) / i)
}
