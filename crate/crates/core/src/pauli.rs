//! Pauli-string algebra.
//!
//! A [`PauliTerm`] stores its axes as a pair of bitmasks (`x`, `z`) over at
//! most 64 qubits; qubit 0 is the least-significant bit everywhere. The
//! operator encoded by `(x, z)` is `i^{|x & z|} X^x Z^z`, so a set bit in both
//! masks is a `Y`.
//!
//! Labels are written most-significant qubit first, the same way bitstrings
//! are: `"XZ"` is `X` on qubit 1 and `Z` on qubit 0.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::DenseLimits;

/// Largest register a bitmask term can address.
pub const MAX_WIDTH: usize = 64;

/// Terms with |coefficient| below this are dropped by [`PauliSum::simplify`].
pub const DROP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' | 'i' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// A real multiple of a Pauli string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    width: usize,
    x: u64,
    z: u64,
    pub coefficient: f64,
}

fn width_mask(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

impl PauliTerm {
    /// Builds a term from raw masks. Bits at or above `width` must be clear.
    pub fn from_masks(width: usize, x: u64, z: u64, coefficient: f64) -> Result<Self> {
        if width > MAX_WIDTH {
            return Err(Error::invalid(format!(
                "Pauli terms support at most {MAX_WIDTH} qubits, got {width}"
            )));
        }
        if (x | z) & !width_mask(width) != 0 {
            return Err(Error::invalid("Pauli mask has bits outside the register"));
        }
        if !coefficient.is_finite() {
            return Err(Error::NonFinite(format!("Pauli coefficient {coefficient}")));
        }
        Ok(Self {
            width,
            x,
            z,
            coefficient,
        })
    }

    /// `axes[q]` is the operator on qubit `q`.
    pub fn from_axes(axes: &[Pauli], coefficient: f64) -> Result<Self> {
        let (mut x, mut z) = (0u64, 0u64);
        if axes.len() > MAX_WIDTH {
            return Err(Error::invalid(format!(
                "Pauli terms support at most {MAX_WIDTH} qubits, got {}",
                axes.len()
            )));
        }
        for (q, p) in axes.iter().enumerate() {
            let (bx, bz) = p.bits();
            x |= (bx as u64) << q;
            z |= (bz as u64) << q;
        }
        Self::from_masks(axes.len(), x, z, coefficient)
    }

    /// Parses a label such as `"XIZY"` (most-significant qubit first).
    pub fn from_label(label: &str, coefficient: f64) -> Result<Self> {
        let mut axes = Vec::with_capacity(label.len());
        for c in label.chars().rev() {
            axes.push(
                Pauli::from_char(c)
                    .ok_or_else(|| Error::invalid(format!("bad Pauli character {c:?}")))?,
            );
        }
        Self::from_axes(&axes, coefficient)
    }

    pub fn identity(width: usize, coefficient: f64) -> Result<Self> {
        Self::from_masks(width, 0, 0, coefficient)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    /// Qubits carrying a non-identity axis.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn is_identity(&self) -> bool {
        self.support() == 0
    }

    pub fn axis(&self, qubit: usize) -> Pauli {
        Pauli::from_bits((self.x >> qubit) & 1 == 1, (self.z >> qubit) & 1 == 1)
    }

    pub fn axes(&self) -> Vec<Pauli> {
        (0..self.width).map(|q| self.axis(q)).collect()
    }

    pub fn label(&self) -> String {
        (0..self.width).rev().map(|q| self.axis(q).as_char()).collect()
    }

    pub fn with_coefficient(mut self, coefficient: f64) -> Self {
        self.coefficient = coefficient;
        self
    }

    fn same_axes(&self, other: &Self) -> bool {
        self.x == other.x && self.z == other.z
    }

    /// Canonical order on axes: lexicographic on the label with `I < X < Y < Z`.
    pub fn cmp_axes(&self, other: &Self) -> Ordering {
        axis_key(self.width, self.x, self.z).cmp(&axis_key(other.width, other.x, other.z))
    }

    fn check_width(&self, other: &Self) -> Result<()> {
        if self.width != other.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                found: other.width,
            });
        }
        Ok(())
    }

    /// Full commutation: the number of positions where both axes are
    /// non-identity and differ is even.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_width(other)?;
        Ok(commute_masks(self.x, self.z, other.x, other.z))
    }

    /// Qubit-wise commutation: at every position the axes agree or one is `I`.
    pub fn qubitwise_commutes(&self, other: &Self) -> Result<bool> {
        self.check_width(other)?;
        Ok(qubitwise_masks(self.x, self.z, other.x, other.z))
    }
}

fn axis_code(x: bool, z: bool) -> u128 {
    match (x, z) {
        (false, false) => 0,
        (true, false) => 1,
        (true, true) => 2,
        (false, true) => 3,
    }
}

fn axis_key(width: usize, x: u64, z: u64) -> (usize, u128) {
    let mut key = 0u128;
    for q in (0..width).rev() {
        key = (key << 2) | axis_code((x >> q) & 1 == 1, (z >> q) & 1 == 1);
    }
    (width, key)
}

pub(crate) fn commute_masks(x1: u64, z1: u64, x2: u64, z2: u64) -> bool {
    ((x1 & z2) ^ (z1 & x2)).count_ones() % 2 == 0
}

pub(crate) fn qubitwise_masks(x1: u64, z1: u64, x2: u64, z2: u64) -> bool {
    let overlap = (x1 | z1) & (x2 | z2);
    ((x1 ^ x2) | (z1 ^ z2)) & overlap == 0
}

/// Product of two Pauli strings in the `(x, z)` encoding. Returns the power of
/// `i` in front of the resulting string together with its masks.
pub(crate) fn multiply_masks(a: (u64, u64), b: (u64, u64)) -> (u32, u64, u64) {
    let (x1, z1) = a;
    let (x2, z2) = b;
    let x = x1 ^ x2;
    let z = z1 ^ z2;
    let exponent = (x1 & z1).count_ones() as i64 + (x2 & z2).count_ones() as i64
        - (x & z).count_ones() as i64
        + 2 * (z1 & x2).count_ones() as i64;
    (exponent.rem_euclid(4) as u32, x, z)
}

/// `i^k` for `k` in `0..4`.
pub(crate) fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Matrix element phase: `P|b> = phase(b) |b ^ x>`.
#[inline]
pub(crate) fn basis_phase(x: u64, z: u64, b: u64) -> Complex64 {
    let k = (x & z).count_ones() + 2 * (b & z).count_ones();
    i_pow(k)
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.coefficient, self.label())
    }
}

/// A weighted sum of Pauli strings over a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    width: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            terms: Vec::new(),
        }
    }

    pub fn from_terms(width: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        let mut sum = Self::new(width);
        for t in terms {
            sum.push(t)?;
        }
        Ok(sum)
    }

    pub fn push(&mut self, term: PauliTerm) -> Result<()> {
        if term.width != self.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                found: term.width,
            });
        }
        self.terms.push(term);
        Ok(())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of identity coefficients.
    pub fn identity_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.is_identity())
            .map(|t| t.coefficient)
            .sum()
    }

    /// Identity coefficient and the remaining non-identity terms, in order.
    pub fn split_identity(&self) -> (f64, PauliSum) {
        let rest = self.terms.iter().filter(|t| !t.is_identity()).copied().collect();
        (
            self.identity_coefficient(),
            PauliSum {
                width: self.width,
                terms: rest,
            },
        )
    }

    /// Merges duplicate axes, drops near-zero terms and sorts canonically.
    pub fn simplify(&self) -> PauliSum {
        let mut sorted = self.terms.clone();
        sorted.sort_by(|a, b| a.cmp_axes(b));
        let mut merged: Vec<PauliTerm> = Vec::with_capacity(sorted.len());
        for t in sorted {
            match merged.last_mut() {
                Some(last) if last.same_axes(&t) => last.coefficient += t.coefficient,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coefficient.abs() >= DROP_TOLERANCE);
        PauliSum {
            width: self.width,
            terms: merged,
        }
    }

    /// `(self - shift·I) / scale`, simplified.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<PauliSum> {
        let mut terms: Vec<PauliTerm> = self.terms.clone();
        terms.push(PauliTerm::identity(self.width, -shift)?);
        for t in &mut terms {
            t.coefficient /= scale;
        }
        Ok(PauliSum {
            width: self.width,
            terms,
        }
        .simplify())
    }

    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        self.to_matrix_with_limit(DenseLimits::default().matrix_qubits)
    }

    /// Dense `2^w × 2^w` realization; qubit 0 is the least-significant factor.
    pub fn to_matrix_with_limit(&self, limit: usize) -> Result<DMatrix<Complex64>> {
        if self.width > limit {
            return Err(Error::OverDenseLimit {
                what: "dense matrix",
                width: self.width,
                limit,
            });
        }
        let dim = 1usize << self.width;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for t in &self.terms {
            for b in 0..dim as u64 {
                let row = (b ^ t.x) as usize;
                m[(row, b as usize)] += basis_phase(t.x, t.z, b) * t.coefficient;
            }
        }
        Ok(m)
    }

    /// One term per line: `<coeff> <label>`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            out.push_str(&format!("{:e} {}\n", t.coefficient, t.label()));
        }
        out
    }

    /// Parses the line format written by [`to_text`](Self::to_text). Blank
    /// lines and `#` comments are skipped; the width comes from the first label.
    pub fn from_text(text: &str) -> Result<PauliSum> {
        let mut sum: Option<PauliSum> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(coeff), Some(label), None) = (parts.next(), parts.next(), parts.next())
            else {
                return Err(Error::parse(line_no, "expected `<coeff> <axes>`"));
            };
            let c: f64 = coeff
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad coefficient {coeff:?}")))?;
            let term = PauliTerm::from_label(label, c)
                .map_err(|e| Error::parse(line_no, e.to_string()))?;
            let s = sum.get_or_insert_with(|| PauliSum::new(term.width));
            s.push(term).map_err(|e| Error::parse(line_no, e.to_string()))?;
        }
        sum.ok_or_else(|| Error::parse(0, "no terms"))
    }
}

impl FromStr for PauliSum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PauliSum::from_text(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommuteMode {
    Qubitwise,
    General,
}

impl CommuteMode {
    pub fn compatible(self, a: &PauliTerm, b: &PauliTerm) -> bool {
        match self {
            CommuteMode::Qubitwise => qubitwise_masks(a.x, a.z, b.x, b.z),
            CommuteMode::General => commute_masks(a.x, a.z, b.x, b.z),
        }
    }
}

impl FromStr for CommuteMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qubitwise" | "qwc" => Ok(CommuteMode::Qubitwise),
            "general" => Ok(CommuteMode::General),
            other => Err(Error::invalid(format!("unknown grouping mode {other:?}"))),
        }
    }
}

/// Disjoint index sets over a sum's terms, each internally commuting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermPartition {
    pub groups: Vec<Vec<usize>>,
    pub mode: CommuteMode,
}

impl TermPartition {
    /// Checks coverage (each index exactly once) and pairwise commutation.
    pub fn validate(&self, sum: &PauliSum) -> Result<()> {
        let mut seen = vec![false; sum.len()];
        for g in &self.groups {
            for &i in g {
                if i >= sum.len() || seen[i] {
                    return Err(Error::invalid(format!(
                        "partition index {i} out of range or repeated"
                    )));
                }
                seen[i] = true;
            }
            for (k, &i) in g.iter().enumerate() {
                for &j in &g[k + 1..] {
                    if !self.mode.compatible(&sum.terms[i], &sum.terms[j]) {
                        return Err(Error::invalid(format!(
                            "terms {i} and {j} do not commute under {:?}",
                            self.mode
                        )));
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::invalid("partition does not cover every term"));
        }
        Ok(())
    }
}

/// Greedy first-fit coloring of the non-commutation graph, in term order.
pub fn group_commuting(sum: &PauliSum, mode: CommuteMode) -> TermPartition {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, t) in sum.terms.iter().enumerate() {
        let slot = groups
            .iter()
            .position(|g| g.iter().all(|&j| mode.compatible(t, &sum.terms[j])));
        match slot {
            Some(k) => groups[k].push(i),
            None => groups.push(vec![i]),
        }
    }
    TermPartition { groups, mode }
}
