//! Active-space integrals, FCIDUMP I/O and the Jordan-Wigner qubit Hamiltonian.
//!
//! Spin orbitals are spin-blocked: qubit `p` is spatial orbital `p` with spin
//! α and qubit `p + n_spatial` is the same orbital with spin β. With two
//! spatial orbitals the closed-shell reference is `|0101⟩`.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{i_pow, multiply_masks, PauliSum, PauliTerm};

/// Tolerance for symmetry checks and duplicate-entry conflicts.
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// One- and two-body integrals (chemist notation) plus a constant energy.
#[derive(Debug, Clone, PartialEq)]
pub struct MolecularIntegrals {
    pub n_spatial: usize,
    pub n_electrons: usize,
    pub core_energy: f64,
    one_body: Vec<f64>,
    two_body: Vec<f64>,
}

impl MolecularIntegrals {
    /// Zero integrals for `n_spatial` orbitals.
    pub fn zeros(n_spatial: usize, n_electrons: usize) -> Result<Self> {
        if n_spatial == 0 || n_spatial > 32 {
            return Err(Error::invalid(format!(
                "n_spatial must be in 1..=32, got {n_spatial}"
            )));
        }
        if n_electrons == 0 || n_electrons > 2 * n_spatial {
            return Err(Error::invalid(format!(
                "{n_electrons} electrons do not fit {n_spatial} spatial orbitals"
            )));
        }
        Ok(Self {
            n_spatial,
            n_electrons,
            core_energy: 0.0,
            one_body: vec![0.0; n_spatial * n_spatial],
            two_body: vec![0.0; n_spatial.pow(4)],
        })
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_spatial
    }

    #[inline]
    fn idx2(&self, p: usize, q: usize) -> usize {
        p * self.n_spatial + q
    }

    #[inline]
    fn idx4(&self, p: usize, q: usize, r: usize, s: usize) -> usize {
        ((p * self.n_spatial + q) * self.n_spatial + r) * self.n_spatial + s
    }

    pub fn h(&self, p: usize, q: usize) -> f64 {
        self.one_body[self.idx2(p, q)]
    }

    /// `(pq|rs)`.
    pub fn g(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.two_body[self.idx4(p, q, r, s)]
    }

    /// Sets `h[p][q]` and `h[q][p]`.
    pub fn set_h(&mut self, p: usize, q: usize, value: f64) {
        let (a, b) = (self.idx2(p, q), self.idx2(q, p));
        self.one_body[a] = value;
        self.one_body[b] = value;
    }

    /// Sets `(pq|rs)` and its seven symmetry-equivalent slots.
    pub fn set_g(&mut self, p: usize, q: usize, r: usize, s: usize, value: f64) {
        for (a, b, c, d) in eightfold(p, q, r, s) {
            let i = self.idx4(a, b, c, d);
            self.two_body[i] = value;
        }
    }

    /// Checks the symmetric/8-fold invariants and finiteness.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_spatial;
        if !self.core_energy.is_finite()
            || self.one_body.iter().chain(&self.two_body).any(|v| !v.is_finite())
        {
            return Err(Error::NonFinite("integral".into()));
        }
        for p in 0..n {
            for q in 0..n {
                if (self.h(p, q) - self.h(q, p)).abs() > SYMMETRY_TOLERANCE {
                    return Err(Error::invalid(format!("h[{p}][{q}] is not symmetric")));
                }
                for r in 0..n {
                    for s in 0..n {
                        let v = self.g(p, q, r, s);
                        for (a, b, c, d) in eightfold(p, q, r, s) {
                            if (self.g(a, b, c, d) - v).abs() > SYMMETRY_TOLERANCE {
                                return Err(Error::invalid(format!(
                                    "(pq|rs) symmetry broken at ({p}{q}|{r}{s})"
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn reference(&self) -> OccupationState {
        hf_state(self.n_electrons, self.n_spatial).expect("validated electron count")
    }
}

fn eightfold(p: usize, q: usize, r: usize, s: usize) -> [(usize, usize, usize, usize); 8] {
    [
        (p, q, r, s),
        (q, p, r, s),
        (p, q, s, r),
        (q, p, s, r),
        (r, s, p, q),
        (s, r, p, q),
        (r, s, q, p),
        (s, r, q, p),
    ]
}

fn header_value(header: &str, key: &str) -> Option<usize> {
    let upper = header.to_ascii_uppercase();
    let mut from = 0;
    while let Some(pos) = upper[from..].find(key) {
        let start = from + pos;
        let before_ok = start == 0
            || !upper.as_bytes()[start - 1].is_ascii_alphanumeric();
        let rest = upper[start + key.len()..].trim_start();
        if before_ok {
            if let Some(rest) = rest.strip_prefix('=') {
                let digits: String = rest
                    .trim_start()
                    .chars()
                    .take_while(|c| c.is_ascii_digit())
                    .collect();
                return digits.parse().ok();
            }
        }
        from = start + key.len();
    }
    None
}

/// Parses the FCIDUMP subset: a `&FCI ... &END` (or `/`) header carrying
/// `NORB` and `NELEC`, then `value p q r s` lines with 1-based indices.
///
/// `p q 0 0` is one-body, `0 0 0 0` the core energy, four non-zero indices a
/// chemist-notation two-body integral. Orbital-energy lines (`p 0 0 0`) are
/// accepted and ignored. Every entry is mirrored to all symmetry-equivalent
/// slots; a second entry for an already-filled slot must agree within 1e-10.
pub fn parse_fcidump(text: &str) -> Result<MolecularIntegrals> {
    let mut header = String::new();
    let mut lines = text.lines().enumerate();
    let mut in_header = false;
    let mut header_done = false;
    for (i, raw) in lines.by_ref() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let upper = line.to_ascii_uppercase();
        if !in_header {
            if !upper.starts_with("&FCI") {
                return Err(Error::parse(i + 1, "expected `&FCI` header"));
            }
            in_header = true;
        }
        header.push_str(line);
        header.push(' ');
        if upper.ends_with("&END") || upper == "/" || upper.ends_with('/') {
            header_done = true;
            break;
        }
    }
    if !header_done {
        return Err(Error::parse(0, "unterminated FCIDUMP header"));
    }
    let norb = header_value(&header, "NORB").ok_or_else(|| Error::parse(1, "header lacks NORB"))?;
    let nelec =
        header_value(&header, "NELEC").ok_or_else(|| Error::parse(1, "header lacks NELEC"))?;
    let mut mi = MolecularIntegrals::zeros(norb, nelec).map_err(|e| Error::parse(1, e.to_string()))?;

    let mut h_set = vec![false; norb * norb];
    let mut g_set = vec![false; norb.pow(4)];
    let mut core_set = false;

    for (i, raw) in lines {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::parse(line_no, "expected `value p q r s`"));
        }
        let value: f64 = fields[0]
            .replace(['D', 'd'], "E")
            .parse()
            .map_err(|_| Error::parse(line_no, format!("bad value {:?}", fields[0])))?;
        if !value.is_finite() {
            return Err(Error::parse(line_no, "non-finite value"));
        }
        let mut idx = [0usize; 4];
        for (k, f) in fields[1..].iter().enumerate() {
            idx[k] = f
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad index {f:?}")))?;
            if idx[k] > norb {
                return Err(Error::parse(
                    line_no,
                    format!("index {} out of range for NORB={norb}", idx[k]),
                ));
            }
        }
        let conflict = |old: f64| {
            Error::parse(
                line_no,
                format!("conflicting duplicate entry: {old} vs {value}"),
            )
        };
        match idx {
            [0, 0, 0, 0] => {
                if core_set && (mi.core_energy - value).abs() > SYMMETRY_TOLERANCE {
                    return Err(conflict(mi.core_energy));
                }
                mi.core_energy = value;
                core_set = true;
            }
            [p, 0, 0, 0] if p > 0 => {}
            [p, q, 0, 0] if p > 0 && q > 0 => {
                let (p, q) = (p - 1, q - 1);
                let slot = mi.idx2(p, q);
                if h_set[slot] && (mi.one_body[slot] - value).abs() > SYMMETRY_TOLERANCE {
                    return Err(conflict(mi.one_body[slot]));
                }
                mi.set_h(p, q, value);
                h_set[slot] = true;
                h_set[mi.idx2(q, p)] = true;
            }
            [p, q, r, s] if p > 0 && q > 0 && r > 0 && s > 0 => {
                let (p, q, r, s) = (p - 1, q - 1, r - 1, s - 1);
                let slot = mi.idx4(p, q, r, s);
                if g_set[slot] && (mi.two_body[slot] - value).abs() > SYMMETRY_TOLERANCE {
                    return Err(conflict(mi.two_body[slot]));
                }
                for (a, b, c, d) in eightfold(p, q, r, s) {
                    let k = mi.idx4(a, b, c, d);
                    mi.two_body[k] = value;
                    g_set[k] = true;
                }
            }
            _ => return Err(Error::parse(line_no, "unsupported index pattern")),
        }
    }
    Ok(mi)
}

/// Writes the unique entries of `mi` in the format read by [`parse_fcidump`].
pub fn to_fcidump(mi: &MolecularIntegrals) -> String {
    let n = mi.n_spatial;
    let mut out = String::new();
    let orbsym = vec!["1"; n].join(",");
    let _ = writeln!(
        out,
        "&FCI NORB={n},NELEC={},MS2=0,\n ORBSYM={orbsym},\n ISYM=1,\n&END",
        mi.n_electrons
    );
    for p in 0..n {
        for q in 0..=p {
            for r in 0..n {
                for s in 0..=r {
                    if p * n + q < r * n + s {
                        continue;
                    }
                    let v = mi.g(p, q, r, s);
                    if v != 0.0 {
                        let _ = writeln!(out, "{v:e} {} {} {} {}", p + 1, q + 1, r + 1, s + 1);
                    }
                }
            }
        }
    }
    for p in 0..n {
        for q in 0..=p {
            let v = mi.h(p, q);
            if v != 0.0 {
                let _ = writeln!(out, "{v:e} {} {} 0 0", p + 1, q + 1);
            }
        }
    }
    let _ = writeln!(out, "{:e} 0 0 0 0", mi.core_energy);
    out
}

/// Occupation bitmask over `2·n_spatial` spin orbitals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OccupationState {
    pub bits: u64,
    pub n_spatial: usize,
}

impl OccupationState {
    pub fn n_qubits(&self) -> usize {
        2 * self.n_spatial
    }

    pub fn electron_count(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn is_occupied(&self, spin_orbital: usize) -> bool {
        (self.bits >> spin_orbital) & 1 == 1
    }

    /// Bitstring, most-significant qubit first.
    pub fn bitstring(&self) -> String {
        format_bits(self.bits, self.n_qubits())
    }
}

pub(crate) fn format_bits(bits: u64, width: usize) -> String {
    (0..width)
        .rev()
        .map(|q| if (bits >> q) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Qubit index of spatial orbital `p` with spin `beta`.
pub fn spin_orbital(n_spatial: usize, p: usize, beta: bool) -> usize {
    p + if beta { n_spatial } else { 0 }
}

/// Closed-shell (or high-spin-α for odd counts) Aufbau filling.
pub fn hf_state(n_electrons: usize, n_spatial: usize) -> Result<OccupationState> {
    if n_electrons > 2 * n_spatial || n_spatial > 32 {
        return Err(Error::invalid(format!(
            "{n_electrons} electrons do not fit {n_spatial} spatial orbitals"
        )));
    }
    let n_alpha = n_electrons.div_ceil(2);
    let n_beta = n_electrons / 2;
    let mut bits = 0u64;
    for p in 0..n_alpha {
        bits |= 1 << spin_orbital(n_spatial, p, false);
    }
    for p in 0..n_beta {
        bits |= 1 << spin_orbital(n_spatial, p, true);
    }
    Ok(OccupationState { bits, n_spatial })
}

/// Complex-coefficient Pauli polynomial used while expanding ladder operators.
#[derive(Debug, Clone, Default)]
pub(crate) struct LadderPolynomial {
    terms: HashMap<(u64, u64), Complex64>,
}

impl LadderPolynomial {
    fn from_pairs(pairs: &[(Complex64, u64, u64)]) -> Self {
        let mut p = Self::default();
        for &(c, x, z) in pairs {
            *p.terms.entry((x, z)).or_default() += c;
        }
        p
    }

    /// `a_p` (`create = false`) or `a†_p` under Jordan-Wigner.
    pub(crate) fn ladder(p: usize, create: bool) -> Self {
        let x = 1u64 << p;
        let tail = x - 1;
        let half = Complex64::new(0.5, 0.0);
        let y_coeff = if create {
            Complex64::new(0.0, -0.5)
        } else {
            Complex64::new(0.0, 0.5)
        };
        Self::from_pairs(&[(half, x, tail), (y_coeff, x, tail | x)])
    }

    pub(crate) fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (&a, &ca) in &self.terms {
            for (&b, &cb) in &other.terms {
                let (k, x, z) = multiply_masks(a, b);
                *out.terms.entry((x, z)).or_default() += ca * cb * i_pow(k);
            }
        }
        out
    }

    pub(crate) fn add_scaled(&mut self, other: &Self, scale: Complex64) {
        for (&k, &c) in &other.terms {
            *self.terms.entry(k).or_default() += c * scale;
        }
    }

    /// Product of ladder operators, leftmost first; `(index, create)`.
    pub(crate) fn product(ops: &[(usize, bool)]) -> Self {
        let mut acc = Self::from_pairs(&[(Complex64::new(1.0, 0.0), 0, 0)]);
        for &(p, create) in ops {
            acc = acc.mul(&Self::ladder(p, create));
        }
        acc
    }

    /// Real part as a simplified `PauliSum`. Fails if an imaginary part
    /// survives above `tol` (the polynomial was not Hermitian).
    pub(crate) fn into_real_sum(self, width: usize, tol: f64) -> Result<PauliSum> {
        self.into_sum(width, tol, |c| (c.re, c.im))
    }

    /// `self = i·Σ r_k P_k` for anti-Hermitian input; returns `Σ r_k P_k`.
    pub(crate) fn into_imaginary_sum(self, width: usize, tol: f64) -> Result<PauliSum> {
        self.into_sum(width, tol, |c| (c.im, c.re))
    }

    fn into_sum(
        self,
        width: usize,
        tol: f64,
        split: impl Fn(Complex64) -> (f64, f64),
    ) -> Result<PauliSum> {
        let mut entries: Vec<((u64, u64), Complex64)> = self.terms.into_iter().collect();
        entries.sort_by_key(|e| e.0);
        let mut sum = PauliSum::new(width);
        for ((x, z), c) in entries {
            let (keep, drop) = split(c);
            if drop.abs() > tol {
                return Err(Error::invalid(format!(
                    "unexpected residual component {drop:e} in ladder expansion"
                )));
            }
            sum.push(PauliTerm::from_masks(width, x, z, keep)?)?;
        }
        Ok(sum.simplify())
    }
}

/// Jordan-Wigner qubit Hamiltonian:
/// `E_core + Σ h_pq a†_pσ a_qσ + ½ Σ (pq|rs) a†_pσ a†_rτ a_sτ a_qσ`.
pub fn jordan_wigner(mi: &MolecularIntegrals) -> Result<PauliSum> {
    mi.validate()?;
    let n = mi.n_spatial;
    let width = 2 * n;
    let mut poly = LadderPolynomial::default();
    poly.add_scaled(
        &LadderPolynomial::from_pairs(&[(Complex64::new(1.0, 0.0), 0, 0)]),
        Complex64::new(mi.core_energy, 0.0),
    );
    for spin in [false, true] {
        for p in 0..n {
            for q in 0..n {
                let h = mi.h(p, q);
                if h == 0.0 {
                    continue;
                }
                let term = LadderPolynomial::product(&[
                    (spin_orbital(n, p, spin), true),
                    (spin_orbital(n, q, spin), false),
                ]);
                poly.add_scaled(&term, Complex64::new(h, 0.0));
            }
        }
    }
    for s1 in [false, true] {
        for s2 in [false, true] {
            for p in 0..n {
                for q in 0..n {
                    for r in 0..n {
                        for s in 0..n {
                            let g = mi.g(p, q, r, s);
                            if g == 0.0 {
                                continue;
                            }
                            let (ip, iq) = (spin_orbital(n, p, s1), spin_orbital(n, q, s1));
                            let (ir, is) = (spin_orbital(n, r, s2), spin_orbital(n, s, s2));
                            if ip == ir || iq == is {
                                continue;
                            }
                            let term = LadderPolynomial::product(&[
                                (ip, true),
                                (ir, true),
                                (is, false),
                                (iq, false),
                            ]);
                            poly.add_scaled(&term, Complex64::new(0.5 * g, 0.0));
                        }
                    }
                }
            }
        }
    }
    poly.into_real_sum(width, 1e-10)
}

/// `Σ_p (I − Z_p)/2`.
pub fn jw_number_operator(n_qubits: usize) -> Result<PauliSum> {
    if n_qubits == 0 {
        return Err(Error::invalid("number operator needs at least one qubit"));
    }
    let mut sum = PauliSum::new(n_qubits);
    for p in 0..n_qubits {
        sum.push(PauliTerm::identity(n_qubits, 0.5)?)?;
        sum.push(PauliTerm::from_masks(n_qubits, 0, 1 << p, -0.5)?)?;
    }
    Ok(sum.simplify())
}
