//! Dense statevector simulation with in-place gate kernels.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand_distr::{Binomial, Distribution};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::fermion::{format_bits, OccupationState};
use crate::limits::DenseLimits;
use crate::pauli::{i_pow, Pauli, PauliSum};
use crate::rng::{derive_seed, rng_from_seed, Rng};
use crate::shots::ShotPlan;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Normalized amplitudes over `2^width` basis states, qubit 0 least
/// significant.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    width: usize,
    amps: Vec<Complex64>,
}

fn check_width(width: usize) -> Result<()> {
    let limit = DenseLimits::from_env().simulation_qubits;
    if width > limit {
        return Err(Error::OverDenseLimit {
            what: "statevector",
            width,
            limit,
        });
    }
    Ok(())
}

impl Statevector {
    /// `|0…0⟩`.
    pub fn zero(width: usize) -> Result<Self> {
        Self::basis(width, 0)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(width: usize, index: u64) -> Result<Self> {
        check_width(width)?;
        let dim = 1usize << width;
        if index as usize >= dim {
            return Err(Error::invalid(format!("basis index {index} outside {width} qubits")));
        }
        let mut amps = vec![ZERO; dim];
        amps[index as usize] = ONE;
        Ok(Self { width, amps })
    }

    /// Takes ownership of `amps`, which must have length `2^width` and unit norm
    /// within 1e-8.
    pub fn from_amplitudes(width: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_width(width)?;
        if amps.len() != 1usize << width {
            return Err(Error::invalid(format!(
                "{} amplitudes do not describe {width} qubits",
                amps.len()
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite("amplitude".into()));
        }
        let s = Self { width, amps };
        if (s.norm() - 1.0).abs() > 1e-8 {
            return Err(Error::invalid(format!("state norm {} is not 1", s.norm())));
        }
        Ok(s)
    }

    pub(crate) fn from_raw(width: usize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1usize << width);
        Self { width, amps }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Statevector) -> Result<Complex64> {
        self.same_width(other.width)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn same_width(&self, width: usize) -> Result<()> {
        if width != self.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                found: width,
            });
        }
        Ok(())
    }

    /// Applies `c` in place.
    pub fn apply(&mut self, c: &Circuit) -> Result<()> {
        self.same_width(c.width())?;
        apply_gates_raw(&mut self.amps, c.gates(), c.global_phase());
        Ok(())
    }

    pub fn apply_gate(&mut self, g: Gate) -> Result<()> {
        let (a, b) = g.qubits();
        if a >= self.width || b.is_some_and(|b| b >= self.width) {
            return Err(Error::invalid(format!("{g} outside {} qubits", self.width)));
        }
        apply_gate_raw(&mut self.amps, g);
        Ok(())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Born distribution over `qubits`; outcome bit `i` is the value of
    /// `qubits[i]`.
    pub fn marginal(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        if qubits.is_empty() {
            return Err(Error::invalid("marginal over an empty qubit list"));
        }
        if qubits.len() > 30 {
            return Err(Error::invalid("marginal over more than 30 qubits"));
        }
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.width || qubits[..i].contains(&q) {
                return Err(Error::invalid(format!("bad or repeated qubit {q}")));
            }
        }
        let mut out = vec![0.0; 1 << qubits.len()];
        for (b, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let mut k = 0usize;
            for (i, &q) in qubits.iter().enumerate() {
                k |= ((b >> q) & 1) << i;
            }
            out[k] += p;
        }
        Ok(out)
    }

    /// `shots` i.i.d. measurements of `qubits`. Keys are bitstrings with
    /// `qubits[last]` first and `qubits[0]` last.
    pub fn sample(&self, qubits: &[usize], shots: u64, seed: u64) -> Result<BTreeMap<String, u64>> {
        if shots == 0 {
            return Err(Error::invalid("shots must be at least 1"));
        }
        let probs = self.marginal(qubits)?;
        let counts = multinomial(&mut rng_from_seed(seed), shots, &probs);
        Ok(counts
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .map(|(k, c)| (format_bits(k as u64, qubits.len()), c))
            .collect())
    }

    /// `Σ c_i ⟨ψ|P_i|ψ⟩` without materializing any matrix.
    pub fn expectation(&self, h: &PauliSum) -> Result<f64> {
        CompiledObservable::new(h).expectation(self)
    }
}

/// Computational basis state for an occupation pattern.
pub fn init_state(occ: &OccupationState, width: usize) -> Result<Statevector> {
    if occ.n_qubits() != width {
        return Err(Error::WidthMismatch {
            expected: width,
            found: occ.n_qubits(),
        });
    }
    Statevector::basis(width, occ.bits)
}

/// `c` applied to a copy of `s`.
pub fn apply(c: &Circuit, s: &Statevector) -> Result<Statevector> {
    let mut out = s.clone();
    out.apply(c)?;
    Ok(out)
}

pub(crate) fn apply_gates_raw(amps: &mut [Complex64], gates: &[Gate], global_phase: f64) {
    for &g in gates {
        apply_gate_raw(amps, g);
    }
    if global_phase != 0.0 {
        let f = Complex64::from_polar(1.0, global_phase);
        for a in amps.iter_mut() {
            *a *= f;
        }
    }
}

#[inline]
fn for_pairs(amps: &mut [Complex64], q: usize, mut f: impl FnMut(&mut Complex64, &mut Complex64, usize)) {
    let stride = 1usize << q;
    let dim = amps.len();
    let mut base = 0;
    while base < dim {
        let (lo, hi) = amps[base..base + 2 * stride].split_at_mut(stride);
        for (i, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
            f(a, b, base + i);
        }
        base += 2 * stride;
    }
}

#[inline]
fn scale_where(amps: &mut [Complex64], mask: u64, factor: Complex64) {
    for (i, a) in amps.iter_mut().enumerate() {
        if i as u64 & mask == mask {
            *a *= factor;
        }
    }
}

pub(crate) fn apply_gate_raw(amps: &mut [Complex64], g: Gate) {
    match g {
        Gate::H(q) => for_pairs(amps, q, |a, b, _| {
            let (x, y) = (*a, *b);
            *a = (x + y) * FRAC_1_SQRT_2;
            *b = (x - y) * FRAC_1_SQRT_2;
        }),
        Gate::X(q) => for_pairs(amps, q, |a, b, _| std::mem::swap(a, b)),
        Gate::S(q) => scale_where(amps, 1 << q, Complex64::new(0.0, 1.0)),
        Gate::Sdg(q) => scale_where(amps, 1 << q, Complex64::new(0.0, -1.0)),
        Gate::Rz { qubit, angle } => {
            let lo = Complex64::from_polar(1.0, -angle / 2.0);
            let hi = Complex64::from_polar(1.0, angle / 2.0);
            for_pairs(amps, qubit, |a, b, _| {
                *a *= lo;
                *b *= hi;
            });
        }
        Gate::Phase { qubit, angle } => scale_where(amps, 1 << qubit, Complex64::from_polar(1.0, angle)),
        Gate::Cnot { control, target } => {
            let c = 1usize << control;
            for_pairs(amps, target, |a, b, i| {
                if i & c != 0 {
                    std::mem::swap(a, b);
                }
            });
        }
        Gate::Crz { control, target, angle } => {
            let c = 1usize << control;
            let lo = Complex64::from_polar(1.0, -angle / 2.0);
            let hi = Complex64::from_polar(1.0, angle / 2.0);
            for_pairs(amps, target, |a, b, i| {
                if i & c != 0 {
                    *a *= lo;
                    *b *= hi;
                }
            });
        }
        Gate::CPhase { control, target, angle } => scale_where(
            amps,
            (1 << control) | (1 << target),
            Complex64::from_polar(1.0, angle),
        ),
        Gate::Swap(p, q) => {
            let (pm, qm) = (1usize << p, 1usize << q);
            for i in 0..amps.len() {
                if i & pm != 0 && i & qm == 0 {
                    amps.swap(i, i ^ pm ^ qm);
                }
            }
        }
    }
}

/// A Pauli sum regrouped by X-mask for repeated expectation values.
#[derive(Debug, Clone)]
pub struct CompiledObservable {
    width: usize,
    constant: f64,
    groups: Vec<(u64, Vec<(u64, Complex64)>)>,
}

impl CompiledObservable {
    pub fn new(h: &PauliSum) -> Self {
        let mut by_x: BTreeMap<u64, Vec<(u64, Complex64)>> = BTreeMap::new();
        let mut constant = 0.0;
        for t in h.terms() {
            if t.is_identity() {
                constant += t.coefficient;
                continue;
            }
            let (x, z) = (t.x_mask(), t.z_mask());
            by_x.entry(x)
                .or_default()
                .push((z, i_pow((x & z).count_ones()) * t.coefficient));
        }
        Self {
            width: h.width(),
            constant,
            groups: by_x.into_iter().collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn expectation(&self, s: &Statevector) -> Result<f64> {
        s.same_width(self.width)?;
        Ok(self.expectation_raw(&s.amps))
    }

    pub(crate) fn expectation_raw(&self, amps: &[Complex64]) -> f64 {
        let mut total = Complex64::new(self.constant, 0.0);
        for (x, zs) in &self.groups {
            let mut acc = ZERO;
            for (b, &psi) in amps.iter().enumerate() {
                if psi == ZERO {
                    continue;
                }
                let mut f = ZERO;
                for &(z, c) in zs {
                    if (b as u64 & z).count_ones() % 2 == 0 {
                        f += c;
                    } else {
                        f -= c;
                    }
                }
                acc += amps[b ^ *x as usize].conj() * f * psi;
            }
            total += acc;
        }
        total.re
    }
}

/// Counts of `n` draws over `probs` via conditional binomials.
pub(crate) fn multinomial(rng: &mut Rng, n: u64, probs: &[f64]) -> Vec<u64> {
    let mut counts = vec![0u64; probs.len()];
    let mut left = n;
    let mut mass: f64 = probs.iter().sum();
    for (k, &p) in probs.iter().enumerate() {
        if left == 0 {
            break;
        }
        if k + 1 == probs.len() || mass <= 0.0 {
            counts[k] = left;
            break;
        }
        let q = (p / mass).clamp(0.0, 1.0);
        let c = if q >= 1.0 {
            left
        } else if q <= 0.0 {
            0
        } else {
            Binomial::new(left, q).expect("valid binomial").sample(rng)
        };
        counts[k] = c;
        left -= c;
        mass -= p;
    }
    counts
}

/// Shot-based energy estimate following `plan`: each qubitwise group is
/// measured in its shared basis with its own shot count. Returns the
/// estimate and its standard error (per-group sample variances combined
/// as independent contributions).
pub fn expectation_sampled(s: &Statevector, h: &PauliSum, plan: &ShotPlan, seed: u64) -> Result<(f64, f64)> {
    s.same_width(h.width())?;
    let (constant, measured) = h.split_identity();
    plan.check_against(&measured)?;
    if plan.partition.mode != crate::pauli::CommuteMode::Qubitwise {
        return Err(Error::invalid("sampled estimation supports qubitwise groups only"));
    }
    let terms = measured.terms();
    let mut estimate = constant;
    let mut variance = 0.0;
    for (j, group) in plan.partition.groups.iter().enumerate() {
        let shots = plan.per_group_shots[j];
        if group.is_empty() || shots == 0 {
            continue;
        }
        let support: u64 = group.iter().fold(0, |m, &i| m | terms[i].support());
        let qubits: Vec<usize> = (0..s.width).filter(|&q| (support >> q) & 1 == 1).collect();
        let mut rotated = s.clone();
        for &q in &qubits {
            let axis = group
                .iter()
                .map(|&i| terms[i].axis(q))
                .find(|&a| a != Pauli::I)
                .unwrap_or(Pauli::Z);
            match axis {
                Pauli::X => apply_gate_raw(&mut rotated.amps, Gate::H(q)),
                Pauli::Y => {
                    apply_gate_raw(&mut rotated.amps, Gate::Sdg(q));
                    apply_gate_raw(&mut rotated.amps, Gate::H(q));
                }
                _ => {}
            }
        }
        let probs = rotated.marginal(&qubits)?;
        let local: Vec<(u64, f64)> = group
            .iter()
            .map(|&i| {
                let sup = terms[i].support();
                let mut m = 0u64;
                for (k, &q) in qubits.iter().enumerate() {
                    m |= ((sup >> q) & 1) << k;
                }
                (m, terms[i].coefficient)
            })
            .collect();
        let value = |o: u64| -> f64 {
            local
                .iter()
                .map(|&(m, c)| if (o & m).count_ones() % 2 == 0 { c } else { -c })
                .sum()
        };
        let counts = multinomial(&mut rng_from_seed(derive_seed(seed, j as u64)), shots, &probs);
        let n = shots as f64;
        let mean: f64 = counts
            .iter()
            .enumerate()
            .map(|(o, &c)| c as f64 * value(o as u64))
            .sum::<f64>()
            / n;
        estimate += mean;
        if shots > 1 {
            let ss: f64 = counts
                .iter()
                .enumerate()
                .filter(|&(_, &c)| c > 0)
                .map(|(o, &c)| c as f64 * (value(o as u64) - mean).powi(2))
                .sum();
            variance += ss / (n - 1.0) / n;
        }
    }
    Ok((estimate, variance.sqrt()))
}
