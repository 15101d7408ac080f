//! UCCSD-VQE: exact and sampled energy paths, prefix studies, Clifford
//! warm starts and coefficient statistics.
//!
//! Every excitation `exp(θ(T − T†))` acts as a plane rotation on pairs
//! `(|u⟩, T|u⟩)` of occupation states and never leaves the `(N_α, N_β)`
//! sector of the reference. Exact energies are therefore evaluated on the
//! real sector vector, which matches the gate-level UCCSD circuit.

mod optimize;

pub use optimize::{central_difference, minimize, nelder_mead, Minimum};

use std::cell::Cell;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::UccsdAnsatz;
use crate::error::{Error, Result};
use crate::limits::DenseLimits;
use crate::pauli::{CommuteMode, PauliSum};
use crate::rng::{derive_seed, rng_from_seed};
use crate::shots::{measurement_partition, min_shots_grouped, ShotPlan};
use crate::spectrum::{real_sector_rows, sector_basis};
use crate::statevector::{expectation_sampled, Statevector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyMode {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    SqpLike,
    NelderMead,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeConfig {
    pub max_iterations: usize,
    /// Hartree.
    pub tolerance: f64,
    pub mode: EnergyMode,
    /// Hartree; standard-deviation target of each sampled estimate.
    pub shots_epsilon: f64,
    pub seed: u64,
    pub optimizer: Optimizer,
    /// Standard deviation of a seeded Gaussian offset added to the start
    /// point; zero starts exactly at the given (or HF) parameters.
    pub init_jitter: f64,
    pub initial: Option<Vec<f64>>,
}

impl Default for VqeConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            tolerance: 1e-5,
            mode: EnergyMode::Exact,
            shots_epsilon: crate::CHEMICAL_ACCURACY,
            seed: 0,
            optimizer: Optimizer::SqpLike,
            init_jitter: 0.0,
            initial: None,
        }
    }
}

impl VqeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be at least 1"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if !(self.shots_epsilon > 0.0 && self.shots_epsilon.is_finite()) {
            return Err(Error::invalid("shots_epsilon must be positive"));
        }
        if !(self.init_jitter >= 0.0 && self.init_jitter.is_finite()) {
            return Err(Error::invalid("init_jitter must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeResult {
    pub final_energy: f64,
    pub parameters: Vec<f64>,
    pub energy_trace: Vec<f64>,
    pub evaluations: u64,
    pub converged: bool,
    pub iterations: usize,
}

/// UCCSD energies restricted to the reference's particle sector.
#[derive(Debug, Clone)]
pub struct AnsatzEvaluator {
    ansatz: UccsdAnsatz,
    basis: Vec<u64>,
    reference: usize,
    rows: Vec<Vec<(u32, f64)>>,
    /// Per excitation, `(u, v, sign)` with `T|basis[u]⟩ = sign·|basis[v]⟩`.
    pairs: Vec<Vec<(u32, u32, f64)>>,
}

impl AnsatzEvaluator {
    pub fn new(h: &PauliSum, ansatz: &UccsdAnsatz) -> Result<Self> {
        if h.width() != ansatz.width() {
            return Err(Error::WidthMismatch {
                expected: h.width(),
                found: ansatz.width(),
            });
        }
        let limit = DenseLimits::from_env().simulation_qubits;
        if h.width() > limit {
            return Err(Error::OverDenseLimit {
                what: "VQE",
                width: h.width(),
                limit,
            });
        }
        let basis = sector_basis(&ansatz.reference);
        let position = |b: u64| basis.binary_search(&b).expect("sector-preserving excitation") as u32;
        let reference = position(ansatz.reference.bits) as usize;
        let pairs = ansatz
            .excitations
            .iter()
            .map(|e| {
                basis
                    .iter()
                    .enumerate()
                    .filter_map(|(u, &b)| e.apply(b).map(|(v, s)| (u as u32, position(v), s)))
                    .collect()
            })
            .collect();
        let rows = real_sector_rows(h, &basis);
        Ok(Self {
            ansatz: ansatz.clone(),
            basis,
            reference,
            rows,
            pairs,
        })
    }

    pub fn ansatz(&self) -> &UccsdAnsatz {
        &self.ansatz
    }

    pub fn sector_dimension(&self) -> usize {
        self.basis.len()
    }

    /// Real sector amplitudes after applying `angles` in order.
    fn evolve(&self, angles: &[(usize, f64)]) -> Vec<f64> {
        let mut psi = vec![0.0; self.basis.len()];
        psi[self.reference] = 1.0;
        for &(e, theta) in angles {
            let (s, c) = theta.sin_cos();
            for &(u, v, sign) in &self.pairs[e] {
                let (a, b) = (psi[u as usize], psi[v as usize]);
                psi[u as usize] = c * a - sign * s * b;
                psi[v as usize] = sign * s * a + c * b;
            }
        }
        psi
    }

    fn expectation(&self, psi: &[f64]) -> f64 {
        self.rows
            .iter()
            .zip(psi)
            .map(|(row, &p)| p * row.iter().map(|&(j, v)| v * psi[j as usize]).sum::<f64>())
            .sum()
    }

    fn energy_of(&self, angles: &[(usize, f64)]) -> f64 {
        self.expectation(&self.evolve(angles))
    }

    pub fn energy(&self, params: &[f64]) -> Result<f64> {
        Ok(self.energy_of(&self.ansatz.expand(params)?))
    }

    /// Exact gradient by the four-term shift rule per excitation angle.
    pub fn gradient(&self, params: &[f64]) -> Result<Vec<f64>> {
        shift_gradient(&self.ansatz, params, &mut |a| self.energy_of(a))
    }

    /// The ansatz state on the full register.
    pub fn statevector(&self, params: &[f64]) -> Result<Statevector> {
        let psi = self.evolve(&self.ansatz.expand(params)?);
        Ok(self.embed(&psi))
    }

    fn embed(&self, psi: &[f64]) -> Statevector {
        let width = self.ansatz.width();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << width];
        for (&b, &p) in self.basis.iter().zip(psi) {
            amps[b as usize] = Complex64::new(p, 0.0);
        }
        Statevector::from_raw(width, amps)
    }
}

/// `dE/dφ = D(π/4) + (1 − √2)/2·D(π/2)` with `D(s) = E(φ+s) − E(φ−s)`,
/// exact for energies with frequencies 1 and 2 in `φ`. Parameter gradients
/// sum the sign-weighted excitation derivatives of each group.
fn shift_gradient(
    ansatz: &UccsdAnsatz,
    params: &[f64],
    energy: &mut dyn FnMut(&[(usize, f64)]) -> f64,
) -> Result<Vec<f64>> {
    let base = ansatz.expand(params)?;
    let c2 = (1.0 - std::f64::consts::SQRT_2) / 2.0;
    let mut shifted = base.clone();
    let mut diff = |pos: usize, s: f64, energy: &mut dyn FnMut(&[(usize, f64)]) -> f64| {
        shifted[pos].1 = base[pos].1 + s;
        let plus = energy(&shifted);
        shifted[pos].1 = base[pos].1 - s;
        let minus = energy(&shifted);
        shifted[pos].1 = base[pos].1;
        plus - minus
    };
    let mut pos = 0;
    let mut grad = Vec::with_capacity(params.len());
    for group in &ansatz.groups {
        let mut g = 0.0;
        for &(_, sign) in group {
            let d = diff(pos, FRAC_PI_4, energy) + c2 * diff(pos, FRAC_PI_2, energy);
            g += sign * d;
            pos += 1;
        }
        grad.push(g);
    }
    Ok(grad)
}

fn start_point(n: usize, cfg: &VqeConfig) -> Result<Vec<f64>> {
    let mut x = match &cfg.initial {
        Some(p) if p.len() != n => {
            return Err(Error::invalid(format!("expected {n} initial parameters, got {}", p.len())));
        }
        Some(p) => p.clone(),
        None => vec![0.0; n],
    };
    if cfg.init_jitter > 0.0 {
        let normal = Normal::new(0.0, cfg.init_jitter).map_err(|e| Error::invalid(e.to_string()))?;
        let mut rng = rng_from_seed(derive_seed(cfg.seed, u64::MAX));
        for v in &mut x {
            *v += normal.sample(&mut rng);
        }
    }
    Ok(x)
}

fn optimize(
    cfg: &VqeConfig,
    x0: &[f64],
    f: &mut dyn FnMut(&[f64]) -> f64,
    grad: &mut dyn FnMut(&[f64]) -> Vec<f64>,
) -> Result<Minimum> {
    match cfg.optimizer {
        Optimizer::SqpLike => minimize(f, Some(grad), x0, cfg.max_iterations, cfg.tolerance),
        Optimizer::NelderMead => nelder_mead(f, x0, cfg.max_iterations, cfg.tolerance, FRAC_PI_8),
    }
}

fn sampled_plan(h: &PauliSum, epsilon: f64) -> Result<ShotPlan> {
    min_shots_grouped(h, &measurement_partition(h, CommuteMode::Qubitwise), epsilon)
}

/// Minimizes the UCCSD energy of `h`.
pub fn run_vqe(h: &PauliSum, ansatz: &UccsdAnsatz, cfg: &VqeConfig) -> Result<VqeResult> {
    cfg.validate()?;
    let eval = AnsatzEvaluator::new(h, ansatz)?;
    let x0 = start_point(ansatz.parameter_count(), cfg)?;
    let calls = Cell::new(0u64);
    let min = match cfg.mode {
        EnergyMode::Exact => {
            let mut f = |x: &[f64]| {
                calls.set(calls.get() + 1);
                eval.energy(x).expect("parameter count checked")
            };
            let mut g = |x: &[f64]| {
                let shifts = 4 * ansatz.expand(x).map_or(0, |a| a.len()) as u64;
                calls.set(calls.get() + shifts);
                eval.gradient(x).expect("parameter count checked")
            };
            optimize(cfg, &x0, &mut f, &mut g)?
        }
        EnergyMode::Sampled => {
            let plan = sampled_plan(h, cfg.shots_epsilon)?;
            let sampled = |x: &[f64]| -> f64 {
                let n = calls.get();
                calls.set(n + 1);
                let state = eval.statevector(x).expect("parameter count checked");
                expectation_sampled(&state, h, &plan, derive_seed(cfg.seed, n))
                    .expect("plan built for this Hamiltonian")
                    .0
            };
            let mut f = sampled;
            let mut g = |x: &[f64]| central_difference(&mut |y| sampled(y), x, FRAC_PI_8);
            optimize(cfg, &x0, &mut f, &mut g)?
        }
    };
    Ok(VqeResult {
        final_energy: min.value,
        parameters: min.x,
        iterations: min.iterations,
        energy_trace: min.trace,
        evaluations: calls.get(),
        converged: min.converged,
    })
}

/// One run per prefix `k = 0..=G` of the parameter groups, each from zero
/// parameters (plus any configured jitter).
pub fn incremental_term_study(h: &PauliSum, ansatz: &UccsdAnsatz, cfg: &VqeConfig) -> Result<Vec<VqeResult>> {
    cfg.validate()?;
    if h.width() != ansatz.width() {
        return Err(Error::WidthMismatch {
            expected: h.width(),
            found: ansatz.width(),
        });
    }
    let cfg = VqeConfig {
        initial: None,
        ..cfg.clone()
    };
    (0..=ansatz.parameter_count())
        .into_par_iter()
        .map(|k| run_vqe(h, &ansatz.prefix(k)?, &cfg))
        .collect()
}

/// Default Clifford angles per parameter.
pub const CLIFFORD_GRID: [f64; 4] = [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2];

/// Largest number of grid points evaluated.
pub const MAX_GRID_POINTS: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarmStart {
    pub best_params: Vec<f64>,
    pub best_energy: f64,
    pub points_evaluated: usize,
    pub exhaustive: bool,
}

/// Best energy over the grid of per-parameter `grid` values. Exhaustive
/// for at most 8 groups, otherwise a seeded sample of [`MAX_GRID_POINTS`]
/// assignments whose first point is the all-zero (or all-`grid[0]`) one.
pub fn clifford_warm_start(h: &PauliSum, ansatz: &UccsdAnsatz, grid: &[f64], seed: u64) -> Result<WarmStart> {
    if grid.is_empty() {
        return Err(Error::invalid("empty warm-start grid"));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("warm-start grid values must be finite"));
    }
    let eval = AnsatzEvaluator::new(h, ansatz)?;
    let g = ansatz.parameter_count();
    let zero = grid.iter().position(|&v| v == 0.0).unwrap_or(0);
    let total = (grid.len() as u128).checked_pow(g as u32);
    let exhaustive = g <= 8 && total.is_some_and(|t| t <= MAX_GRID_POINTS as u128);
    let points: Vec<Vec<usize>> = if exhaustive {
        let total = total.expect("checked above") as usize;
        (0..total)
            .map(|mut i| {
                (0..g)
                    .map(|_| {
                        let d = i % grid.len();
                        i /= grid.len();
                        d
                    })
                    .collect()
            })
            .collect()
    } else {
        let mut rng = rng_from_seed(seed);
        let mut pts = vec![vec![zero; g]];
        while pts.len() < MAX_GRID_POINTS {
            pts.push((0..g).map(|_| rng.random_range(0..grid.len())).collect());
        }
        pts
    };
    let energies: Vec<f64> = points
        .par_iter()
        .map(|p| {
            let params: Vec<f64> = p.iter().map(|&i| grid[i]).collect();
            eval.energy(&params).expect("parameter count matches")
        })
        .collect();
    let mut best = 0;
    for (i, &e) in energies.iter().enumerate() {
        if e < energies[best] {
            best = i;
        }
    }
    Ok(WarmStart {
        best_params: points[best].iter().map(|&i| grid[i]).collect(),
        best_energy: energies[best],
        points_evaluated: points.len(),
        exhaustive,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

/// Histogram of `|c_i|` over non-identity terms with its moment fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientHistogram {
    pub bins: Vec<HistogramBin>,
    pub term_count: usize,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

pub fn coefficient_histogram(h: &PauliSum, bins: usize) -> Result<CoefficientHistogram> {
    if bins == 0 {
        return Err(Error::invalid("at least one bin is needed"));
    }
    let (_, measured) = h.split_identity();
    let mags: Vec<f64> = measured.terms().iter().map(|t| t.coefficient.abs()).collect();
    if mags.is_empty() {
        return Err(Error::invalid("no non-identity terms to histogram"));
    }
    let n = mags.len() as f64;
    let mean = mags.iter().sum::<f64>() / n;
    let std = (mags.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / n).sqrt();
    let lo = mags.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = mags.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let bins = if hi > lo { bins } else { 1 };
    let width = (hi - lo) / bins as f64;
    let mut out: Vec<HistogramBin> = (0..bins)
        .map(|i| HistogramBin {
            lower: lo + i as f64 * width,
            upper: if i + 1 == bins { hi } else { lo + (i + 1) as f64 * width },
            count: 0,
        })
        .collect();
    for m in &mags {
        let i = if width > 0.0 {
            (((m - lo) / width) as usize).min(bins - 1)
        } else {
            0
        };
        out[i].count += 1;
    }
    Ok(CoefficientHistogram {
        bins: out,
        term_count: mags.len(),
        mean,
        std,
    })
}
