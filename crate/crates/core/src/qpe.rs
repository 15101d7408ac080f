//! Quantum phase estimation runs and convergence sweeps.
//!
//! Spectra are mapped into the unit phase interval by `(h − shift)/scale`
//! and evolved as `U = exp(2πi·h_scaled)`, so an eigenvalue `λ` shows up as
//! the phase `φ = (λ − shift)/scale` and is recovered as `φ·scale + shift`.
//!
//! Simulation uses the fact that the controlled powers only ever apply
//! `U^x` to the system register for ancilla value `x`: the Trotter
//! unitary is built once from its gates, the register state
//! `Σ_x |x⟩ ⊗ U^x|ψ⟩` is written directly, and the inverse QFT is then
//! simulated gate by gate.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{qpe_circuit, trotter_circuit, Basis, CircuitMetrics};
use crate::error::{Error, Result};
use crate::fermion::OccupationState;
use crate::limits::DenseLimits;
use crate::pauli::PauliSum;
use crate::rng::rng_from_seed;
use crate::spectrum::sector_ground_state;
use crate::statevector::{apply_gates_raw, multinomial};
use crate::CHEMICAL_ACCURACY;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpeConfig {
    pub ancilla: usize,
    pub trotter_steps: usize,
    /// Hartree.
    pub scale: f64,
    /// Hartree.
    pub shift: f64,
    /// `0` reads the exact ancilla distribution.
    pub shots: u64,
    pub seed: u64,
}

impl QpeConfig {
    pub fn new(ancilla: usize, trotter_steps: usize, scale: f64) -> Self {
        Self {
            ancilla,
            trotter_steps,
            scale,
            shift: 0.0,
            shots: 0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ancilla == 0 {
            return Err(Error::invalid("ancilla must be at least 1"));
        }
        if self.trotter_steps == 0 {
            return Err(Error::invalid("trotter_steps must be at least 1"));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) || !self.shift.is_finite() {
            return Err(Error::invalid(format!(
                "scale must be positive and finite, got {}",
                self.scale
            )));
        }
        Ok(())
    }
}

/// `(h − shift·I)/scale` together with the map back to energies.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledHamiltonian {
    pub h: PauliSum,
    pub scale: f64,
    pub shift: f64,
}

impl ScaledHamiltonian {
    pub fn energy(&self, phase: f64) -> f64 {
        phase * self.scale + self.shift
    }
}

pub fn scale_spectrum(h: &PauliSum, scale: f64, shift: f64) -> Result<ScaledHamiltonian> {
    if !(scale > 0.0 && scale.is_finite()) || !shift.is_finite() {
        return Err(Error::invalid(format!("scale must be positive and finite, got {scale}")));
    }
    Ok(ScaledHamiltonian {
        h: h.affine(scale, shift)?,
        scale,
        shift,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub integer: u64,
    pub phase: f64,
    pub energy: f64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpeResult {
    pub config: QpeConfig,
    /// Sampled counts keyed by ancilla integer; empty in exact mode.
    pub histogram: BTreeMap<u64, u64>,
    /// Most probable readouts of the exact distribution.
    pub top_outcomes: Vec<Outcome>,
    pub most_likely_integer: u64,
    pub most_likely_phase: f64,
    pub estimated_energy: f64,
    pub metrics: CircuitMetrics,
    #[serde(skip)]
    pub distribution: Vec<f64>,
}

/// Number of readouts listed in [`QpeResult::top_outcomes`].
const TOP_OUTCOMES: usize = 8;

/// Exact ancilla distribution of phase estimation on `h_scaled` from
/// `reference`.
pub fn ancilla_distribution(
    h_scaled: &PauliSum,
    reference: &OccupationState,
    ancilla: usize,
    n_steps: usize,
) -> Result<Vec<f64>> {
    let s = h_scaled.width();
    if reference.n_qubits() != s {
        return Err(Error::WidthMismatch {
            expected: s,
            found: reference.n_qubits(),
        });
    }
    let limit = DenseLimits::from_env().simulation_qubits;
    if s + ancilla > limit {
        return Err(Error::OverDenseLimit {
            what: "QPE simulation",
            width: s + ancilla,
            limit,
        });
    }
    let dim = 1usize << s;
    let step = trotter_circuit(h_scaled, 2.0 * std::f64::consts::PI, n_steps)?;
    // Columns of U.
    let columns: Vec<Vec<Complex64>> = (0..dim)
        .into_par_iter()
        .map(|j| {
            let mut col = vec![Complex64::new(0.0, 0.0); dim];
            col[j] = Complex64::new(1.0, 0.0);
            apply_gates_raw(&mut col, step.gates(), step.global_phase());
            col
        })
        .collect();
    let n_reg = 1usize << ancilla;
    let norm = 1.0 / (n_reg as f64).sqrt();
    let mut amps = vec![Complex64::new(0.0, 0.0); dim * n_reg];
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    psi[reference.bits as usize] = Complex64::new(1.0, 0.0);
    let mut next = vec![Complex64::new(0.0, 0.0); dim];
    for x in 0..n_reg {
        for (a, p) in amps[x * dim..(x + 1) * dim].iter_mut().zip(&psi) {
            *a = p * norm;
        }
        if x + 1 == n_reg {
            break;
        }
        next.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (j, col) in columns.iter().enumerate() {
            let pj = psi[j];
            if pj == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (v, u) in next.iter_mut().zip(col) {
                *v += u * pj;
            }
        }
        std::mem::swap(&mut psi, &mut next);
    }
    let qpe = qpe_circuit(h_scaled, ancilla, n_steps, reference)?;
    apply_gates_raw(&mut amps, qpe.readout().gates(), 0.0);
    Ok(amps
        .chunks(dim)
        .map(|block| block.iter().map(|a| a.norm_sqr()).sum())
        .collect())
}

/// Index of the largest entry; ties go to the lowest index.
fn mode<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Phase estimation on `(h − shift)/scale` from `reference`.
pub fn run_qpe(h: &PauliSum, reference: &OccupationState, cfg: &QpeConfig) -> Result<QpeResult> {
    cfg.validate()?;
    let scaled = scale_spectrum(h, cfg.scale, cfg.shift)?;
    let distribution = ancilla_distribution(&scaled.h, reference, cfg.ancilla, cfg.trotter_steps)?;
    let n_reg = distribution.len() as f64;
    let metrics = qpe_circuit(&scaled.h, cfg.ancilla, cfg.trotter_steps, reference)?.metrics(Basis::CliffordRz, 0.0)?;

    let (histogram, most_likely_integer) = if cfg.shots == 0 {
        (BTreeMap::new(), mode(&distribution) as u64)
    } else {
        let counts = multinomial(&mut rng_from_seed(cfg.seed), cfg.shots, &distribution);
        let m = mode(&counts) as u64;
        let hist = counts
            .into_iter()
            .enumerate()
            .filter(|&(_, c)| c > 0)
            .map(|(k, c)| (k as u64, c))
            .collect();
        (hist, m)
    };
    let mut order: Vec<usize> = (0..distribution.len()).collect();
    order.sort_by(|&a, &b| distribution[b].total_cmp(&distribution[a]).then(a.cmp(&b)));
    let top_outcomes = order
        .into_iter()
        .take(TOP_OUTCOMES)
        .map(|k| {
            let phase = k as f64 / n_reg;
            Outcome {
                integer: k as u64,
                phase,
                energy: scaled.energy(phase),
                probability: distribution[k],
            }
        })
        .collect();
    let most_likely_phase = most_likely_integer as f64 / n_reg;
    Ok(QpeResult {
        config: cfg.clone(),
        histogram,
        top_outcomes,
        most_likely_integer,
        most_likely_phase,
        estimated_energy: scaled.energy(most_likely_phase),
        metrics,
        distribution,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub a: usize,
    pub energy: f64,
    pub cnot: u64,
    pub depth: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub in_chem_acc: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    /// Exact ground energy in the reference's sector, when diagonalizable.
    pub oracle_energy: Option<f64>,
    /// Half-width of the acceptance band around the oracle energy.
    pub band: f64,
    pub rows: Vec<SweepRow>,
}

/// One exact-mode (unless `base.shots > 0`) QPE run per `(a, n)` pair,
/// rows ordered by `n` then `a`.
pub fn convergence_sweep(
    h: &PauliSum,
    reference: &OccupationState,
    ancillas: &[usize],
    trotters: &[usize],
    base: &QpeConfig,
) -> Result<SweepTable> {
    if ancillas.is_empty() || trotters.is_empty() {
        return Err(Error::invalid("sweep ranges must be non-empty"));
    }
    let mut pairs: Vec<(usize, usize)> = trotters
        .iter()
        .flat_map(|&n| ancillas.iter().map(move |&a| (n, a)))
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    let oracle_energy = if h.width() <= DenseLimits::default().matrix_qubits {
        Some(sector_ground_state(h, reference)?.0)
    } else {
        None
    };
    let rows = pairs
        .par_iter()
        .map(|&(n, a)| {
            let cfg = QpeConfig {
                ancilla: a,
                trotter_steps: n,
                ..base.clone()
            };
            let r = run_qpe(h, reference, &cfg)?;
            let error = oracle_energy.map(|e| r.estimated_energy - e);
            Ok(SweepRow {
                n,
                a,
                energy: r.estimated_energy,
                cnot: r.metrics.two_qubit_count,
                depth: r.metrics.depth,
                error,
                in_chem_acc: error.map(|e| e.abs() <= CHEMICAL_ACCURACY),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable {
        oracle_energy,
        band: CHEMICAL_ACCURACY,
        rows,
    })
}
