//! Lowering to Clifford+Rz and gate/depth/T accounting.

use std::f64::consts::FRAC_PI_4;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Circuit, Gate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    CliffordRz,
    CliffordT,
}

impl FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "clifford_rz" | "rz" => Ok(Basis::CliffordRz),
            "clifford_t" | "t" => Ok(Basis::CliffordT),
            other => Err(Error::invalid(format!("unknown basis {other:?}"))),
        }
    }
}

/// `t = ⌈slope·log2(1/δ) + offset⌉` per arbitrary-angle rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TCountModel {
    pub slope: f64,
    pub offset: f64,
}

impl Default for TCountModel {
    fn default() -> Self {
        Self {
            slope: 3.0,
            offset: 0.0,
        }
    }
}

impl TCountModel {
    /// T gates charged for `RZ(angle)` at synthesis precision `precision`.
    pub fn rz_cost(&self, angle: f64, precision: f64) -> u64 {
        let k = angle / FRAC_PI_4;
        let r = k.round();
        if (k - r).abs() < 1e-9 {
            return (r as i64).rem_euclid(2) as u64;
        }
        (self.slope * (1.0 / precision).log2() + self.offset).ceil().max(0.0) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitMetrics {
    pub basis: Basis,
    pub width: usize,
    pub gate_count: u64,
    pub depth: u64,
    pub two_qubit_count: u64,
    pub rz_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rz_precision: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter_count: Option<usize>,
}

impl CircuitMetrics {
    pub fn with_parameters(mut self, n: usize) -> Self {
        self.parameter_count = Some(n);
        self
    }
}

/// Rewrites one gate into `{H, X, S, SDG, CNOT, RZ}`; returns the global
/// phase the rewrite introduces.
fn lower(gate: Gate, mut emit: impl FnMut(Gate)) -> f64 {
    match gate {
        Gate::Crz { control, target, angle } => {
            emit(Gate::Rz { qubit: target, angle: angle / 2.0 });
            emit(Gate::Cnot { control, target });
            emit(Gate::Rz { qubit: target, angle: -angle / 2.0 });
            emit(Gate::Cnot { control, target });
            0.0
        }
        Gate::Phase { qubit, angle } => {
            emit(Gate::Rz { qubit, angle });
            angle / 2.0
        }
        Gate::CPhase { control, target, angle } => {
            emit(Gate::Rz { qubit: control, angle: angle / 2.0 });
            emit(Gate::Rz { qubit: target, angle: angle / 2.0 });
            emit(Gate::Cnot { control, target });
            emit(Gate::Rz { qubit: target, angle: -angle / 2.0 });
            emit(Gate::Cnot { control, target });
            angle / 4.0
        }
        Gate::Swap(a, b) => {
            emit(Gate::Cnot { control: a, target: b });
            emit(Gate::Cnot { control: b, target: a });
            emit(Gate::Cnot { control: a, target: b });
            0.0
        }
        g => {
            emit(g);
            0.0
        }
    }
}

/// Equivalent circuit over `{H, X, S, SDG, CNOT, RZ}` with the global phase
/// carried along.
pub fn compile_clifford_rz(c: &Circuit) -> Circuit {
    let mut out = Circuit::new(c.width());
    out.add_global_phase(c.global_phase());
    for &g in c.gates() {
        let phase = lower(g, |l| out.push_unchecked(l));
        out.add_global_phase(phase);
    }
    out
}

/// Streaming metrics over a gate sequence, so very long circuits never need
/// to be materialized.
#[derive(Debug, Clone)]
pub struct MetricsAccumulator {
    basis: Basis,
    precision: Option<f64>,
    model: TCountModel,
    levels: Vec<u64>,
    gate_count: u64,
    two_qubit: u64,
    rz: u64,
    t: u64,
}

impl MetricsAccumulator {
    pub fn new(width: usize, basis: Basis, rz_precision: f64, model: TCountModel) -> Result<Self> {
        let precision = match basis {
            Basis::CliffordRz => None,
            Basis::CliffordT => {
                if !(rz_precision > 0.0 && rz_precision < 1.0) {
                    return Err(Error::invalid(format!(
                        "rz_precision must lie in (0, 1), got {rz_precision}"
                    )));
                }
                Some(rz_precision)
            }
        };
        Ok(Self {
            basis,
            precision,
            model,
            levels: vec![0; width],
            gate_count: 0,
            two_qubit: 0,
            rz: 0,
            t: 0,
        })
    }

    pub fn push(&mut self, gate: Gate) {
        lower(gate, |g| self.record(g));
    }

    pub fn extend<'a>(&mut self, gates: impl IntoIterator<Item = &'a Gate>) {
        for &g in gates {
            self.push(g);
        }
    }

    fn record(&mut self, g: Gate) {
        self.gate_count += 1;
        let (a, b) = g.qubits();
        match b {
            Some(b) => {
                self.two_qubit += 1;
                let layer = self.levels[a].max(self.levels[b]) + 1;
                self.levels[a] = layer;
                self.levels[b] = layer;
            }
            None => self.levels[a] += 1,
        }
        if let Gate::Rz { angle, .. } = g {
            self.rz += 1;
            if let Some(p) = self.precision {
                self.t += self.model.rz_cost(angle, p);
            }
        }
    }

    pub fn finish(&self) -> CircuitMetrics {
        CircuitMetrics {
            basis: self.basis,
            width: self.levels.len(),
            gate_count: self.gate_count,
            depth: self.levels.iter().copied().max().unwrap_or(0),
            two_qubit_count: self.two_qubit,
            rz_count: self.rz,
            t_count: self.precision.map(|_| self.t),
            rz_precision: self.precision,
            parameter_count: None,
        }
    }
}

/// Gate counts and ASAP depth after lowering; `clifford_t` additionally
/// charges every `RZ` through the default [`TCountModel`].
pub fn compile_metrics(c: &Circuit, basis: Basis, rz_precision: f64) -> Result<CircuitMetrics> {
    let mut acc = MetricsAccumulator::new(c.width(), basis, rz_precision, TCountModel::default())?;
    acc.extend(c.gates());
    Ok(acc.finish())
}
