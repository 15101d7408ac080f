//! Surface-code cost model.
//!
//! Logical error per operation is `A·(p/p_th)^((d+1)/2)`. The total error
//! budget is spread evenly over `depth·L + t_count` logical operations for
//! `L` logical qubits. Each logical qubit takes `2d²` physical qubits, one
//! logical cycle lasts `d·(t_gate + t_meas)`, and each T factory is a
//! single-level 15-to-1 distillation block of 16 patches that emits one T
//! state every 11 logical cycles.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::CircuitMetrics;
use crate::error::{Error, Result};

/// Relative slack when comparing a logical error rate to its budget.
const BUDGET_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub gate_time_ns: f64,
    pub measure_time_ns: f64,
    pub p_phys: f64,
    pub p_threshold: f64,
    /// Logical-error prefactor `A`.
    pub prefactor: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            gate_time_ns: 50.0,
            measure_time_ns: 100.0,
            p_phys: 1e-4,
            p_threshold: 1e-2,
            prefactor: 0.1,
        }
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gate_time_ns > 0.0 && self.measure_time_ns > 0.0) {
            return Err(Error::invalid("operation times must be positive"));
        }
        if !(self.prefactor > 0.0 && self.prefactor.is_finite()) {
            return Err(Error::invalid("prefactor must be positive"));
        }
        if !(self.p_phys > 0.0 && self.p_phys < self.p_threshold) {
            return Err(Error::invalid(format!(
                "physical error rate {} must lie in (0, {})",
                self.p_phys, self.p_threshold
            )));
        }
        Ok(())
    }
}

/// Every constant of the model in one record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResourceModel {
    pub physical: PhysicalParams,
    pub target_total_error: f64,
    /// Physical qubits per logical patch are `patch_factor·d²`.
    pub patch_factor: u64,
    pub factory_patches: u64,
    pub factory_cycles_per_t: u64,
}

impl Default for ResourceModel {
    fn default() -> Self {
        Self {
            physical: PhysicalParams::default(),
            target_total_error: 1e-3,
            patch_factor: 2,
            factory_patches: 16,
            factory_cycles_per_t: 11,
        }
    }
}

impl ResourceModel {
    pub fn with_p_phys(mut self, p: f64) -> Self {
        self.physical.p_phys = p;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.physical.validate()?;
        if !(self.target_total_error > 0.0 && self.target_total_error < 1.0) {
            return Err(Error::invalid("target total error must lie in (0, 1)"));
        }
        if self.patch_factor == 0 || self.factory_patches == 0 || self.factory_cycles_per_t == 0 {
            return Err(Error::invalid("patch and factory constants must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceEstimate {
    pub code_distance: u32,
    pub logical_qubits: usize,
    pub factories: u64,
    pub logical_ops: f64,
    pub budget_per_op: f64,
    pub logical_cycle_ns: f64,
    pub algorithmic_qubits: u64,
    pub t_factory_qubits: u64,
    pub total_physical_qubits: u64,
    pub circuit_limited_seconds: f64,
    pub t_limited_seconds: f64,
    pub runtime_seconds: f64,
}

/// Seconds for one shot: `depth·t_gate + t_meas`.
pub fn naive_runtime(metrics: &CircuitMetrics, params: &PhysicalParams) -> f64 {
    (metrics.depth as f64 * params.gate_time_ns + params.measure_time_ns) * 1e-9
}

/// Smallest odd `d ≥ 3` with `A·(p/p_th)^((d+1)/2) ≤ budget`.
pub fn code_distance(p_phys: f64, budget: f64, prefactor: f64, p_threshold: f64) -> Result<u32> {
    if !(p_phys > 0.0 && p_phys < p_threshold) {
        return Err(Error::invalid(format!(
            "physical error rate {p_phys} is not below the threshold {p_threshold}"
        )));
    }
    if !(budget > 0.0 && budget < 1.0) {
        return Err(Error::invalid(format!("logical budget {budget} must lie in (0, 1)")));
    }
    if !(prefactor > 0.0 && prefactor.is_finite()) {
        return Err(Error::invalid("prefactor must be positive"));
    }
    let ratio = p_phys / p_threshold;
    let ok = |k: u32| prefactor * ratio.powi(k as i32) <= budget * (1.0 + BUDGET_SLACK);
    let guess = ((budget / prefactor).ln() / ratio.ln()).ceil().max(2.0);
    if guess > 1e6 {
        return Err(Error::invalid("code distance beyond any realistic patch"));
    }
    let mut k = guess as u32;
    while k > 2 && ok(k - 1) {
        k -= 1;
    }
    while !ok(k) {
        k += 1;
    }
    Ok(2 * k - 1)
}

/// Physical footprint and runtime of a circuit with `metrics` on
/// `logical_qubits` logical qubits and `factories` T factories.
pub fn estimate(
    metrics: &CircuitMetrics,
    logical_qubits: usize,
    model: &ResourceModel,
    factories: u64,
) -> Result<ResourceEstimate> {
    model.validate()?;
    if factories < 1 {
        return Err(Error::invalid("at least one T factory is required"));
    }
    if logical_qubits == 0 {
        return Err(Error::invalid("at least one logical qubit is required"));
    }
    let t_count = metrics
        .t_count
        .ok_or_else(|| Error::invalid("resource estimates need Clifford+T metrics with a T count"))?;
    let p = &model.physical;
    let logical_ops = (metrics.depth as f64 * logical_qubits as f64 + t_count as f64).max(1.0);
    let budget_per_op = model.target_total_error / logical_ops;
    let d = code_distance(p.p_phys, budget_per_op, p.prefactor, p.p_threshold)?;
    let patch = model.patch_factor * (d as u64) * (d as u64);
    let cycle_ns = d as f64 * (p.gate_time_ns + p.measure_time_ns);
    let algorithmic_qubits = logical_qubits as u64 * patch;
    let t_factory_qubits = if t_count > 0 {
        factories * model.factory_patches * patch
    } else {
        0
    };
    let circuit_limited_seconds = metrics.depth as f64 * cycle_ns * 1e-9;
    let t_limited_seconds =
        t_count as f64 * model.factory_cycles_per_t as f64 * cycle_ns * 1e-9 / factories as f64;
    Ok(ResourceEstimate {
        code_distance: d,
        logical_qubits,
        factories,
        logical_ops,
        budget_per_op,
        logical_cycle_ns: cycle_ns,
        algorithmic_qubits,
        t_factory_qubits,
        total_physical_qubits: algorithmic_qubits + t_factory_qubits,
        circuit_limited_seconds,
        t_limited_seconds,
        runtime_seconds: circuit_limited_seconds.max(t_limited_seconds),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRatePoint {
    pub p_phys: f64,
    pub estimate: ResourceEstimate,
}

/// One estimate per physical error rate, in the given order.
pub fn error_rate_sweep(
    metrics: &CircuitMetrics,
    logical_qubits: usize,
    model: &ResourceModel,
    factories: u64,
    p_list: &[f64],
) -> Result<Vec<ErrorRatePoint>> {
    p_list
        .par_iter()
        .map(|&p| {
            Ok(ErrorRatePoint {
                p_phys: p,
                estimate: estimate(metrics, logical_qubits, &model.with_p_phys(p), factories)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub factories: u64,
    pub total_physical_qubits: u64,
    pub runtime_seconds: f64,
}

/// Qubits against runtime, one point per factory count.
pub fn spacetime_frontier(
    metrics: &CircuitMetrics,
    logical_qubits: usize,
    model: &ResourceModel,
    factory_range: &[u64],
) -> Result<Vec<FrontierPoint>> {
    if factory_range.is_empty() {
        return Err(Error::invalid("empty factory range"));
    }
    factory_range
        .iter()
        .map(|&f| {
            let e = estimate(metrics, logical_qubits, model, f)?;
            Ok(FrontierPoint {
                factories: f,
                total_physical_qubits: e.total_physical_qubits,
                runtime_seconds: e.runtime_seconds,
            })
        })
        .collect()
}
