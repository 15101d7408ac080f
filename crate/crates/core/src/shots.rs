//! Minimum-shot bounds for energy estimation.
//!
//! For a single Pauli observable the variance of one shot is at most 1, so
//! `N ≥ 1/ε²` bounds the standard deviation by `ε`. For
//! `E = Σ c_i⟨A_i⟩` over `m` terms measured `n` times each,
//! `n ≥ Σ c_i²/ε²`. With commuting groups `G_1…G_l`, taking
//! `n_j = |G_j|·l·max_{i∈G_j} c_i²/ε²` keeps `Var(E) ≤ ε²`.
//!
//! Identity terms have no variance and are left out of every count; plans
//! index the non-identity terms of a sum in their original order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{group_commuting, CommuteMode, PauliSum, TermPartition};
use crate::rng::derive_seed;
use crate::statevector::{expectation_sampled, Statevector};

/// Relative slack under which a real-valued bound counts as an integer.
const INTEGER_SNAP: f64 = 1e-9;

/// `⌈x⌉`, except that values within floating noise of an integer are taken
/// as that integer (so `1/0.1²` is 100 rather than 101).
fn ceil_snapped(x: f64) -> u64 {
    let r = x.round();
    if (x - r).abs() <= INTEGER_SNAP * r.abs().max(1.0) {
        r as u64
    } else {
        x.ceil() as u64
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotPlan {
    /// Groups over the non-identity terms of the planned sum.
    pub partition: TermPartition,
    pub per_group_shots: Vec<u64>,
    pub total_shots: u64,
    pub epsilon: f64,
}

impl ShotPlan {
    /// Checks that the plan covers exactly the terms of `measured`.
    pub fn check_against(&self, measured: &PauliSum) -> Result<()> {
        if self.per_group_shots.len() != self.partition.groups.len() {
            return Err(Error::invalid("plan has a shot count per group mismatch"));
        }
        self.partition
            .validate(measured)
            .map_err(|e| Error::invalid(format!("plan does not match the Hamiltonian: {e}")))
    }

    /// `Σ_j |G_j|·max c²/n_j`, the worst-case variance the plan allows.
    pub fn variance_bound(&self, h: &PauliSum) -> Result<f64> {
        let (_, measured) = h.split_identity();
        self.check_against(&measured)?;
        Ok(self
            .partition
            .groups
            .iter()
            .zip(&self.per_group_shots)
            .map(|(g, &n)| g.len() as f64 * max_sq(&measured, g) / n as f64)
            .sum())
    }
}

fn max_sq(measured: &PauliSum, group: &[usize]) -> f64 {
    group
        .iter()
        .map(|&i| measured.terms()[i].coefficient.powi(2))
        .fold(0.0, f64::max)
}

/// `⌈1/ε²⌉`.
pub fn min_shots_single(epsilon: f64) -> Result<u64> {
    check_epsilon(epsilon)?;
    Ok(ceil_snapped(1.0 / (epsilon * epsilon)))
}

/// Per-term `n = ⌈Σc²/ε²⌉` and total `N = n·m` for non-identity
/// coefficients. Returns `(N, n)`.
pub fn min_shots_uniform(coefficients: &[f64], epsilon: f64) -> Result<(u64, u64)> {
    check_epsilon(epsilon)?;
    if coefficients.is_empty() {
        return Err(Error::invalid("no coefficients"));
    }
    let sum_sq: f64 = coefficients.iter().map(|c| c * c).sum();
    let n = ceil_snapped(sum_sq / (epsilon * epsilon));
    Ok((n * coefficients.len() as u64, n))
}

/// Non-identity terms of `h` grouped for simultaneous measurement.
pub fn measurement_partition(h: &PauliSum, mode: CommuteMode) -> TermPartition {
    group_commuting(&h.split_identity().1, mode)
}

/// Grouped allocation `n_j = ⌈|G_j|·l·max_{i∈G_j} c_i²/ε²⌉` (at least 1).
pub fn min_shots_grouped(h: &PauliSum, partition: &TermPartition, epsilon: f64) -> Result<ShotPlan> {
    check_epsilon(epsilon)?;
    let (_, measured) = h.split_identity();
    partition.validate(&measured)?;
    let l = partition.groups.len() as f64;
    let per_group_shots: Vec<u64> = partition
        .groups
        .iter()
        .map(|g| ceil_snapped(g.len() as f64 * l * max_sq(&measured, g) / (epsilon * epsilon)).max(1))
        .collect();
    Ok(ShotPlan {
        partition: partition.clone(),
        total_shots: per_group_shots.iter().sum(),
        per_group_shots,
        epsilon,
    })
}

/// Sample standard deviation of `trials` independent sampled estimates.
pub fn validate_plan(state: &Statevector, h: &PauliSum, plan: &ShotPlan, trials: usize, seed: u64) -> Result<f64> {
    if plan.partition.mode != CommuteMode::Qubitwise {
        return Err(Error::invalid("plan validation needs qubitwise groups"));
    }
    if trials < 2 {
        return Err(Error::invalid("at least two trials are needed for a spread"));
    }
    let estimates = (0..trials)
        .into_par_iter()
        .map(|t| expectation_sampled(state, h, plan, derive_seed(seed, t as u64)).map(|r| r.0))
        .collect::<Result<Vec<f64>>>()?;
    let n = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let var = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(var.sqrt())
}

/// Acceptance bound for an empirical spread over `trials` estimates.
pub fn empirical_std_bound(epsilon: f64, trials: usize) -> f64 {
    epsilon * (1.0 + 4.0 / (2.0 * trials as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;
    use crate::pauli::PauliTerm;

    fn sum(width: usize, terms: &[(&str, f64)]) -> PauliSum {
        PauliSum::from_terms(
            width,
            terms.iter().map(|&(l, c)| PauliTerm::from_label(l, c).unwrap()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_observable() {
        assert_eq!(min_shots_single(1.0).unwrap(), 1);
        assert_eq!(min_shots_single(0.1).unwrap(), 100);
        assert_eq!(min_shots_single(1.6e-3).unwrap(), 390_625);
        assert!(min_shots_single(0.0).is_err());
        assert!(min_shots_single(-1.0).is_err());
        for eps in [0.3, 0.05, 1.6e-3, 7e-4] {
            assert_eq!(min_shots_single(eps).unwrap(), min_shots_uniform(&[1.0], eps).unwrap().0);
        }
    }

    #[test]
    fn uniform_examples() {
        assert_eq!(min_shots_uniform(&[1.0], 1.0).unwrap(), (1, 1));
        assert_eq!(min_shots_uniform(&[0.5, -0.5, 0.5, 0.5], 0.1).unwrap(), (400, 100));
        assert!(min_shots_uniform(&[], 0.1).is_err());
    }

    #[test]
    fn grouped_examples() {
        let h = sum(1, &[("Z", 1.0)]);
        let p = measurement_partition(&h, CommuteMode::Qubitwise);
        let plan = min_shots_grouped(&h, &p, 1.0).unwrap();
        assert_eq!(plan.per_group_shots, vec![1]);

        let h = sum(2, &[("XI", 0.3), ("IX", 0.3), ("ZI", -0.3), ("IZ", 0.3), ("II", 5.0)]);
        let p = measurement_partition(&h, CommuteMode::Qubitwise);
        assert_eq!(p.groups.len(), 2);
        let plan = min_shots_grouped(&h, &p, 0.01).unwrap();
        assert_eq!(plan.per_group_shots[0], plan.per_group_shots[1]);
        assert!(plan.variance_bound(&h).unwrap() <= 0.01f64.powi(2) * (1.0 + 1e-12));
    }

    #[test]
    fn halving_epsilon_quadruples_shots() {
        let h = sum(2, &[("XX", 0.25), ("ZZ", 0.5), ("ZI", -0.125)]);
        let p = measurement_partition(&h, CommuteMode::Qubitwise);
        let a = min_shots_grouped(&h, &p, 0.02).unwrap();
        let b = min_shots_grouped(&h, &p, 0.01).unwrap();
        for (x, y) in a.per_group_shots.iter().zip(&b.per_group_shots) {
            assert!(y.abs_diff(4 * x) <= 4);
        }
    }

    #[test]
    fn plus_state_worst_case_spread() {
        let h = sum(1, &[("Z", 1.0)]);
        let mut plus = Statevector::zero(1).unwrap();
        plus.apply_gate(Gate::H(0)).unwrap();
        let plan = min_shots_grouped(&h, &measurement_partition(&h, CommuteMode::Qubitwise), 0.05).unwrap();
        let std = validate_plan(&plus, &h, &plan, 500, 11).unwrap();
        assert!(std <= 0.06, "{std}");
        assert!(std > 0.03);
    }

    #[test]
    fn eigenstate_has_no_spread() {
        let h = sum(2, &[("ZI", 0.7), ("IZ", -0.2), ("ZZ", 0.1), ("II", 1.0)]);
        let s = Statevector::basis(2, 0b10).unwrap();
        let plan = min_shots_grouped(&h, &measurement_partition(&h, CommuteMode::Qubitwise), 0.01).unwrap();
        let (e, sd) = expectation_sampled(&s, &h, &plan, 5).unwrap();
        assert!((e - s.expectation(&h).unwrap()).abs() < 1e-12);
        assert_eq!(sd, 0.0);
        assert_eq!(validate_plan(&s, &h, &plan, 10, 1).unwrap(), 0.0);
    }

    #[test]
    fn identity_only_consumes_no_shots() {
        let h = sum(2, &[("II", -0.75)]);
        let p = measurement_partition(&h, CommuteMode::Qubitwise);
        let plan = min_shots_grouped(&h, &p, 0.1).unwrap();
        assert_eq!(plan.total_shots, 0);
        let s = Statevector::zero(2).unwrap();
        assert_eq!(expectation_sampled(&s, &h, &plan, 0).unwrap(), (-0.75, 0.0));
    }

    #[test]
    fn general_plans_are_rejected_for_sampling() {
        let h = sum(2, &[("XX", 1.0), ("YY", 1.0)]);
        let p = measurement_partition(&h, CommuteMode::General);
        let plan = min_shots_grouped(&h, &p, 0.1).unwrap();
        let s = Statevector::zero(2).unwrap();
        assert!(expectation_sampled(&s, &h, &plan, 0).is_err());
        assert!(validate_plan(&s, &h, &plan, 10, 0).is_err());
    }
}
