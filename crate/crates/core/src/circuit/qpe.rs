//! Phase-estimation circuits, kept in factored form: the controlled powers
//! are stored once per ancilla and replayed `2^k` times on demand.

use std::f64::consts::PI;

use super::{controlled_trotter, inverse_qft, Basis, Circuit, CircuitMetrics, Gate, MetricsAccumulator, TCountModel};
use crate::error::{Error, Result};
use crate::fermion::OccupationState;
use crate::pauli::PauliSum;

/// QPE over `system ⊕ ancilla`: system qubits `0..s`, ancilla `k` at
/// qubit `s + k` controlling `U^{2^k}` with `U = exp(2πi·h_scaled)`
/// approximated by `n_steps` product-formula steps. Reading the ancilla as
/// an integer `m` (ancilla 0 least significant) gives `φ = m / 2^a`.
#[derive(Debug, Clone)]
pub struct QpeCircuit {
    system_width: usize,
    ancilla: usize,
    n_steps: usize,
    prep: Vec<Gate>,
    powers: Vec<Circuit>,
    readout: Circuit,
}

/// Assembles the phase-estimation circuit for `h_scaled` from `reference`.
pub fn qpe_circuit(
    h_scaled: &PauliSum,
    ancilla: usize,
    n_steps: usize,
    reference: &OccupationState,
) -> Result<QpeCircuit> {
    if ancilla == 0 {
        return Err(Error::invalid("QPE needs at least one ancilla qubit"));
    }
    if ancilla > 40 {
        return Err(Error::invalid(format!("{ancilla} ancilla qubits is beyond any simulable register")));
    }
    let s = h_scaled.width();
    if reference.n_qubits() != s {
        return Err(Error::WidthMismatch {
            expected: s,
            found: reference.n_qubits(),
        });
    }
    let width = s + ancilla;
    if width > 64 {
        return Err(Error::invalid(format!("{width} qubits exceeds the 64-qubit register")));
    }
    let mut prep = Vec::new();
    for q in 0..s {
        if reference.is_occupied(q) {
            prep.push(Gate::X(q));
        }
    }
    for k in 0..ancilla {
        prep.push(Gate::H(s + k));
    }
    let powers = (0..ancilla)
        .map(|k| controlled_trotter(h_scaled, 2.0 * PI, n_steps, s + k))
        .collect::<Result<Vec<_>>>()?;
    let iqft = inverse_qft(ancilla)?;
    let mut readout = Circuit::new(width);
    for g in iqft.gates() {
        readout.push_unchecked(g.shifted(s));
    }
    Ok(QpeCircuit {
        system_width: s,
        ancilla,
        n_steps,
        prep,
        powers,
        readout,
    })
}

impl QpeCircuit {
    pub fn width(&self) -> usize {
        self.system_width + self.ancilla
    }

    pub fn system_width(&self) -> usize {
        self.system_width
    }

    pub fn ancilla(&self) -> usize {
        self.ancilla
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Gates of the inverse QFT on the ancilla register.
    pub fn readout(&self) -> &Circuit {
        &self.readout
    }

    /// Every gate in order, generated lazily.
    pub fn gates(&self) -> impl Iterator<Item = Gate> + '_ {
        let powers = self.powers.iter().enumerate().flat_map(|(k, c)| {
            std::iter::repeat_n(c, 1usize << k).flat_map(|c| c.gates().iter().copied())
        });
        self.prep
            .iter()
            .copied()
            .chain(powers)
            .chain(self.readout.gates().iter().copied())
    }

    pub fn gate_count(&self) -> u64 {
        let powers: u64 = self
            .powers
            .iter()
            .enumerate()
            .map(|(k, c)| (c.len() as u64) << k)
            .sum();
        self.prep.len() as u64 + powers + self.readout.len() as u64
    }

    /// Metrics streamed over [`gates`](Self::gates).
    pub fn metrics(&self, basis: Basis, rz_precision: f64) -> Result<CircuitMetrics> {
        let mut acc = MetricsAccumulator::new(self.width(), basis, rz_precision, TCountModel::default())?;
        for g in self.gates() {
            acc.push(g);
        }
        Ok(acc.finish())
    }

    /// Materialized circuit; refuses when it would exceed `max_gates`.
    pub fn to_circuit(&self, max_gates: u64) -> Result<Circuit> {
        let n = self.gate_count();
        if n > max_gates {
            return Err(Error::invalid(format!(
                "QPE circuit has {n} gates, above the requested cap of {max_gates}"
            )));
        }
        let mut c = Circuit::new(self.width());
        for g in self.gates() {
            c.push_unchecked(g);
        }
        Ok(c)
    }
}
