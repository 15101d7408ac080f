//! Qubit caps for dense simulation and dense matrix work.

/// Environment variable overriding the statevector simulation cap.
pub const DENSE_LIMIT_ENV: &str = "QCWB_DENSE_LIMIT";

pub const DEFAULT_SIMULATION_QUBITS: usize = 25;
pub const DEFAULT_MATRIX_QUBITS: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DenseLimits {
    /// Largest register simulated as a dense statevector.
    pub simulation_qubits: usize,
    /// Largest width realized as a dense matrix or diagonalized.
    pub matrix_qubits: usize,
}

impl Default for DenseLimits {
    fn default() -> Self {
        Self {
            simulation_qubits: DEFAULT_SIMULATION_QUBITS,
            matrix_qubits: DEFAULT_MATRIX_QUBITS,
        }
    }
}

impl DenseLimits {
    /// Defaults, with the simulation cap taken from `QCWB_DENSE_LIMIT` when set
    /// to a valid integer.
    pub fn from_env() -> Self {
        let mut limits = Self::default();
        if let Some(v) = std::env::var(DENSE_LIMIT_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
        {
            limits.simulation_qubits = v.min(40);
        }
        limits
    }
}
