//! Embedded-Hamiltonian workbench.
//!
//! Qubit Hamiltonians come from active-space integrals through the
//! Jordan-Wigner mapping and are then solved by exact diagonalization,
//! Trotterized phase estimation or UCCSD-VQE on a dense statevector
//! simulator. Shot budgeting and a surface-code cost model sit on top.
//!
//! Qubit 0 is the least-significant bit of every basis index; bitstrings and
//! Pauli labels are printed most-significant qubit first.

pub mod circuit;
pub mod error;
pub mod fermion;
pub mod limits;
pub mod pauli;
pub mod qpe;
pub mod resources;
pub mod rng;
pub mod shots;
pub mod spectrum;
pub mod statevector;
pub mod vqe;

pub use error::{Error, Result};

/// Chemical accuracy, 1.6 mHa.
pub const CHEMICAL_ACCURACY: f64 = 1.6e-3;
