//! Numerical tools for studying error propagation in topological quantum memories.
//!
//! Pauli algebra, toric and Ising lattice models, effective tridiagonal
//! Hamiltonians, perfect-state-transfer analysis, inverse eigenvalue retuning,
//! exact small-lattice simulation and degenerate perturbation measurements.

pub mod effham;
pub mod error;
pub mod iep;
pub mod lattice;
pub mod oracle;
pub mod pauli;
pub mod perturb;
pub mod spectral;
pub mod transfer;

pub use error::{Error, Result};
