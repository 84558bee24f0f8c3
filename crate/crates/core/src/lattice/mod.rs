//! Lattice Hamiltonians, logical operators, error strings and adversarial perturbations.

mod ising;
mod toric;

pub use ising::IsingLattice;
pub use toric::{DualityVariant, ToricLattice};
