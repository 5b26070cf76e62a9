//! Symmetry-shift preprocessing of molecular electronic Hamiltonians and
//! 1-norm analysis of their linear-combination-of-unitaries decompositions.

pub mod error;
pub mod export;
pub mod fcidump;
pub mod fit;
pub mod fock;
pub mod hamiltonian;
pub mod jordan_wigner;
pub mod l1fit;
pub mod lanczos;
pub mod lcu;
pub mod optimize;
pub mod pauli;
pub mod report;
pub mod shift;
pub mod sparse;
pub mod spectral;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use hamiltonian::{MolecularHamiltonian, OrbitalRotation, Tensor4};
pub use shift::{ShiftKind, ShiftParameters, ShiftResult};
