//! Random instances shared by unit tests.

use nalgebra::DMatrix;
use rand::Rng;

use crate::hamiltonian::{MolecularHamiltonian, Tensor4};

/// Random Hamiltonian with entries of order one and full tensor symmetry.
pub(crate) fn random_hamiltonian(n: usize, rng: &mut impl Rng) -> MolecularHamiltonian {
    let mut h = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    h = (&h + h.transpose()) * 0.5;
    let g = Tensor4::from_fn(n, |_, _, _, _| rng.random_range(-0.5..0.5)).symmetrized();
    MolecularHamiltonian::new(rng.random_range(-1.0..1.0), h, g).unwrap()
}
