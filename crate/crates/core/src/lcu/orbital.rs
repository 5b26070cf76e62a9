//! Orbital rotations that lower the Pauli 1-norm.

use log::debug;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hamiltonian::{MolecularHamiltonian, OrbitalRotation};
use crate::lcu::pauli::pauli_one_norm;
use crate::optimize::{minimize, MinimizeOptions};

#[derive(Clone, Debug)]
pub struct OrbitalOptimization {
    pub rotation: OrbitalRotation,
    pub rotated: MolecularHamiltonian,
    pub norm_before: f64,
    pub norm_after: f64,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct OrbitalOptions {
    /// Random starts tried in addition to `θ = 0`.
    pub random_starts: usize,
    /// Half-width of the uniform distribution for random starts.
    pub start_scale: f64,
    /// Restarts of the local search from its own best point.
    pub rounds: usize,
    pub seed: u64,
}

impl Default for OrbitalOptions {
    fn default() -> Self {
        Self {
            random_starts: 2,
            start_scale: 0.3,
            rounds: 4,
            seed: 0,
        }
    }
}

/// Minimizes `λ^(P)(U(θ) H)` over `θ`. The returned norm never exceeds the
/// starting one.
pub fn orbital_optimize(ham: &MolecularHamiltonian, opts: &OrbitalOptions) -> OrbitalOptimization {
    let n = ham.n_orbitals();
    let np = OrbitalRotation::n_params(n);
    let norm_before = pauli_one_norm(ham);
    if np == 0 {
        return OrbitalOptimization {
            rotation: OrbitalRotation::identity(n),
            rotated: ham.clone(),
            norm_before,
            norm_after: norm_before,
            converged: true,
        };
    }
    let objective = |theta: &[f64]| {
        let u = OrbitalRotation::new(n, theta.to_vec())
            .expect("parameter length fixed")
            .unitary();
        pauli_one_norm(&ham.transform(&u))
    };
    let mopts = MinimizeOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts = vec![vec![0.0; np]];
    for _ in 0..opts.random_starts {
        starts.push(
            (0..np)
                .map(|_| rng.random_range(-opts.start_scale..opts.start_scale))
                .collect(),
        );
    }

    let mut best = (vec![0.0; np], norm_before, false);
    for (s, x0) in starts.into_iter().enumerate() {
        let mut x = x0;
        let mut value = objective(&x);
        let mut converged = false;
        for _ in 0..opts.rounds.max(1) {
            let m = minimize(objective, &x, &mopts);
            let gain = value - m.value;
            x = m.x;
            value = m.value;
            converged = m.converged;
            if gain <= 1e-10 * value.max(1.0) {
                break;
            }
        }
        debug!("orbital optimization start {s}: {value:.8}");
        if value < best.1 {
            best = (x, value, converged);
        } else if s == 0 {
            best.2 = converged;
        }
    }

    let rotation = OrbitalRotation::new(n, best.0).expect("parameter length fixed");
    let rotated = ham.rotate_orbitals(&rotation).expect("sizes match");
    let norm_after = pauli_one_norm(&rotated);
    OrbitalOptimization {
        rotation,
        rotated,
        norm_before,
        norm_after,
        converged: best.2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::random_hamiltonian;

    #[test]
    fn single_orbital_has_nothing_to_rotate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ham = random_hamiltonian(1, &mut rng);
        let r = orbital_optimize(&ham, &OrbitalOptions::default());
        assert!(r.rotation.theta().is_empty());
        assert_eq!(r.norm_after, r.norm_before);
    }

    #[test]
    fn never_increases_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..3 {
            let ham = random_hamiltonian(3, &mut rng);
            let r = orbital_optimize(&ham, &OrbitalOptions::default());
            assert!(r.norm_after <= r.norm_before + 1e-9);
            assert!((pauli_one_norm(&r.rotated) - r.norm_after).abs() < 1e-12);
        }
    }
}
