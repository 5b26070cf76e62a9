mod common;

use bliss_core::fit::{linear_fit, proportional_fit, scaling_fit};
use bliss_core::jordan_wigner::jordan_wigner;
use bliss_core::lcu::ac::{ac_grouping, ac_grouping_terms, ac_one_norm};
use bliss_core::lcu::pauli::majorana_terms;
use bliss_core::lcu::{df_decompose, df_one_norm, one_body_corrected_norm, pauli_one_norm};
use bliss_core::shift::{evaluate_shift_objective, optimize_bliss, optimize_symmetry_shift};
use bliss_core::spectral::sector_isospectrality;
use bliss_core::{OrbitalRotation, ShiftParameters};
use common::random_hamiltonian;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shift_preserves_target_sector(seed in any::<u64>(), n in 2usize..=3) {
        let mut r = rng(seed);
        let ham = random_hamiltonian(n, &mut r);
        let ne = r.random_range(0..=2 * n);
        let s = ShiftParameters::random(n, ne, &mut r);
        let shifted = ham.absorb_shift(&s).unwrap();
        prop_assert!(sector_isospectrality(&ham, &shifted, ne).unwrap() < 1e-9);
    }

    #[test]
    fn shifts_compose_additively(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ham = random_hamiltonian(3, &mut r);
        let a = ShiftParameters::random(3, 2, &mut r);
        let b = ShiftParameters::random(3, 2, &mut r);
        let twice = ham.absorb_shift(&a).unwrap().absorb_shift(&b).unwrap();
        let once = ham.absorb_shift(&a.add(&b).unwrap()).unwrap();
        prop_assert!(twice.max_abs_diff(&once) < 1e-12);
        prop_assert!(ham.absorb_shift(&ShiftParameters::zero(3, 2)).unwrap().max_abs_diff(&ham) == 0.0);
    }

    #[test]
    fn closed_form_norm_matches_expansion(seed in any::<u64>(), n in 2usize..=3) {
        let ham = random_hamiltonian(n, &mut rng(seed));
        let jw = jordan_wigner(&ham).unwrap().without_identity().one_norm();
        let p = pauli_one_norm(&ham);
        prop_assert!((p - jw).abs() < 1e-9, "{} vs {}", p, jw);
        let merged = ac_one_norm(&ac_grouping(&jordan_wigner(&ham).unwrap().without_identity()));
        let split = ac_one_norm(&ac_grouping_terms(majorana_terms(&ham).unwrap()));
        prop_assert!(merged <= p + 1e-12);
        prop_assert!(split <= p + 1e-12);
    }

    #[test]
    fn shift_objective_is_shifted_norm(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ham = random_hamiltonian(3, &mut r);
        let s = ShiftParameters::random(3, 3, &mut r);
        let direct = pauli_one_norm(&ham.absorb_shift(&s).unwrap());
        prop_assert!((evaluate_shift_objective(&ham, &s).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn optimized_shifts_never_increase_norm(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ham = random_hamiltonian(3, &mut r);
        let ne = r.random_range(1..=5);
        let s = optimize_symmetry_shift(&ham, ne).unwrap();
        let t = optimize_bliss(&ham, ne).unwrap();
        prop_assert!(s.norm_after <= s.norm_before + 1e-12);
        prop_assert!(t.norm_after <= s.norm_after + 1e-9);
        prop_assert!((pauli_one_norm(&t.shifted) - t.norm_after).abs() < 1e-9);
    }

    #[test]
    fn double_factorization_reconstructs(seed in any::<u64>(), n in 2usize..=4) {
        let ham = random_hamiltonian(n, &mut rng(seed));
        let frags = df_decompose(ham.two_body());
        let rebuilt = bliss_core::lcu::df::df_reconstruct(n, &frags);
        prop_assert!(rebuilt.sub(ham.two_body()).norm_sq() < 1e-6);
    }

    #[test]
    fn rotation_invariant_norms(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ham = random_hamiltonian(3, &mut r);
        let rot = OrbitalRotation::new(3, (0..3).map(|_| r.random_range(-2.0..2.0)).collect()).unwrap();
        let turned = ham.rotate_orbitals(&rot).unwrap();
        let (mu, l1) = one_body_corrected_norm(&ham);
        let (mu_t, l1_t) = one_body_corrected_norm(&turned);
        prop_assert!((l1 - l1_t).abs() < 1e-9);
        let a = df_one_norm(&df_decompose(ham.two_body()), &mu);
        let b = df_one_norm(&df_decompose(turned.two_body()), &mu_t);
        prop_assert!((a - b).abs() < 1e-8, "{} vs {}", a, b);
    }

    #[test]
    fn fits_match_normal_equations(seed in any::<u64>(), len in 3usize..12) {
        let mut r = rng(seed);
        let xs: Vec<f64> = (0..len).map(|_| r.random_range(0.5..50.0)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.7 * x + r.random_range(-1.0..1.0)).collect();

        let a = DMatrix::from_fn(len, 1, |i, _| xs[i]);
        let y = DVector::from_vec(ys.clone());
        let slope = (a.transpose() * &a).try_inverse().unwrap() * a.transpose() * &y;
        let p = proportional_fit(&xs, &ys).unwrap();
        prop_assert!((p.slope - slope[0]).abs() < 1e-10);
        prop_assert!(p.stderr >= 0.0);

        let a2 = DMatrix::from_fn(len, 2, |i, j| if j == 0 { xs[i] } else { 1.0 });
        let c = (a2.transpose() * &a2).try_inverse().unwrap() * a2.transpose() * &y;
        let l = linear_fit(&xs, &ys).unwrap();
        prop_assert!((l.slope - c[0]).abs() < 1e-10);
        prop_assert!((l.intercept.unwrap() - c[1]).abs() < 1e-10);
        let resid = &y - &a2 * &c;
        let mean = ys.iter().sum::<f64>() / len as f64;
        let sst: f64 = ys.iter().map(|v| (v - mean).powi(2)).sum();
        prop_assert!((l.r_squared.unwrap() - (1.0 - resid.norm_squared() / sst)).abs() < 1e-10);

        let sizes: Vec<usize> = (2..2 + len).collect();
        let lam: Vec<f64> = sizes.iter().map(|&n| 0.3 * (n as f64).powf(1.7) * r.random_range(0.9..1.1)).collect();
        let lx: Vec<f64> = sizes.iter().map(|&n| (n as f64).log10()).collect();
        let ly: Vec<f64> = lam.iter().map(|v| v.log10()).collect();
        let a3 = DMatrix::from_fn(len, 2, |i, j| if j == 0 { lx[i] } else { 1.0 });
        let c3 = (a3.transpose() * &a3).try_inverse().unwrap() * a3.transpose() * DVector::from_vec(ly);
        let s = scaling_fit(&sizes, &lam).unwrap();
        prop_assert!((s.slope - c3[0]).abs() < 1e-10);
        prop_assert!((s.intercept.unwrap() - c3[1]).abs() < 1e-10);
    }
}

#[test]
fn proportional_fit_noise_oracle() {
    let mut r = rng(99);
    let xs: Vec<f64> = (0..40).map(|i| 1.0 + i as f64).collect();
    let ys: Vec<f64> = xs
        .iter()
        .map(|x| 0.5 * x + 1e-3 * r.sample::<f64, _>(StandardNormal))
        .collect();
    let f = proportional_fit(&xs, &ys).unwrap();
    assert!((f.slope - 0.5).abs() <= 3.0 * f.stderr, "{f:?}");
}
