//! Extremal eigenvalues of large symmetric sparse matrices.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sparse::CsrMatrix;

/// Lanczos with full reorthogonalization. Returns `(λ_min, λ_max)` once the
/// Ritz residuals of both ends fall below `tol · max(1, |λ|)`, or when the
/// Krylov space exhausts the matrix.
pub fn extremal_eigenvalues(a: &CsrMatrix<f64>, tol: f64, seed: u64) -> (f64, f64) {
    let n = a.dim();
    assert!(n > 0, "empty matrix");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let max_steps = n;
    loop {
        a.matvec(&v, &mut w);
        let al: f64 = w.iter().zip(&v).map(|(x, y)| x * y).sum();
        basis.push(v.clone());
        alpha.push(al);
        // orthogonalize against the whole basis, twice
        for _ in 0..2 {
            for b in &basis {
                let c: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let be = w.iter().map(|x| x * x).sum::<f64>().sqrt();

        let m = alpha.len();
        let last = m >= max_steps || be < 1e-14;
        if m % 10 != 0 && !last {
            beta.push(be);
            v.iter_mut().zip(&w).for_each(|(x, y)| *x = y / be);
            continue;
        }
        let t = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = t.symmetric_eigen();
        let (imin, imax) = extremes(&eig.eigenvalues);
        let lo = eig.eigenvalues[imin];
        let hi = eig.eigenvalues[imax];
        let res_lo = (be * eig.eigenvectors[(m - 1, imin)]).abs();
        let res_hi = (be * eig.eigenvectors[(m - 1, imax)]).abs();
        let done = res_lo <= tol * lo.abs().max(1.0) && res_hi <= tol * hi.abs().max(1.0);
        if done || last {
            return (lo, hi);
        }
        beta.push(be);
        v.iter_mut().zip(&w).for_each(|(x, y)| *x = y / be);
    }
}

fn extremes(values: &DVector<f64>) -> (usize, usize) {
    let mut imin = 0;
    let mut imax = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[imin] {
            imin = i;
        }
        if *v > values[imax] {
            imax = i;
        }
    }
    (imin, imax)
}
