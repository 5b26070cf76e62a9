//! Greedy Cartan-subalgebra fragments of the two-body tensor.
//!
//! A fragment is a rotation `U = exp(K(θ))` and a symmetric matrix `λ`,
//! realizing `Σ_ab λ_ab ñ_a ñ_b` with tensor
//! `g_ijkl = Σ_ab λ_ab U_ia U_ja U_kb U_lb`.
//!
//! For fixed `U` the tensors `u_a u_aᵀ ⊗ u_b u_bᵀ` are orthonormal, so the
//! best `λ` is a projection and only `θ` is searched numerically.

use log::debug;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hamiltonian::{OrbitalRotation, Tensor4};
use crate::optimize::{minimize, MinimizeOptions};

pub const CSA_DEFAULT_TOL: f64 = 1e-6;
/// Random restarts per fragment after the first attempt.
const RESTARTS: usize = 3;
const INIT_SCALE: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq)]
pub struct CSAFragment {
    pub rotation: OrbitalRotation,
    pub diag: DMatrix<f64>,
}

impl CSAFragment {
    pub fn to_tensor(&self) -> Tensor4 {
        let u = self.rotation.unitary();
        let n = u.nrows();
        // pair projectors P_a[i][j] = U_ia U_ja
        let p: Vec<DMatrix<f64>> = (0..n)
            .map(|a| {
                let c = u.column(a);
                c * c.transpose()
            })
            .collect();
        let mut w = vec![DMatrix::zeros(n, n); n];
        for a in 0..n {
            for b in 0..n {
                w[a] += &p[b] * self.diag[(a, b)];
            }
        }
        Tensor4::from_fn(n, |i, j, k, l| {
            (0..n).map(|a| p[a][(i, j)] * w[a][(k, l)]).sum()
        })
    }

    /// `Σ_ij |λ_ij| - ½ Σ_i |λ_ii|`.
    pub fn one_norm(&self) -> f64 {
        let n = self.diag.nrows();
        self.diag.iter().map(|v| v.abs()).sum::<f64>()
            - 0.5 * (0..n).map(|i| self.diag[(i, i)].abs()).sum::<f64>()
    }

    /// Products of reflections above `cutoff`: four spin combinations per
    /// orbital pair `a < b`, one per diagonal entry.
    pub fn unitary_count(&self, cutoff: f64) -> usize {
        let n = self.diag.nrows();
        let mut count = 0;
        for a in 0..n {
            if self.diag[(a, a)].abs() > cutoff {
                count += 1;
            }
            for b in a + 1..n {
                if self.diag[(a, b)].abs() > cutoff {
                    count += 4;
                }
            }
        }
        count
    }
}

#[derive(Clone, Debug)]
pub struct CSADecomposition {
    pub fragments: Vec<CSAFragment>,
    /// `Σ |b_ijkl|²` of what is left over.
    pub residual: f64,
    /// False when the fragment cap was reached before the tolerance.
    pub complete: bool,
}

/// `R̃_aabb` for `R̃` the tensor in the basis of the columns of `u`.
fn diagonal_projection(r: &Tensor4, u: &DMatrix<f64>) -> DMatrix<f64> {
    let n = r.dim();
    let n2 = n * n;
    let data = r.as_slice();
    // y[a][kl] = Σ_ij U_ia U_ja R_ijkl
    let mut y = vec![0.0; n * n2];
    for i in 0..n {
        for j in 0..n {
            let row = &data[(i * n + j) * n2..(i * n + j + 1) * n2];
            for a in 0..n {
                let c = u[(i, a)] * u[(j, a)];
                if c == 0.0 {
                    continue;
                }
                let dst = &mut y[a * n2..(a + 1) * n2];
                for (d, s) in dst.iter_mut().zip(row) {
                    *d += c * s;
                }
            }
        }
    }
    let mut lambda = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                for l in 0..n {
                    s += y[a * n2 + k * n + l] * u[(k, b)] * u[(l, b)];
                }
            }
            lambda[(a, b)] = s;
        }
    }
    (&lambda + lambda.transpose()) * 0.5
}

fn fit_fragment(r: &Tensor4, rng: &mut ChaCha8Rng) -> (CSAFragment, f64) {
    let n = r.dim();
    let np = OrbitalRotation::n_params(n);
    let total = r.norm_sq();
    let captured = |theta: &[f64]| {
        let u = OrbitalRotation::new(n, theta.to_vec())
            .expect("parameter length fixed")
            .unitary();
        diagonal_projection(r, &u).norm_squared()
    };
    let opts = MinimizeOptions {
        grad_tol: 1e-12 * total.max(1e-300),
        max_iter: 2000,
        ..MinimizeOptions::default()
    };

    let mut best: Option<(Vec<f64>, f64)> = None;
    for attempt in 0..=RESTARTS {
        let x0: Vec<f64> = (0..np).map(|_| rng.random_range(-INIT_SCALE..INIT_SCALE)).collect();
        let m = minimize(|t| total - captured(t), &x0, &opts);
        let better = best.as_ref().is_none_or(|(_, v)| m.value < *v);
        if better {
            best = Some((m.x, m.value));
        }
        let gain = total - best.as_ref().expect("set above").1;
        if m.converged && gain > 1e-3 * total {
            break;
        }
        debug!("csa fragment attempt {attempt}: captured {gain:.3e} of {total:.3e}");
    }
    let (theta, _) = best.expect("at least one attempt");
    let rotation = OrbitalRotation::new(n, theta).expect("parameter length fixed");
    let diag = diagonal_projection(r, &rotation.unitary());
    let frag = CSAFragment { rotation, diag };
    let residual = r.sub(&frag.to_tensor()).norm_sq();
    (frag, residual)
}

/// Fits fragments one at a time to the remaining tensor until its squared
/// 2-norm drops below `tol` or `max_fragments` (default `2N²`) is reached.
pub fn csa_greedy(g: &Tensor4, tol: f64, max_fragments: Option<usize>, seed: u64) -> CSADecomposition {
    let n = g.dim();
    let cap = max_fragments.unwrap_or(2 * n * n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut residual_tensor = g.clone();
    let mut residual = residual_tensor.norm_sq();
    let mut fragments = Vec::new();
    while residual >= tol && fragments.len() < cap {
        let (frag, next) = fit_fragment(&residual_tensor, &mut rng);
        if next >= residual {
            debug!("csa: fragment {} made no progress", fragments.len());
            break;
        }
        residual_tensor = residual_tensor.sub(&frag.to_tensor());
        residual = next;
        fragments.push(frag);
        debug!("csa: {} fragments, residual {residual:.3e}", fragments.len());
    }
    CSADecomposition {
        complete: residual < tol,
        fragments,
        residual,
    }
}

pub fn csa_reconstruct(n: usize, fragments: &[CSAFragment]) -> Tensor4 {
    let mut g = Tensor4::zeros(n);
    for f in fragments {
        g.add_assign_scaled(&f.to_tensor(), 1.0);
    }
    g
}

/// `λ^(CSA) = Σ|μ_i| + Σ_m (Σ_ij |λ_ij| - ½ Σ_i |λ_ii|)`.
pub fn csa_one_norm(fragments: &[CSAFragment], mu: &[f64]) -> f64 {
    mu.iter().map(|m| m.abs()).sum::<f64>() + fragments.iter().map(CSAFragment::one_norm).sum::<f64>()
}
