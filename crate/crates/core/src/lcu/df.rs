//! Double factorization of the two-body tensor.
//!
//! The supermatrix `G[(ij),(kl)] = g_ijkl` is diagonalized as
//! `Σ_m w_m v_m v_mᵀ`. Each retained eigenvector, reshaped to a symmetric
//! `N×N` matrix and scaled by `sqrt|w_m|`, is diagonalized again as
//! `U diag(ε) Uᵀ`, giving
//!
//! ```text
//! Σ_ijkl g_ijkl F^i_j F^k_l = Σ_m sign(w_m) (Σ_i ε_i^(m) ñ_i^(m))²
//! ```
//!
//! with `ñ_i = Σ_jk U_ji U_ki F^j_k` the number operator of rotated orbital `i`.

use nalgebra::{DMatrix, DVector};

use crate::hamiltonian::Tensor4;

/// Supermatrix eigenvalues below this magnitude are dropped.
pub const DF_TRUNCATION: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct DFFragment {
    /// Orthogonal matrix whose columns are the fragment's orbitals.
    pub basis: DMatrix<f64>,
    pub eps: DVector<f64>,
    /// `+1` or `-1`; negative only for indefinite tensors.
    pub sign: f64,
}

impl DFFragment {
    /// `Σ_i ε_i U_ji U_ki`, the rank-one factor of this fragment.
    pub fn factor(&self) -> DMatrix<f64> {
        &self.basis * DMatrix::from_diagonal(&self.eps) * self.basis.transpose()
    }

    /// Coefficient `λ_ij = ε_i ε_j` in the rotated basis.
    pub fn coefficients(&self) -> DMatrix<f64> {
        &self.eps * self.eps.transpose() * self.sign
    }

    /// `½ (Σ_i |ε_i|)²`.
    pub fn one_norm(&self) -> f64 {
        0.5 * self.eps.iter().map(|e| e.abs()).sum::<f64>().powi(2)
    }

    pub fn to_tensor(&self) -> Tensor4 {
        let l = self.factor();
        let n = l.nrows();
        Tensor4::from_fn(n, |i, j, k, m| self.sign * l[(i, j)] * l[(k, m)])
    }
}

/// Fragments ordered by decreasing `|w_m|`.
pub fn df_decompose(g: &Tensor4) -> Vec<DFFragment> {
    let n = g.dim();
    let nn = n * n;
    let sup = DMatrix::from_row_slice(nn, nn, g.as_slice());
    let sup = (&sup + sup.transpose()) * 0.5;
    let eig = sup.symmetric_eigen();
    let mut order: Vec<usize> = (0..nn)
        .filter(|&m| eig.eigenvalues[m].abs() >= DF_TRUNCATION)
        .collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .abs()
            .total_cmp(&eig.eigenvalues[a].abs())
    });

    order
        .into_iter()
        .map(|m| {
            let w = eig.eigenvalues[m];
            let v = eig.eigenvectors.column(m);
            let l = DMatrix::from_fn(n, n, |i, j| v[i * n + j]);
            let l = (&l + l.transpose()) * (0.5 * w.abs().sqrt());
            let inner = l.symmetric_eigen();
            DFFragment {
                basis: inner.eigenvectors,
                eps: inner.eigenvalues,
                sign: w.signum(),
            }
        })
        .collect()
}

pub fn df_reconstruct(n: usize, fragments: &[DFFragment]) -> Tensor4 {
    let mut g = Tensor4::zeros(n);
    for f in fragments {
        g.add_assign_scaled(&f.to_tensor(), 1.0);
    }
    g
}

/// `λ^(DF) = Σ|μ_i| + ½ Σ_m (Σ_i |ε_i^(m)|)²`.
pub fn df_one_norm(fragments: &[DFFragment], mu: &[f64]) -> f64 {
    mu.iter().map(|m| m.abs()).sum::<f64>() + fragments.iter().map(DFFragment::one_norm).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::Tensor4;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn symmetric(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
        let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        (&a + a.transpose()) * 0.5
    }

    fn outer_sum(factors: &[(f64, DMatrix<f64>)]) -> Tensor4 {
        let n = factors[0].1.nrows();
        Tensor4::from_fn(n, |i, j, k, l| {
            factors
                .iter()
                .map(|(s, v)| s * v[(i, j)] * v[(k, l)])
                .sum()
        })
    }

    #[test]
    fn rank_one_tensor() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = symmetric(3, &mut rng);
        let g = outer_sum(&[(1.0, v.clone())]);
        let frags = df_decompose(&g);
        assert_eq!(frags.len(), 1);
        let l = frags[0].factor();
        // the factor is determined up to sign
        let err = (&l - &v).amax().min((&l + &v).amax());
        assert!(err < 1e-12);
        assert_eq!(frags[0].sign, 1.0);
    }

    #[test]
    fn rank_three_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let factors: Vec<(f64, DMatrix<f64>)> = (0..3).map(|_| (1.0, symmetric(4, &mut rng))).collect();
        let g = outer_sum(&factors);
        let frags = df_decompose(&g);
        assert_eq!(frags.len(), 3);
        assert!(df_reconstruct(4, &frags).max_abs_diff(&g) < 1e-9);
    }

    #[test]
    fn indefinite_tensor_gets_signed_fragment() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = outer_sum(&[(1.0, symmetric(3, &mut rng)), (-0.5, symmetric(3, &mut rng))]);
        let frags = df_decompose(&g);
        assert_eq!(frags.len(), 2);
        assert!(frags.iter().any(|f| f.sign < 0.0));
        assert!(df_reconstruct(3, &frags).max_abs_diff(&g) < 1e-10);
    }

    #[test]
    fn norm_formula() {
        let frag = DFFragment {
            basis: DMatrix::identity(2, 2),
            eps: DVector::from_vec(vec![1.0, 1.0]),
            sign: 1.0,
        };
        assert_eq!(df_one_norm(&[frag], &[]), 2.0);
        assert_eq!(df_one_norm(&[], &[1.0, -2.0]), 3.0);
    }

    #[test]
    fn zero_tensor_has_no_fragments() {
        assert!(df_decompose(&Tensor4::zeros(3)).is_empty());
    }
}
