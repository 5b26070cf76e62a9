//! Spatial-orbital electronic Hamiltonian in excitation-operator form.
//!
//! ```text
//! H = e0 + Σ_ij h_ij F^i_j + Σ_ijkl g_ijkl F^i_j F^k_l,    F^i_j = Σ_σ a†_iσ a_jσ
//! ```
//!
//! The one-body tensor here is *not* the bare core integral: it already
//! carries the `-Σ_k g_ikkj` contraction that appears when the two-body part is
//! written with products of excitation operators instead of normal-ordered
//! strings. Conversion to and from integral files happens in [`crate::fcidump`].

use std::ops::{Index, IndexMut};

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::shift::ShiftParameters;

/// Tolerance used when validating tensor symmetries of loaded or
/// user-constructed Hamiltonians.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// Dense rank-4 tensor over `n` spatial orbitals, row-major `[i][j][k][l]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        t[[i, j, k, l]] = f(i, j, k, l);
                    }
                }
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// The eight index permutations that carry the same value for real orbitals.
    pub fn symmetric_images(i: usize, j: usize, k: usize, l: usize) -> [[usize; 4]; 8] {
        [
            [i, j, k, l],
            [j, i, l, k],
            [k, l, i, j],
            [l, k, j, i],
            [j, i, k, l],
            [i, j, l, k],
            [k, l, j, i],
            [l, k, i, j],
        ]
    }

    /// Writes `value` into all eight symmetry-equivalent slots.
    pub fn set_symmetric(&mut self, i: usize, j: usize, k: usize, l: usize, value: f64) {
        for idx in Self::symmetric_images(i, j, k, l) {
            self[idx] = value;
        }
    }

    /// Largest deviation between an entry and any of its symmetric images.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = self[[i, j, k, l]];
                        for idx in Self::symmetric_images(i, j, k, l).iter().skip(1) {
                            worst = worst.max((v - self[*idx]).abs());
                        }
                    }
                }
            }
        }
        worst
    }

    /// Averages every entry over its symmetry orbit.
    pub fn symmetrized(&self) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j, k, l| {
            Self::symmetric_images(i, j, k, l)
                .iter()
                .map(|idx| self[*idx])
                .sum::<f64>()
                / 8.0
        })
    }

    /// Sum of squared entries.
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n, "tensor dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "tensor dimension mismatch");
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Self, scale: f64) {
        assert_eq!(self.n, other.n, "tensor dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += scale * b;
        }
    }

    /// Four-index basis change `out_ijkl = Σ U_ia U_jb U_kc U_ld t_abcd`.
    pub fn transform(&self, u: &DMatrix<f64>) -> Self {
        let n = self.n;
        assert_eq!(u.nrows(), n);
        assert_eq!(u.ncols(), n);
        // Each pass contracts the leading index and appends the new one at the
        // end, so four passes restore the original index order.
        let mut cur = self.data.clone();
        let mut next = vec![0.0; cur.len()];
        let n3 = n * n * n;
        for _ in 0..4 {
            next.iter_mut().for_each(|v| *v = 0.0);
            for a in 0..n {
                let block = &cur[a * n3..(a + 1) * n3];
                for (rest, &val) in block.iter().enumerate() {
                    if val == 0.0 {
                        continue;
                    }
                    let base = rest * n;
                    for i in 0..n {
                        next[base + i] += u[(i, a)] * val;
                    }
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        Self { n, data: cur }
    }
}

impl Index<[usize; 4]> for Tensor4 {
    type Output = f64;

    #[inline]
    fn index(&self, [i, j, k, l]: [usize; 4]) -> &f64 {
        &self.data[self.offset(i, j, k, l)]
    }
}

impl IndexMut<[usize; 4]> for Tensor4 {
    #[inline]
    fn index_mut(&mut self, [i, j, k, l]: [usize; 4]) -> &mut f64 {
        let o = self.offset(i, j, k, l);
        &mut self.data[o]
    }
}

/// Spin-symmetric molecular Hamiltonian over `N` real spatial orbitals.
#[derive(Clone, Debug, PartialEq)]
pub struct MolecularHamiltonian {
    e0: f64,
    h: DMatrix<f64>,
    g: Tensor4,
}

impl MolecularHamiltonian {
    /// Builds a Hamiltonian after checking symmetry and finiteness of the
    /// tensors.
    pub fn new(e0: f64, h: DMatrix<f64>, g: Tensor4) -> Result<Self> {
        let n = h.nrows();
        if n == 0 {
            return Err(Error::Contract("at least one orbital is required".into()));
        }
        if h.ncols() != n || g.dim() != n {
            return Err(Error::Contract(format!(
                "inconsistent dimensions: h is {}x{}, g is {}^4",
                h.nrows(),
                h.ncols(),
                g.dim()
            )));
        }
        let ham = Self { e0, h, g };
        ham.validate(SYMMETRY_TOL)?;
        Ok(ham)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            e0: 0.0,
            h: DMatrix::zeros(n, n),
            g: Tensor4::zeros(n),
        }
    }

    pub(crate) fn from_parts_unchecked(e0: f64, h: DMatrix<f64>, g: Tensor4) -> Self {
        Self { e0, h, g }
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        if !self.e0.is_finite()
            || self.h.iter().any(|v| !v.is_finite())
            || self.g.as_slice().iter().any(|v| !v.is_finite())
        {
            return Err(Error::Validation("non-finite tensor entry".into()));
        }
        let h_asym = (&self.h - self.h.transpose()).amax();
        if h_asym > tol {
            return Err(Error::Validation(format!(
                "one-body tensor asymmetric by {h_asym:.3e}"
            )));
        }
        let g_asym = self.g.max_asymmetry();
        if g_asym > tol {
            return Err(Error::Validation(format!(
                "two-body tensor violates 8-fold symmetry by {g_asym:.3e}"
            )));
        }
        Ok(())
    }

    pub fn n_orbitals(&self) -> usize {
        self.h.nrows()
    }

    pub fn e0(&self) -> f64 {
        self.e0
    }

    pub fn one_body(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn two_body(&self) -> &Tensor4 {
        &self.g
    }

    /// Same operator with the constant and one-body part removed.
    pub fn two_body_part(&self) -> Self {
        let n = self.n_orbitals();
        Self::from_parts_unchecked(0.0, DMatrix::zeros(n, n), self.g.clone())
    }

    /// `h_ij + 2 Σ_k g_ijkk`: the one-body coefficient left over once the
    /// two-body part is expressed with Majorana products or reflections.
    pub fn corrected_one_body(&self) -> DMatrix<f64> {
        let n = self.n_orbitals();
        DMatrix::from_fn(n, n, |i, j| {
            self.h[(i, j)] + 2.0 * (0..n).map(|k| self.g[[i, j, k, k]]).sum::<f64>()
        })
    }

    /// `h_ij + Σ_k g_ikkj`: the one-body coefficient of the normal-ordered
    /// (physicist) form, i.e. the bare core integral.
    pub fn normal_ordered_one_body(&self) -> DMatrix<f64> {
        let n = self.n_orbitals();
        DMatrix::from_fn(n, n, |i, j| {
            self.h[(i, j)] + (0..n).map(|k| self.g[[i, k, k, j]]).sum::<f64>()
        })
    }

    /// Subtracts the shift operator `T(κ, ξ)` and re-expresses the result in
    /// the same excitation-operator form.
    ///
    /// With `ξ = 0` this is the plain symmetry shift `H - S(κ)`. The `ξ`
    /// contribution is placed symmetrically in `(ij)` and `(kl)` so the output
    /// keeps the full 8-fold symmetry; this is allowed because `N̂` commutes
    /// with every `F^i_j`.
    pub fn absorb_shift(&self, s: &ShiftParameters) -> Result<Self> {
        let n = self.n_orbitals();
        if s.xi().nrows() != n {
            return Err(Error::Contract(format!(
                "shift parameters are for {} orbitals, Hamiltonian has {n}",
                s.xi().nrows()
            )));
        }
        s.check_symmetric()?;
        let ne = s.n_elec() as f64;
        let (k1, k2, xi) = (s.kappa1(), s.kappa2(), s.xi());

        let e0 = self.e0 + k1 * ne + k2 * ne * ne;
        let mut h = self.h.clone();
        for i in 0..n {
            h[(i, i)] -= k1;
        }
        h += xi * ne;

        let mut g = self.g.clone();
        for i in 0..n {
            for k in 0..n {
                g[[i, i, k, k]] -= k2;
            }
        }
        for i in 0..n {
            for j in 0..n {
                let x = 0.5 * xi[(i, j)];
                if x == 0.0 {
                    continue;
                }
                for k in 0..n {
                    g[[i, j, k, k]] -= x;
                    g[[k, k, i, j]] -= x;
                }
            }
        }
        Ok(Self::from_parts_unchecked(e0, h, g))
    }

    /// Applies an orbital rotation: `h' = U h Uᵀ`, `g'` the four-index
    /// transform by `U`.
    pub fn rotate_orbitals(&self, r: &OrbitalRotation) -> Result<Self> {
        let n = self.n_orbitals();
        if r.n_orbitals() != n {
            return Err(Error::Contract(format!(
                "rotation is for {} orbitals, Hamiltonian has {n}",
                r.n_orbitals()
            )));
        }
        Ok(self.transform(&r.unitary()))
    }

    /// Basis change by an arbitrary orthogonal matrix.
    pub fn transform(&self, u: &DMatrix<f64>) -> Self {
        let h = u * &self.h * u.transpose();
        let h = (&h + h.transpose()) * 0.5;
        Self::from_parts_unchecked(self.e0, h, self.g.transform(u))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let dh = (&self.h - &other.h).amax();
        (self.e0 - other.e0)
            .abs()
            .max(dh)
            .max(self.g.max_abs_diff(&other.g))
    }
}

/// Real orbital rotation `U = exp(K)` with `K` antisymmetric.
///
/// Parameters are ordered over pairs `(i, j)` with `i > j`, row by row:
/// `(1,0), (2,0), (2,1), (3,0), ...`; `K_ij = θ`, `K_ji = -θ`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitalRotation {
    n: usize,
    theta: Vec<f64>,
}

impl OrbitalRotation {
    pub fn n_params(n: usize) -> usize {
        n * n.saturating_sub(1) / 2
    }

    pub fn new(n: usize, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != Self::n_params(n) {
            return Err(Error::Contract(format!(
                "{n} orbitals need {} rotation parameters, got {}",
                Self::n_params(n),
                theta.len()
            )));
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::Validation("non-finite rotation angle".into()));
        }
        Ok(Self { n, theta })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            theta: vec![0.0; Self::n_params(n)],
        }
    }

    pub fn n_orbitals(&self) -> usize {
        self.n
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn inverse(&self) -> Self {
        Self {
            n: self.n,
            theta: self.theta.iter().map(|t| -t).collect(),
        }
    }

    pub fn generator(&self) -> DMatrix<f64> {
        let mut k = DMatrix::zeros(self.n, self.n);
        let mut p = 0;
        for i in 0..self.n {
            for j in 0..i {
                k[(i, j)] = self.theta[p];
                k[(j, i)] = -self.theta[p];
                p += 1;
            }
        }
        k
    }

    /// `exp(K)` through the eigendecomposition of the Hermitian matrix `iK`.
    pub fn unitary(&self) -> DMatrix<f64> {
        let n = self.n;
        if self.theta.iter().all(|t| *t == 0.0) {
            return DMatrix::identity(n, n);
        }
        let k = self.generator();
        let ik: DMatrix<Complex<f64>> = k.map(|v| Complex::new(0.0, v));
        let eig = ik.symmetric_eigen();
        let v = &eig.eigenvectors;
        let phases =
            DMatrix::from_diagonal(&eig.eigenvalues.map(|d| Complex::new(d.cos(), -d.sin())));
        let u = v * phases * v.adjoint();
        u.map(|z| z.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::random_hamiltonian;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rotation_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..6 {
            let theta = (0..OrbitalRotation::n_params(n))
                .map(|_| rng.random_range(-3.0..3.0))
                .collect();
            let u = OrbitalRotation::new(n, theta).unwrap().unitary();
            let err = (u.transpose() * &u - DMatrix::identity(n, n)).amax();
            assert!(err < 1e-12, "n={n} err={err}");
        }
    }

    #[test]
    fn two_orbital_rotation_is_a_givens_rotation() {
        let u = OrbitalRotation::new(2, vec![0.3]).unwrap().unitary();
        assert!((u[(0, 0)] - 0.3_f64.cos()).abs() < 1e-14);
        assert!((u[(1, 0)] - 0.3_f64.sin()).abs() < 1e-14);
        assert!((u[(0, 1)] + 0.3_f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn zero_rotation_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ham = random_hamiltonian(3, &mut rng);
        let rotated = ham.rotate_orbitals(&OrbitalRotation::identity(3)).unwrap();
        assert_eq!(rotated.max_abs_diff(&ham), 0.0);
    }

    #[test]
    fn rotation_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ham = random_hamiltonian(4, &mut rng);
        let theta = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = OrbitalRotation::new(4, theta).unwrap();
        let back = ham
            .rotate_orbitals(&r)
            .unwrap()
            .rotate_orbitals(&r.inverse())
            .unwrap();
        assert!(back.max_abs_diff(&ham) < 1e-10);
    }

    #[test]
    fn rotation_preserves_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ham = random_hamiltonian(3, &mut rng);
        let r = OrbitalRotation::new(3, vec![0.4, -1.1, 2.0]).unwrap();
        let rotated = ham.rotate_orbitals(&r).unwrap();
        rotated.validate(1e-12).unwrap();
    }

    #[test]
    fn rotation_size_mismatch() {
        let ham = MolecularHamiltonian::zeros(3);
        assert!(matches!(
            ham.rotate_orbitals(&OrbitalRotation::identity(2)),
            Err(Error::Contract(_))
        ));
        assert!(OrbitalRotation::new(3, vec![0.0; 2]).is_err());
    }

    #[test]
    fn rejects_asymmetric_tensors() {
        let mut h = DMatrix::zeros(2, 2);
        h[(0, 1)] = 1.0;
        assert!(matches!(
            MolecularHamiltonian::new(0.0, h, Tensor4::zeros(2)),
            Err(Error::Validation(_))
        ));
        let mut g = Tensor4::zeros(2);
        g[[0, 1, 0, 0]] = 1.0;
        assert!(MolecularHamiltonian::new(0.0, DMatrix::zeros(2, 2), g).is_err());
    }

    #[test]
    fn identity_shift_is_noop() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ham = random_hamiltonian(3, &mut rng);
        let s = ShiftParameters::zero(3, 2);
        assert_eq!(ham.absorb_shift(&s).unwrap(), ham);
    }

    #[test]
    fn shift_keeps_symmetry_and_is_affine() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ham = random_hamiltonian(3, &mut rng);
        let a = ShiftParameters::random(3, 2, &mut rng);
        let b = ShiftParameters::random(3, 2, &mut rng);
        let both = ham.absorb_shift(&a.add(&b).unwrap()).unwrap();
        let seq = ham.absorb_shift(&a).unwrap().absorb_shift(&b).unwrap();
        both.validate(1e-12).unwrap();
        assert!(both.max_abs_diff(&seq) < 1e-12);
    }

    #[test]
    fn shift_rejects_wrong_size() {
        let ham = MolecularHamiltonian::zeros(2);
        assert!(ham.absorb_shift(&ShiftParameters::zero(3, 2)).is_err());
    }

    #[test]
    fn transform_matches_naive_contraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 3;
        let g = Tensor4::from_fn(n, |_, _, _, _| rng.random_range(-1.0..1.0));
        let u = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let fast = g.transform(&u);
        let naive = Tensor4::from_fn(n, |i, j, k, l| {
            let mut s = 0.0;
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            s += u[(i, a)] * u[(j, b)] * u[(k, c)] * u[(l, d)] * g[[a, b, c, d]];
                        }
                    }
                }
            }
            s
        });
        assert!(fast.max_abs_diff(&naive) < 1e-12);
    }
}
