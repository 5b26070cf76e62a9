//! Symmetry shifts built from the electron-number operator.
//!
//! ```text
//! T(κ, ξ) = κ1 (N̂ - Ne) + κ2 (N̂² - Ne²) + Σ_ij ξ_ij F^i_j (N̂ - Ne)
//! ```
//!
//! `T` vanishes on the `Ne`-electron sector, so `H - T` has the same spectrum
//! there. The parameters are chosen to minimize the Pauli 1-norm of `H - T`.

use log::info;
use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::MolecularHamiltonian;
use crate::l1fit::L1Problem;
use crate::lcu::pauli::{norm_terms, pauli_one_norm};

const XI_SYMMETRY_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct ShiftParameters {
    kappa1: f64,
    kappa2: f64,
    xi: DMatrix<f64>,
    n_elec: usize,
}

impl ShiftParameters {
    pub fn new(kappa1: f64, kappa2: f64, xi: DMatrix<f64>, n_elec: usize) -> Result<Self> {
        if !xi.is_square() {
            return Err(Error::Contract(format!(
                "xi must be square, got {}x{}",
                xi.nrows(),
                xi.ncols()
            )));
        }
        let s = Self {
            kappa1,
            kappa2,
            xi,
            n_elec,
        };
        s.check_symmetric()?;
        if !(kappa1.is_finite() && kappa2.is_finite() && s.xi.iter().all(|v| v.is_finite())) {
            return Err(Error::Validation("non-finite shift parameter".into()));
        }
        Ok(s)
    }

    pub fn zero(n_orbitals: usize, n_elec: usize) -> Self {
        Self {
            kappa1: 0.0,
            kappa2: 0.0,
            xi: DMatrix::zeros(n_orbitals, n_orbitals),
            n_elec,
        }
    }

    /// Parameters with entries uniform in `[-0.5, 0.5)`.
    pub fn random(n_orbitals: usize, n_elec: usize, rng: &mut impl Rng) -> Self {
        let mut xi = DMatrix::zeros(n_orbitals, n_orbitals);
        for i in 0..n_orbitals {
            for j in 0..=i {
                let v = rng.random_range(-0.5..0.5);
                xi[(i, j)] = v;
                xi[(j, i)] = v;
            }
        }
        Self {
            kappa1: rng.random_range(-0.5..0.5),
            kappa2: rng.random_range(-0.5..0.5),
            xi,
            n_elec,
        }
    }

    pub fn kappa1(&self) -> f64 {
        self.kappa1
    }

    pub fn kappa2(&self) -> f64 {
        self.kappa2
    }

    pub fn xi(&self) -> &DMatrix<f64> {
        &self.xi
    }

    pub fn n_elec(&self) -> usize {
        self.n_elec
    }

    pub fn n_orbitals(&self) -> usize {
        self.xi.nrows()
    }

    pub fn check_symmetric(&self) -> Result<()> {
        let asym = (&self.xi - self.xi.transpose()).amax();
        if asym > XI_SYMMETRY_TOL {
            return Err(Error::Contract(format!(
                "xi is not symmetric (max |xi_ij - xi_ji| = {asym:.3e})"
            )));
        }
        Ok(())
    }

    /// Parameter-wise sum; both sets must target the same sector.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n_elec != other.n_elec || self.n_orbitals() != other.n_orbitals() {
            return Err(Error::Contract(
                "shift parameters differ in orbital count or electron number".into(),
            ));
        }
        Ok(Self {
            kappa1: self.kappa1 + other.kappa1,
            kappa2: self.kappa2 + other.kappa2,
            xi: &self.xi + &other.xi,
            n_elec: self.n_elec,
        })
    }

    /// Flat parameter vector `[κ1, κ2, ξ_ij for i ≤ j row by row]`.
    pub fn to_vector(&self) -> Vec<f64> {
        let n = self.n_orbitals();
        let mut v = Vec::with_capacity(2 + n * (n + 1) / 2);
        v.push(self.kappa1);
        v.push(self.kappa2);
        for i in 0..n {
            for j in i..n {
                v.push(self.xi[(i, j)]);
            }
        }
        v
    }

    /// Inverse of [`to_vector`](Self::to_vector). A vector of length 2
    /// leaves `ξ = 0`.
    pub fn from_vector(n_orbitals: usize, n_elec: usize, v: &[f64]) -> Result<Self> {
        let n = n_orbitals;
        let full = 2 + n * (n + 1) / 2;
        if v.len() != 2 && v.len() != full {
            return Err(Error::Contract(format!(
                "expected 2 or {full} shift parameters, got {}",
                v.len()
            )));
        }
        let mut xi = DMatrix::zeros(n, n);
        if v.len() == full {
            let mut p = 2;
            for i in 0..n {
                for j in i..n {
                    xi[(i, j)] = v[p];
                    xi[(j, i)] = v[p];
                    p += 1;
                }
            }
        }
        Self::new(v[0], v[1], xi, n_elec)
    }
}

/// Which part of the shift pool is optimized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ShiftKind {
    /// No shift.
    #[serde(rename = "none")]
    None,
    /// `κ1, κ2` only.
    #[serde(rename = "S")]
    Symmetry,
    /// `κ1, κ2` and `ξ`.
    #[serde(rename = "T")]
    Bliss,
}

impl ShiftKind {
    pub const ALL: [ShiftKind; 3] = [ShiftKind::None, ShiftKind::Symmetry, ShiftKind::Bliss];

    pub fn label(self) -> &'static str {
        match self {
            ShiftKind::None => "none",
            ShiftKind::Symmetry => "S",
            ShiftKind::Bliss => "T",
        }
    }
}

impl std::str::FromStr for ShiftKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" | "h" => Ok(ShiftKind::None),
            "s" => Ok(ShiftKind::Symmetry),
            "t" | "bliss" => Ok(ShiftKind::Bliss),
            other => Err(Error::Config(format!("unknown shift kind '{other}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ShiftResult {
    pub params: ShiftParameters,
    pub shifted: MolecularHamiltonian,
    pub norm_before: f64,
    pub norm_after: f64,
    pub converged: bool,
}

/// Pauli 1-norm of `H - T(s)`.
pub fn evaluate_shift_objective(ham: &MolecularHamiltonian, s: &ShiftParameters) -> Result<f64> {
    Ok(pauli_one_norm(&ham.absorb_shift(s)?))
}

fn check_sector(ham: &MolecularHamiltonian, n_elec: usize) -> Result<()> {
    let max = 2 * ham.n_orbitals();
    if n_elec > max {
        return Err(Error::Contract(format!(
            "{n_elec} electrons do not fit in {} spatial orbitals",
            ham.n_orbitals()
        )));
    }
    Ok(())
}

/// Objective as offsets plus a linear map of the parameter vector. Every
/// norm term is linear in `(h, g)` and the absorption is affine in the
/// parameters, so column `k` is the norm-term vector of a zero Hamiltonian
/// shifted by the `k`-th unit parameter.
fn affine_model(
    ham: &MolecularHamiltonian,
    n_elec: usize,
    n_params: usize,
) -> Result<(Vec<f64>, Vec<f64>, DMatrix<f64>)> {
    let n = ham.n_orbitals();
    let base = norm_terms(ham);
    let zero = MolecularHamiltonian::zeros(n);
    let mut design = DMatrix::zeros(base.values.len(), n_params);
    let mut unit = vec![0.0; n_params];
    for k in 0..n_params {
        unit.iter_mut().for_each(|u| *u = 0.0);
        unit[k] = 1.0;
        let s = ShiftParameters::from_vector(n, n_elec, &unit)?;
        let col = norm_terms(&zero.absorb_shift(&s)?).values;
        design.set_column(k, &nalgebra::DVector::from_vec(col));
    }
    Ok((base.values, base.weights, design))
}

fn optimize(
    ham: &MolecularHamiltonian,
    start: &ShiftParameters,
    kind: ShiftKind,
) -> Result<ShiftResult> {
    let n = ham.n_orbitals();
    let n_elec = start.n_elec();
    let norm_before = pauli_one_norm(ham);
    let n_params = match kind {
        ShiftKind::None => 0,
        ShiftKind::Symmetry => 2,
        ShiftKind::Bliss => 2 + n * (n + 1) / 2,
    };
    let start_vec = start.to_vector();
    let (params, converged) = if n_params == 0 {
        (start.clone(), true)
    } else {
        let (offsets, weights, design) = affine_model(ham, n_elec, n_params)?;
        let prob = L1Problem {
            offsets: &offsets,
            weights: &weights,
            design: &design,
        };
        let sol = prob.solve(&start_vec[..n_params]);
        let mut v = sol.params;
        if n_params == 2 && start_vec.len() > 2 {
            v.extend_from_slice(&start_vec[2..]);
        }
        (ShiftParameters::from_vector(n, n_elec, &v)?, sol.converged)
    };
    let mut shifted = ham.absorb_shift(&params)?;
    let mut norm_after = pauli_one_norm(&shifted);
    let mut params = params;
    let start_norm = evaluate_shift_objective(ham, start)?;
    if norm_after > start_norm {
        params = start.clone();
        shifted = ham.absorb_shift(&params)?;
        norm_after = start_norm;
    }
    Ok(ShiftResult {
        params,
        shifted,
        norm_before,
        norm_after,
        converged,
    })
}

/// Optimizes `κ1, κ2` with `ξ = 0`, starting from zero.
pub fn optimize_symmetry_shift(ham: &MolecularHamiltonian, n_elec: usize) -> Result<ShiftResult> {
    check_sector(ham, n_elec)?;
    let r = optimize(
        ham,
        &ShiftParameters::zero(ham.n_orbitals(), n_elec),
        ShiftKind::Symmetry,
    )?;
    info!(
        "symmetry shift: {:.6} -> {:.6} (k1 = {:.6}, k2 = {:.6})",
        r.norm_before,
        r.norm_after,
        r.params.kappa1(),
        r.params.kappa2()
    );
    Ok(r)
}

/// Optimizes `κ1, κ2` and `ξ` jointly, warm-started from
/// [`optimize_symmetry_shift`].
pub fn optimize_bliss(ham: &MolecularHamiltonian, n_elec: usize) -> Result<ShiftResult> {
    let s = optimize_symmetry_shift(ham, n_elec)?;
    optimize_bliss_from(ham, &s)
}

/// The joint stage alone, started from an existing symmetry-shift result.
pub fn optimize_bliss_from(ham: &MolecularHamiltonian, s: &ShiftResult) -> Result<ShiftResult> {
    let mut r = optimize(ham, &s.params, ShiftKind::Bliss)?;
    r.converged &= s.converged;
    info!("bliss shift: {:.6} -> {:.6}", r.norm_before, r.norm_after);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::Tensor4;
    use crate::testutil::random_hamiltonian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn vector_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = ShiftParameters::random(4, 3, &mut rng);
        let back = ShiftParameters::from_vector(4, 3, &s.to_vector()).unwrap();
        assert_eq!(s, back);
        assert!(ShiftParameters::from_vector(4, 3, &[0.0; 5]).is_err());
    }

    #[test]
    fn asymmetric_xi_rejected() {
        let mut xi = DMatrix::zeros(2, 2);
        xi[(0, 1)] = 1e-6;
        assert!(matches!(
            ShiftParameters::new(0.0, 0.0, xi, 2),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn zero_shift_objective_is_plain_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ham = random_hamiltonian(3, &mut rng);
        let v = evaluate_shift_objective(&ham, &ShiftParameters::zero(3, 2)).unwrap();
        assert_eq!(v, pauli_one_norm(&ham));
    }

    #[test]
    fn affine_model_matches_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ham = random_hamiltonian(3, &mut rng);
        let s = ShiftParameters::random(3, 4, &mut rng);
        let p = s.to_vector();
        let (offsets, weights, design) = affine_model(&ham, 4, p.len()).unwrap();
        let prob = L1Problem {
            offsets: &offsets,
            weights: &weights,
            design: &design,
        };
        let direct = evaluate_shift_objective(&ham, &s).unwrap();
        assert!((prob.value(&p) - direct).abs() < 1e-12);
    }

    #[test]
    fn recovers_pure_shift() {
        let n = 3;
        let kappa = 0.37;
        let mut g = Tensor4::zeros(n);
        for i in 0..n {
            for k in 0..n {
                g[[i, i, k, k]] = kappa;
            }
        }
        let ham = MolecularHamiltonian::new(0.0, DMatrix::zeros(n, n), g).unwrap();
        let r = optimize_symmetry_shift(&ham, 3).unwrap();
        assert!((r.params.kappa2() - kappa).abs() < 1e-8, "{:?}", r.params);
        assert!(r.norm_after < 1e-8);
    }

    #[test]
    fn single_orbital_bliss() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ham = random_hamiltonian(1, &mut rng);
        let r = optimize_bliss(&ham, 0).unwrap();
        assert!(r.norm_after <= pauli_one_norm(&ham) + 1e-12);
        assert!(r.norm_after < 1e-8);
    }

    #[test]
    fn warm_start_chain_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let ham = random_hamiltonian(3, &mut rng);
            let s = optimize_symmetry_shift(&ham, 2).unwrap();
            let t = optimize_bliss_from(&ham, &s).unwrap();
            assert!(s.norm_after <= s.norm_before + 1e-9);
            assert!(t.norm_after <= s.norm_after + 1e-9);
        }
    }

    #[test]
    fn optimum_is_coordinatewise_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let ham = random_hamiltonian(3, &mut rng);
        let t = optimize_bliss(&ham, 2).unwrap();
        let p = t.params.to_vector();
        for k in 0..p.len() {
            for d in [1e-4, -1e-4] {
                let mut q = p.clone();
                q[k] += d;
                let s = ShiftParameters::from_vector(3, 2, &q).unwrap();
                let v = evaluate_shift_objective(&ham, &s).unwrap();
                assert!(v >= t.norm_after - 1e-8, "coordinate {k} step {d}");
            }
        }
    }

    #[test]
    fn too_many_electrons() {
        let ham = MolecularHamiltonian::zeros(2);
        assert!(matches!(
            optimize_bliss(&ham, 5),
            Err(Error::Contract(_))
        ));
    }
}
