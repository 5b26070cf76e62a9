//! Dense Fock-space oracle built directly from creation matrices, with no
//! reference to the library's Pauli or determinant code.
#![allow(dead_code)]

use bliss_core::{MolecularHamiltonian, Tensor4};
use nalgebra::DMatrix;
use rand::Rng;

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn random_hamiltonian(n: usize, rng: &mut impl Rng) -> MolecularHamiltonian {
    let mut h = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    h = (&h + h.transpose()) * 0.5;
    let g = Tensor4::from_fn(n, |_, _, _, _| rng.random_range(-0.5..0.5)).symmetrized();
    MolecularHamiltonian::new(rng.random_range(-1.0..1.0), h, g).unwrap()
}

/// Creation operators on `2N` spin orbitals, spin orbital `(i, σ)` on bit
/// `2i + σ`.
pub struct Fermions {
    pub n_orbitals: usize,
    create: Vec<DMatrix<f64>>,
}

impl Fermions {
    pub fn new(n_orbitals: usize) -> Self {
        let nq = 2 * n_orbitals;
        let dim = 1usize << nq;
        let create = (0..nq)
            .map(|p| {
                let mut m = DMatrix::zeros(dim, dim);
                for b in 0..dim {
                    if b >> p & 1 == 0 {
                        let parity = (b & ((1 << p) - 1)).count_ones();
                        m[(b | 1 << p, b)] = if parity % 2 == 0 { 1.0 } else { -1.0 };
                    }
                }
                m
            })
            .collect();
        Self { n_orbitals, create }
    }

    pub fn dim(&self) -> usize {
        1 << (2 * self.n_orbitals)
    }

    pub fn identity(&self) -> DMatrix<f64> {
        DMatrix::identity(self.dim(), self.dim())
    }

    pub fn cdag(&self, p: usize) -> &DMatrix<f64> {
        &self.create[p]
    }

    pub fn c(&self, p: usize) -> DMatrix<f64> {
        self.create[p].transpose()
    }

    /// Spin-summed `E_ij = Σ_σ a†_iσ a_jσ`.
    pub fn excitation(&self, i: usize, j: usize) -> DMatrix<f64> {
        (0..2).fold(DMatrix::zeros(self.dim(), self.dim()), |acc, s| {
            acc + self.cdag(2 * i + s) * self.c(2 * j + s)
        })
    }

    /// `Σ_ij m_ij a†_iσ a_jσ` for one spin.
    pub fn one_body_spin(&self, m: &DMatrix<f64>, spin: usize) -> DMatrix<f64> {
        let n = self.n_orbitals;
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for i in 0..n {
            for j in 0..n {
                if m[(i, j)] != 0.0 {
                    out += self.cdag(2 * i + spin) * self.c(2 * j + spin) * m[(i, j)];
                }
            }
        }
        out
    }

    /// Number operator of rotated orbital `a` (column `a` of `u`) for one spin.
    pub fn rotated_number(&self, u: &DMatrix<f64>, a: usize, spin: usize) -> DMatrix<f64> {
        let c = u.column(a);
        self.one_body_spin(&(c * c.transpose()), spin)
    }

    /// Reflection `2n - 1` of a rotated spin orbital.
    pub fn rotated_reflection(&self, u: &DMatrix<f64>, a: usize, spin: usize) -> DMatrix<f64> {
        self.rotated_number(u, a, spin) * 2.0 - self.identity()
    }

    pub fn total_number(&self) -> DMatrix<f64> {
        (0..2 * self.n_orbitals).fold(DMatrix::zeros(self.dim(), self.dim()), |acc, p| {
            acc + self.cdag(p) * self.c(p)
        })
    }

    /// `e0 + Σ h_ij E_ij + Σ g_ijkl E_ij E_kl`.
    pub fn chemist(&self, ham: &MolecularHamiltonian) -> DMatrix<f64> {
        let n = self.n_orbitals;
        let e: Vec<Vec<DMatrix<f64>>> = (0..n)
            .map(|i| (0..n).map(|j| self.excitation(i, j)).collect())
            .collect();
        let mut out = self.identity() * ham.e0();
        for i in 0..n {
            for j in 0..n {
                out += &e[i][j] * ham.one_body()[(i, j)];
                for k in 0..n {
                    for l in 0..n {
                        let v = ham.two_body()[[i, j, k, l]];
                        if v != 0.0 {
                            out += &e[i][j] * &e[k][l] * v;
                        }
                    }
                }
            }
        }
        out
    }

    /// `e0 + Σ t_pq a†_pσ a_qσ + ½ Σ (pq|rs) a†_pσ a†_rτ a_sτ a_qσ`.
    pub fn physicist(&self, e0: f64, t: &DMatrix<f64>, eri: &Tensor4) -> DMatrix<f64> {
        let n = self.n_orbitals;
        let mut out = self.identity() * e0 + self.one_body_spin(t, 0) + self.one_body_spin(t, 1);
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = eri[[p, q, r, s]];
                        if v == 0.0 {
                            continue;
                        }
                        for a in 0..2 {
                            for b in 0..2 {
                                let (pa, qa, rb, sb) = (2 * p + a, 2 * q + a, 2 * r + b, 2 * s + b);
                                out += self.cdag(pa) * self.cdag(rb) * self.c(sb) * self.c(qa) * (0.5 * v);
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Spectrum restricted to basis states with `n_elec` set bits.
pub fn sector_eigenvalues(m: &DMatrix<f64>, n_elec: usize) -> Vec<f64> {
    let idx: Vec<usize> = (0..m.nrows())
        .filter(|b| b.count_ones() as usize == n_elec)
        .collect();
    let sub = DMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])]);
    eigenvalues(&sub)
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}
