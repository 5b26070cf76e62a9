//! Determinant bases and Slater-Condon matrix construction.
//!
//! A determinant is a bitstring over `2N` spin orbitals with spin orbital
//! `(i, σ)` at bit `2i + σ`, the same ordering as the Jordan-Wigner qubits.
//! Operators act in the order `a†_p a†_q a_s a_r`, with the fermionic sign
//! given by the parity of occupied bits below each index.

use std::collections::HashMap;

use crate::hamiltonian::MolecularHamiltonian;
use crate::jordan_wigner::spin_orbital;
use crate::sparse::CsrMatrix;

/// All `k`-subsets of `0..n` as bitmasks, in increasing numeric order.
pub fn combinations(n: usize, k: usize) -> Vec<u64> {
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let mut out = Vec::new();
    let mut c: u64 = (1 << k) - 1;
    let limit = 1u64 << n;
    while c < limit {
        out.push(c);
        // Gosper's hack
        let t = c & c.wrapping_neg();
        let r = c + t;
        c = (((r ^ c) >> 2) / t) | r;
    }
    out
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Dimension of the `(n_alpha, n_beta)` block.
pub fn block_dim(n_orbitals: usize, n_alpha: usize, n_beta: usize) -> usize {
    binomial(n_orbitals, n_alpha) * binomial(n_orbitals, n_beta)
}

/// Spreads spatial-orbital bits `i` to spin-orbital bits `2i + spin`.
fn interleave(spatial: u64, spin: usize) -> u64 {
    let mut out = 0;
    let mut bits = spatial;
    while bits != 0 {
        let i = bits.trailing_zeros() as usize;
        out |= 1 << spin_orbital(i, spin);
        bits &= bits - 1;
    }
    out
}

/// Determinants with fixed `(n_alpha, n_beta)`.
#[derive(Clone, Debug)]
pub struct DeterminantBasis {
    pub n_alpha: usize,
    pub n_beta: usize,
    dets: Vec<u64>,
    index: HashMap<u64, usize>,
}

impl DeterminantBasis {
    pub fn new(n_orbitals: usize, n_alpha: usize, n_beta: usize) -> Self {
        let alphas = combinations(n_orbitals, n_alpha);
        let betas = combinations(n_orbitals, n_beta);
        let mut dets = Vec::with_capacity(alphas.len() * betas.len());
        for &a in &alphas {
            let a = interleave(a, 0);
            for &b in &betas {
                dets.push(a | interleave(b, 1));
            }
        }
        let index = dets.iter().enumerate().map(|(k, &d)| (d, k)).collect();
        Self {
            n_alpha,
            n_beta,
            dets,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.dets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dets.is_empty()
    }

    pub fn determinants(&self) -> &[u64] {
        &self.dets
    }

    pub fn position(&self, det: u64) -> Option<usize> {
        self.index.get(&det).copied()
    }
}

#[inline]
fn parity_below(det: u64, p: usize) -> f64 {
    if (det & ((1u64 << p) - 1)).count_ones() & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

#[inline]
fn annihilate(det: u64, p: usize) -> Option<(u64, f64)> {
    (det >> p & 1 == 1).then(|| (det ^ (1 << p), parity_below(det, p)))
}

#[inline]
fn create(det: u64, p: usize) -> Option<(u64, f64)> {
    (det >> p & 1 == 0).then(|| (det | (1 << p), parity_below(det, p)))
}

/// Spin-orbital integrals of `H`:
///
/// ```text
/// H = e0 + Σ_pq t_pq a†_p a_q + Σ_{p<q, r<s} w_pqrs a†_p a†_q a_s a_r
/// ```
///
/// with `w` the antisymmetrized two-electron integral.
pub struct SpinOrbitalIntegrals {
    n_spin: usize,
    e0: f64,
    t: Vec<f64>,
    w: Vec<f64>,
}

impl SpinOrbitalIntegrals {
    pub fn new(ham: &MolecularHamiltonian) -> Self {
        let n = ham.n_orbitals();
        let ns = 2 * n;
        let h = ham.normal_ordered_one_body();
        let g = ham.two_body();
        let spin = |p: usize| p & 1;
        let orb = |p: usize| p >> 1;
        let mut t = vec![0.0; ns * ns];
        for p in 0..ns {
            for q in 0..ns {
                if spin(p) == spin(q) {
                    t[p * ns + q] = h[(orb(p), orb(q))];
                }
            }
        }
        // <pq|rs> = 2 g[p r q s] when spins of (p, r) and (q, s) match
        let v = |p: usize, q: usize, r: usize, s: usize| {
            if spin(p) == spin(r) && spin(q) == spin(s) {
                2.0 * g[[orb(p), orb(r), orb(q), orb(s)]]
            } else {
                0.0
            }
        };
        let mut w = vec![0.0; ns.pow(4)];
        for p in 0..ns {
            for q in p + 1..ns {
                for r in 0..ns {
                    for s in r + 1..ns {
                        w[((p * ns + q) * ns + r) * ns + s] = v(p, q, r, s) - v(p, q, s, r);
                    }
                }
            }
        }
        Self {
            n_spin: ns,
            e0: ham.e0(),
            t,
            w,
        }
    }

    /// `H |det⟩` as a list of `(det', amplitude)`, unmerged.
    pub fn apply(&self, det: u64, out: &mut Vec<(u64, f64)>) {
        let ns = self.n_spin;
        out.push((det, self.e0));
        let occ: Vec<usize> = (0..ns).filter(|&p| det >> p & 1 == 1).collect();
        for &q in &occ {
            let (d1, s1) = annihilate(det, q).expect("occupied");
            for p in 0..ns {
                let t = self.t[p * ns + q];
                if t == 0.0 {
                    continue;
                }
                if let Some((d2, s2)) = create(d1, p) {
                    out.push((d2, t * s1 * s2));
                }
            }
        }
        for (a, &r) in occ.iter().enumerate() {
            for &s in &occ[a + 1..] {
                // a_s a_r
                let (d1, s1) = annihilate(det, r).expect("occupied");
                let (d2, s2) = annihilate(d1, s).expect("occupied");
                for p in 0..ns {
                    if d2 >> p & 1 == 1 {
                        continue;
                    }
                    for q in p + 1..ns {
                        let w = self.w[((p * ns + q) * ns + r) * ns + s];
                        if w == 0.0 {
                            continue;
                        }
                        if let Some((d3, s3)) = create(d2, q) {
                            let (d4, s4) = create(d3, p).expect("p is empty");
                            out.push((d4, w * s1 * s2 * s3 * s4));
                        }
                    }
                }
            }
        }
    }

    /// Matrix of `H` restricted to one block.
    pub fn block_matrix(&self, basis: &DeterminantBasis) -> CsrMatrix<f64> {
        let mut buf = Vec::new();
        CsrMatrix::from_rows(basis.len(), |col, out| {
            // columns of H are H|det⟩; H is symmetric so this is also the row
            buf.clear();
            self.apply(basis.determinants()[col], &mut buf);
            for &(d, v) in &buf {
                let row = basis
                    .position(d)
                    .expect("number- and spin-conserving operator stays in block");
                out.push((row, v));
            }
        })
    }
}
