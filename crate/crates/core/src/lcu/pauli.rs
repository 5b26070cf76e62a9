//! Pauli-product 1-norm evaluated directly from the fermionic tensors.

use std::collections::HashMap;

use crate::error::Result;
use crate::hamiltonian::MolecularHamiltonian;
use crate::jordan_wigner::{jordan_wigner, spin_orbital};
use crate::pauli::{PauliWord, PRUNE_TOL};

/// Weighted affine terms whose absolute values sum to the Pauli 1-norm:
/// `Σ_r w_r |v_r|`. Each term is a linear functional of `(h, g)`, which is
/// what lets the shift optimizer treat the objective as piecewise linear.
#[derive(Clone, Debug, PartialEq)]
pub struct NormTerms {
    pub weights: Vec<f64>,
    pub values: Vec<f64>,
}

impl NormTerms {
    pub fn total(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v.abs())
            .sum()
    }
}

/// Terms in a fixed order: `N²` one-body entries, then the same-spin
/// differences over `i>k, j>l`, then all `N⁴` two-body entries.
pub fn norm_terms(ham: &MolecularHamiltonian) -> NormTerms {
    let n = ham.n_orbitals();
    let g = ham.two_body();
    let pairs = n * n.saturating_sub(1) / 2;
    let cap = n * n + pairs * pairs + n.pow(4);
    let mut weights = Vec::with_capacity(cap);
    let mut values = Vec::with_capacity(cap);

    let h1 = ham.corrected_one_body();
    for i in 0..n {
        for j in 0..n {
            weights.push(1.0);
            values.push(h1[(i, j)]);
        }
    }
    for i in 0..n {
        for k in 0..i {
            for j in 0..n {
                for l in 0..j {
                    weights.push(1.0);
                    values.push(g[[i, j, k, l]] - g[[i, l, k, j]]);
                }
            }
        }
    }
    for &v in g.as_slice() {
        weights.push(0.5);
        values.push(v);
    }
    NormTerms { weights, values }
}

/// Pauli LCU 1-norm `λ^(P)` of the qubit Hamiltonian, identity excluded:
///
/// ```text
/// Σ_ij |h_ij + 2Σ_k g_ijkk| + Σ_{i>k, j>l} |g_ijkl - g_ilkj| + ½ Σ_ijkl |g_ijkl|
/// ```
pub fn pauli_one_norm(ham: &MolecularHamiltonian) -> f64 {
    norm_terms(ham).total()
}

/// Number of Majorana-product terms with magnitude above `cutoff`, counting
/// the two spin copies separately and without merging index permutations
/// that land on the same Pauli word. This is the "number of unitaries"
/// convention of the published Pauli column.
pub fn majorana_term_count(ham: &MolecularHamiltonian, cutoff: f64) -> usize {
    2 * norm_terms(ham)
        .values
        .iter()
        .filter(|v| v.abs() > cutoff)
        .count()
}

/// Masks of the Majorana operator `Z_0 ⋯ Z_{p-1} X_p` (`b = 0`) or
/// `Z_0 ⋯ Z_{p-1} Y_p` (`b = 1`), phase dropped.
fn majorana(p: usize, b: usize) -> (u64, u64) {
    let z = (1u64 << p) - 1;
    (1 << p, if b == 1 { z | (1 << p) } else { z })
}

fn product(gammas: &[(usize, usize)]) -> (u64, u64) {
    gammas.iter().fold((0, 0), |(x, z), &(p, b)| {
        let (gx, gz) = majorana(p, b);
        (x ^ gx, z ^ gz)
    })
}

/// The Majorana-product terms behind [`pauli_one_norm`], one per spin
/// assignment and index tuple, *without* merging terms that map to the same
/// Pauli word. Magnitudes are `w_r |v_r| / 2` for each of the two spin copies
/// of norm term `r`, so the absolute values sum to `λ^(P)`. Signs are those
/// of the merged Jordan-Wigner coefficient of the word.
pub fn majorana_terms(ham: &MolecularHamiltonian) -> Result<Vec<(PauliWord, f64)>> {
    let n = ham.n_orbitals();
    let nq = 2 * n;
    let merged: HashMap<(u64, u64), f64> = jordan_wigner(ham)?
        .iter()
        .map(|(w, c)| ((w.x_mask(), w.z_mask()), c))
        .collect();
    let mut out = Vec::new();
    let mut push = |gammas: &[(usize, usize)], magnitude: f64| {
        let (x, z) = product(gammas);
        let sign = merged.get(&(x, z)).copied().unwrap_or(1.0).signum();
        out.push((PauliWord::new(nq, x, z), sign * magnitude));
    };

    let h1 = ham.corrected_one_body();
    let g = ham.two_body();
    for i in 0..n {
        for j in 0..n {
            let v = h1[(i, j)];
            if v.abs() > PRUNE_TOL {
                for s in 0..2 {
                    push(&[(spin_orbital(i, s), 0), (spin_orbital(j, s), 1)], 0.5 * v.abs());
                }
            }
        }
    }
    for i in 0..n {
        for k in 0..i {
            for j in 0..n {
                for l in 0..j {
                    let v = g[[i, j, k, l]] - g[[i, l, k, j]];
                    if v.abs() > PRUNE_TOL {
                        for s in 0..2 {
                            let (a, b, c, d) = (
                                spin_orbital(i, s),
                                spin_orbital(j, s),
                                spin_orbital(k, s),
                                spin_orbital(l, s),
                            );
                            push(&[(a, 0), (b, 1), (c, 0), (d, 1)], 0.5 * v.abs());
                        }
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let v = g[[i, j, k, l]];
                    if v.abs() > PRUNE_TOL {
                        for (s, t) in [(0, 1), (1, 0)] {
                            let gammas = [
                                (spin_orbital(i, s), 0),
                                (spin_orbital(j, s), 1),
                                (spin_orbital(k, t), 0),
                                (spin_orbital(l, t), 1),
                            ];
                            push(&gammas, 0.25 * v.abs());
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}
