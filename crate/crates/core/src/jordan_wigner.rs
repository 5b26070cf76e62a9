//! Jordan-Wigner encoding of [`MolecularHamiltonian`]s.
//!
//! Spin orbital `(i, σ)` lives on qubit `2i + σ` with `σ = 0` for α and `1` for
//! β, and qubit value `1` means occupied:
//!
//! ```text
//! a†_p = Z_0 ⋯ Z_{p-1} (X_p - i Y_p) / 2
//! ```

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::hamiltonian::MolecularHamiltonian;
use crate::pauli::{i_pow, ComplexPauliSum, PauliSum, PauliWord, PRUNE_TOL};
use crate::sparse::CsrMatrix;

/// Largest number of spatial orbitals accepted by [`jordan_wigner`].
pub const MAX_JW_ORBITALS: usize = 16;

/// Largest qubit count for an explicit matrix realization.
pub const MAX_MATRIX_QUBITS: usize = 16;

#[inline]
pub fn spin_orbital(orbital: usize, spin: usize) -> usize {
    2 * orbital + spin
}

/// `a†_p a_q` as a complex Pauli sum.
fn excitation(p: usize, q: usize) -> ComplexPauliSum {
    let mut create = ComplexPauliSum::default();
    let below_p = (1u64 << p) - 1;
    create.add(1 << p, below_p, Complex::new(0.5, 0.0));
    create.add(1 << p, below_p | (1 << p), Complex::new(0.0, -0.5));

    let mut annihilate = ComplexPauliSum::default();
    let below_q = (1u64 << q) - 1;
    annihilate.add(1 << q, below_q, Complex::new(0.5, 0.0));
    annihilate.add(1 << q, below_q | (1 << q), Complex::new(0.0, 0.5));

    create.mul(&annihilate)
}

/// Spin-summed excitation operator `F^i_j`.
fn spatial_excitation(i: usize, j: usize) -> ComplexPauliSum {
    let mut f = ComplexPauliSum::default();
    for spin in 0..2 {
        f.add_scaled(
            &excitation(spin_orbital(i, spin), spin_orbital(j, spin)),
            Complex::new(1.0, 0.0),
        );
    }
    f.pruned(1e-15)
}

/// Maps `H` to a real Pauli sum on `2N` qubits. The identity coefficient
/// carries `e0` plus the constants generated by the mapping.
pub fn jordan_wigner(ham: &MolecularHamiltonian) -> Result<PauliSum> {
    let n = ham.n_orbitals();
    if n > MAX_JW_ORBITALS {
        return Err(Error::TooLarge(format!(
            "Jordan-Wigner expansion limited to {MAX_JW_ORBITALS} spatial orbitals, got {n}"
        )));
    }
    let excitations: Vec<ComplexPauliSum> = (0..n * n)
        .map(|ij| spatial_excitation(ij / n, ij % n))
        .collect();

    let mut acc = ComplexPauliSum::default();
    acc.add(0, 0, Complex::new(ham.e0(), 0.0));
    let h = ham.one_body();
    let g = ham.two_body();
    for i in 0..n {
        for j in 0..n {
            if h[(i, j)] != 0.0 {
                acc.add_scaled(&excitations[i * n + j], Complex::new(h[(i, j)], 0.0));
            }
        }
    }
    for ij in 0..n * n {
        let (i, j) = (ij / n, ij % n);
        for kl in 0..n * n {
            let (k, l) = (kl / n, kl % n);
            let coeff = g[[i, j, k, l]];
            if coeff == 0.0 {
                continue;
            }
            for (&(x1, z1), &c1) in &excitations[ij].terms {
                for (&(x2, z2), &c2) in &excitations[kl].terms {
                    let (x, z, k) = crate::pauli::mul_masks(x1, z1, x2, z2);
                    acc.add(x, z, c1 * c2 * i_pow(k as u8) * coeff);
                }
            }
        }
    }

    let n_qubits = 2 * n;
    let mut sum = PauliSum::new(n_qubits);
    let scale = acc.terms.values().map(|c| c.norm()).fold(1.0, f64::max);
    for (&(x, z), &c) in &acc.terms {
        if c.im.abs() > 1e-10 * scale {
            return Err(Error::Validation(format!(
                "non-Hermitian Pauli coefficient {c} on {}",
                PauliWord::new(n_qubits, x, z)
            )));
        }
        if c.re.abs() >= PRUNE_TOL {
            sum.add_term(&PauliWord::new(n_qubits, x, z), c.re);
        }
    }
    Ok(sum)
}

/// Total electron-number operator `N̂ = Σ_p (1 - Z_p)/2` on `2N` qubits.
pub fn number_operator(n_orbitals: usize) -> PauliSum {
    let nq = 2 * n_orbitals;
    let mut sum = PauliSum::new(nq);
    sum.add_term(&PauliWord::identity(nq), n_orbitals as f64);
    for q in 0..nq {
        sum.add_term(&PauliWord::new(nq, 0, 1 << q), -0.5);
    }
    sum
}

/// Explicit matrix of a Pauli sum in the computational basis, bit `q` of the
/// basis index being the state of qubit `q`.
pub fn to_sparse_matrix(sum: &PauliSum) -> Result<CsrMatrix<Complex<f64>>> {
    let nq = sum.n_qubits();
    if nq > MAX_MATRIX_QUBITS {
        return Err(Error::TooLarge(format!(
            "matrix realization limited to {MAX_MATRIX_QUBITS} qubits, got {nq}"
        )));
    }
    // Words sharing an x-mask land in the same column for a given row.
    let mut groups: std::collections::BTreeMap<u64, Vec<(u64, Complex<f64>)>> =
        Default::default();
    for (w, c) in sum.iter() {
        let y_phase = i_pow(((w.x_mask() & w.z_mask()).count_ones() % 4) as u8);
        groups
            .entry(w.x_mask())
            .or_default()
            .push((w.z_mask(), y_phase * c));
    }
    let dim = 1usize << nq;
    Ok(CsrMatrix::from_rows(dim, |row, out| {
        for (&x, words) in &groups {
            let col = row ^ x as usize;
            let mut v = Complex::new(0.0, 0.0);
            for &(z, c) in words {
                if (z & col as u64).count_ones() & 1 == 1 {
                    v -= c;
                } else {
                    v += c;
                }
            }
            if v.norm() > 0.0 {
                out.push((col, v));
            }
        }
    }))
}
