//! Pauli words in symplectic (x, z) form and real-weighted sums of them.
//!
//! A word with masks `(x, z)` and phase `k` is the operator
//! `i^k · ⊗_q σ(x_q, z_q)`, where `σ(0,0)=I`, `σ(1,0)=X`, `σ(0,1)=Z` and
//! `σ(1,1)=Y`. Internally `Y = i·X·Z`, which gives the product rule in
//! [`PauliWord::mul`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use nalgebra::Complex;

use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 64;

/// Coefficients below this magnitude are dropped from Pauli sums.
pub const PRUNE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliWord {
    n_qubits: usize,
    x: u64,
    z: u64,
    /// Power of `i`, in `0..4`.
    phase: u8,
}

impl PauliWord {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        Self {
            n_qubits,
            x: 0,
            z: 0,
            phase: 0,
        }
    }

    pub fn new(n_qubits: usize, x: u64, z: u64) -> Self {
        assert!(n_qubits <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        let mask = if n_qubits == 64 {
            u64::MAX
        } else {
            (1u64 << n_qubits) - 1
        };
        assert!(x & !mask == 0 && z & !mask == 0, "mask exceeds qubit count");
        Self {
            n_qubits,
            x,
            z,
            phase: 0,
        }
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase % 4;
        self
    }

    /// Parses a dense label such as `"XIZY"`, qubit 0 first.
    pub fn from_label(label: &str) -> Result<Self> {
        let mut x = 0u64;
        let mut z = 0u64;
        let n = label.chars().count();
        if n > MAX_QUBITS {
            return Err(Error::Contract(format!("at most {MAX_QUBITS} qubits")));
        }
        for (q, c) in label.chars().enumerate() {
            match c {
                'I' => {}
                'X' => x |= 1 << q,
                'Z' => z |= 1 << q,
                'Y' => {
                    x |= 1 << q;
                    z |= 1 << q;
                }
                other => {
                    return Err(Error::Contract(format!("invalid Pauli letter {other:?}")));
                }
            }
        }
        Ok(Self::new(n, x, z))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn phase_factor(&self) -> Complex<f64> {
        i_pow(self.phase)
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// The same word with phase `+1`.
    pub fn normalized(&self) -> Self {
        Self { phase: 0, ..*self }
    }

    /// Symplectic parity `|x₁·z₂| + |z₁·x₂| mod 2`.
    pub fn anticommutes(&self, other: &Self) -> Result<bool> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Contract(format!(
                "qubit count mismatch: {} vs {}",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(self.anticommutes_unchecked(other))
    }

    #[inline]
    pub(crate) fn anticommutes_unchecked(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) & 1 == 1
    }

    /// Exact operator product `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n_qubits, other.n_qubits, "qubit count mismatch");
        let (x, z, k) = mul_masks(self.x, self.z, other.x, other.z);
        Self {
            n_qubits: self.n_qubits,
            x,
            z,
            phase: ((self.phase as u32 + other.phase as u32 + k) % 4) as u8,
        }
    }

    /// Pauli letter acting on qubit `q`.
    pub fn letter(&self, q: usize) -> char {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (0, 1) => 'Z',
            _ => 'Y',
        }
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["", "i", "-", "-i"][self.phase as usize];
        write!(f, "{prefix}")?;
        for q in 0..self.n_qubits {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

/// Product of two phase-free words: returns the resulting masks and the
/// power of `i` picked up.
#[inline]
pub(crate) fn mul_masks(x1: u64, z1: u64, x2: u64, z2: u64) -> (u64, u64, u32) {
    let x = x1 ^ x2;
    let z = z1 ^ z2;
    // Y-form words carry i^{|x∧z|}; moving Z^{z1} past X^{x2} gives (-1)^{|z1∧x2|}.
    let k = (x1 & z1).count_ones() + (x2 & z2).count_ones() + 2 * (z1 & x2).count_ones()
        + 3 * (x & z).count_ones();
    (x, z, k % 4)
}

#[inline]
pub(crate) fn i_pow(k: u8) -> Complex<f64> {
    match k % 4 {
        0 => Complex::new(1.0, 0.0),
        1 => Complex::new(0.0, 1.0),
        2 => Complex::new(-1.0, 0.0),
        _ => Complex::new(0.0, -1.0),
    }
}

/// Real linear combination of phase-normalized Pauli words.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<(u64, u64), f64>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        Self {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    /// Builds a sum from weighted words. Word phases must be real (±1) and are
    /// folded into the coefficient.
    pub fn from_terms(n_qubits: usize, terms: impl IntoIterator<Item = (PauliWord, f64)>) -> Self {
        let mut sum = Self::new(n_qubits);
        for (w, c) in terms {
            sum.add_term(&w, c);
        }
        sum.prune(PRUNE_TOL);
        sum
    }

    pub fn add_term(&mut self, word: &PauliWord, coeff: f64) {
        assert_eq!(word.n_qubits(), self.n_qubits, "qubit count mismatch");
        let sign = match word.phase {
            0 => 1.0,
            2 => -1.0,
            _ => panic!("imaginary phase in a real Pauli sum"),
        };
        *self.terms.entry((word.x, word.z)).or_insert(0.0) += sign * coeff;
    }

    pub fn prune(&mut self, tol: f64) {
        self.terms.retain(|_, c| c.abs() >= tol);
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in a deterministic (mask) order.
    pub fn iter(&self) -> impl Iterator<Item = (PauliWord, f64)> + '_ {
        self.terms
            .iter()
            .map(|(&(x, z), &c)| (PauliWord::new(self.n_qubits, x, z), c))
    }

    pub fn coefficient(&self, word: &PauliWord) -> f64 {
        self.terms.get(&(word.x, word.z)).copied().unwrap_or(0.0)
    }

    pub fn identity_coefficient(&self) -> f64 {
        self.terms.get(&(0, 0)).copied().unwrap_or(0.0)
    }

    pub fn without_identity(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&(0, 0));
        out
    }

    /// `Σ |d_q|` over non-identity terms.
    pub fn one_norm(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(k, _)| **k != (0, 0))
            .map(|(_, c)| c.abs())
            .sum()
    }

    pub fn count_above(&self, cutoff: f64) -> usize {
        self.terms
            .iter()
            .filter(|(k, c)| **k != (0, 0) && c.abs() > cutoff)
            .count()
    }
}

/// Complex-weighted Pauli sum used while expanding fermionic operators.
#[derive(Clone, Debug, Default)]
pub(crate) struct ComplexPauliSum {
    pub(crate) terms: HashMap<(u64, u64), Complex<f64>>,
}

impl ComplexPauliSum {
    pub(crate) fn add(&mut self, x: u64, z: u64, c: Complex<f64>) {
        *self.terms.entry((x, z)).or_insert(Complex::new(0.0, 0.0)) += c;
    }

    pub(crate) fn add_scaled(&mut self, other: &Self, scale: Complex<f64>) {
        for (&(x, z), &c) in &other.terms {
            self.add(x, z, c * scale);
        }
    }

    pub(crate) fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (&(x1, z1), &c1) in &self.terms {
            for (&(x2, z2), &c2) in &other.terms {
                let (x, z, k) = mul_masks(x1, z1, x2, z2);
                out.add(x, z, c1 * c2 * i_pow(k as u8));
            }
        }
        out
    }

    pub(crate) fn pruned(mut self, tol: f64) -> Self {
        self.terms.retain(|_, c| c.norm() >= tol);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(label: &str) -> PauliWord {
        PauliWord::from_label(label).unwrap()
    }

    #[test]
    fn single_qubit_algebra() {
        assert!(w("X").anticommutes(&w("Z")).unwrap());
        assert!(!w("X").anticommutes(&w("X")).unwrap());
        assert!(!w("XZ").anticommutes(&w("ZX")).unwrap());
        assert!(w("XZ").anticommutes(&w("ZZ")).unwrap());
    }

    #[test]
    fn anticommute_length_mismatch() {
        assert!(matches!(
            w("X").anticommutes(&w("XI")),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn products_with_phases() {
        // XZ = -iY, ZX = iY, XY = iZ, YX = -iZ
        assert_eq!(w("X").mul(&w("Z")), w("Y").with_phase(3));
        assert_eq!(w("Z").mul(&w("X")), w("Y").with_phase(1));
        assert_eq!(w("X").mul(&w("Y")), w("Z").with_phase(1));
        assert_eq!(w("Y").mul(&w("X")), w("Z").with_phase(3));
        assert_eq!(w("Y").mul(&w("Y")), w("I"));
        assert_eq!(w("YZ").mul(&w("ZY")), w("XX"));
    }

    #[test]
    fn sum_bookkeeping() {
        let s = PauliSum::from_terms(
            2,
            [
                (w("II"), 2.0),
                (w("XI"), 1.0),
                (w("XI"), -1.0),
                (w("ZZ").with_phase(2), 0.5),
            ],
        );
        assert_eq!(s.len(), 2);
        assert_eq!(s.coefficient(&w("ZZ")), -0.5);
        assert_eq!(s.identity_coefficient(), 2.0);
        assert_eq!(s.one_norm(), 0.5);
        assert_eq!(s.without_identity().len(), 1);
    }

    fn dense(word: &PauliWord) -> Vec<Vec<Complex<f64>>> {
        let dim = 1usize << word.n_qubits();
        let mut m = vec![vec![Complex::new(0.0, 0.0); dim]; dim];
        for col in 0..dim {
            let mut amp = word.phase_factor();
            let mut row = col;
            for q in 0..word.n_qubits() {
                let bit = (col >> q) & 1;
                amp *= match word.letter(q) {
                    'I' => Complex::new(1.0, 0.0),
                    'X' => {
                        row ^= 1 << q;
                        Complex::new(1.0, 0.0)
                    }
                    'Z' => Complex::new(if bit == 0 { 1.0 } else { -1.0 }, 0.0),
                    _ => {
                        row ^= 1 << q;
                        // Y|0> = i|1>, Y|1> = -i|0>
                        Complex::new(0.0, if bit == 0 { 1.0 } else { -1.0 })
                    }
                };
            }
            m[row][col] = amp;
        }
        m
    }

    fn matmul(a: &[Vec<Complex<f64>>], b: &[Vec<Complex<f64>>]) -> Vec<Vec<Complex<f64>>> {
        let n = a.len();
        let mut out = vec![vec![Complex::new(0.0, 0.0); n]; n];
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    out[i][j] += a[i][k] * b[k][j];
                }
            }
        }
        out
    }

    fn word_strategy(n: usize) -> impl Strategy<Value = PauliWord> {
        (0u64..(1 << n), 0u64..(1 << n), 0u8..4)
            .prop_map(move |(x, z, p)| PauliWord::new(n, x, z).with_phase(p))
    }

    proptest! {
        #[test]
        fn product_is_associative(a in word_strategy(5), b in word_strategy(5), c in word_strategy(5)) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }

        #[test]
        fn product_matches_matrices(a in word_strategy(3), b in word_strategy(3)) {
            let lhs = dense(&a.mul(&b));
            let rhs = matmul(&dense(&a), &dense(&b));
            for (r1, r2) in lhs.iter().zip(&rhs) {
                for (x, y) in r1.iter().zip(r2) {
                    prop_assert!((x - y).norm() < 1e-12);
                }
            }
        }

        #[test]
        fn commutation_matches_products(a in word_strategy(6), b in word_strategy(6)) {
            let ab = a.mul(&b);
            let ba = b.mul(&a);
            prop_assert_eq!(ab.normalized(), ba.normalized());
            let anti = ab.phase() != ba.phase();
            prop_assert_eq!(a.anticommutes(&b).unwrap(), anti);
        }
    }
}
