//! Exact spectral ranges over Fock space and electron-number sectors.
//!
//! Number-conserving, spin-free Hamiltonians are block diagonal in
//! `(n_alpha, n_beta)`, so every range is assembled from independent blocks.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{block_dim, DeterminantBasis, SpinOrbitalIntegrals};
use crate::hamiltonian::MolecularHamiltonian;
use crate::lanczos::extremal_eigenvalues;
use crate::sparse::CsrMatrix;

/// Blocks at least this large use Lanczos instead of a dense solve.
pub const DENSE_LIMIT: usize = 1000;
/// Largest sector assembled as an explicit dense matrix.
pub const MAX_DENSE_SECTOR: usize = 4000;
pub const MAX_FULL_QUBITS: usize = 16;
pub const MAX_SECTOR_DIM: usize = 200_000;
const LANCZOS_TOL: f64 = 1e-11;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Range {
    pub e_min: f64,
    pub e_max: f64,
}

impl Range {
    pub fn width(&self) -> f64 {
        self.e_max - self.e_min
    }

    fn merge(self, other: Range) -> Range {
        Range {
            e_min: self.e_min.min(other.e_min),
            e_max: self.e_max.max(other.e_max),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectorRange {
    pub n_elec: usize,
    pub e_min: f64,
    pub e_max: f64,
    pub delta_e: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    pub e_min_full: f64,
    pub e_max_full: f64,
    pub delta_e: f64,
    pub sector: Option<SectorRange>,
}

fn block_range(ints: &SpinOrbitalIntegrals, n: usize, na: usize, nb: usize) -> Range {
    let basis = DeterminantBasis::new(n, na, nb);
    let m = ints.block_matrix(&basis);
    if m.dim() < DENSE_LIMIT {
        let ev = m.to_dense().symmetric_eigenvalues();
        Range {
            e_min: ev.min(),
            e_max: ev.max(),
        }
    } else {
        let seed = (na * 64 + nb) as u64;
        let (e_min, e_max) = extremal_eigenvalues(&m, LANCZOS_TOL, seed);
        Range { e_min, e_max }
    }
}

fn blocks_for(n: usize, n_elec: usize) -> Vec<(usize, usize)> {
    (0..=n_elec.min(n))
        .filter(|&na| n_elec - na <= n)
        .map(|na| (na, n_elec - na))
        .collect()
}

fn ranges_over(ham: &MolecularHamiltonian, blocks: Vec<(usize, usize)>) -> Vec<((usize, usize), Range)> {
    let n = ham.n_orbitals();
    let ints = SpinOrbitalIntegrals::new(ham);
    // large blocks first so the pool stays busy
    let mut blocks = blocks;
    blocks.sort_by_key(|&(a, b)| std::cmp::Reverse(block_dim(n, a, b)));
    let mut out: Vec<_> = blocks
        .into_par_iter()
        .map(|(na, nb)| ((na, nb), block_range(&ints, n, na, nb)))
        .collect();
    out.sort_by_key(|(k, _)| *k);
    out
}

fn check_sector(ham: &MolecularHamiltonian, n_elec: usize) -> Result<()> {
    let n = ham.n_orbitals();
    if n_elec > 2 * n {
        return Err(Error::Contract(format!(
            "sector with {n_elec} electrons does not exist for {n} orbitals"
        )));
    }
    let dim: usize = blocks_for(n, n_elec)
        .iter()
        .map(|&(a, b)| block_dim(n, a, b))
        .sum();
    if dim > MAX_SECTOR_DIM {
        return Err(Error::TooLarge(format!(
            "sector dimension {dim} exceeds {MAX_SECTOR_DIM}"
        )));
    }
    Ok(())
}

/// Extremes over every occupation sector, plus the `n_elec` sector when
/// given.
pub fn full_spectral_range(ham: &MolecularHamiltonian, n_elec: Option<usize>) -> Result<SpectralReport> {
    let n = ham.n_orbitals();
    if 2 * n > MAX_FULL_QUBITS {
        return Err(Error::TooLarge(format!(
            "full Fock space limited to {MAX_FULL_QUBITS} spin orbitals, got {}",
            2 * n
        )));
    }
    if let Some(ne) = n_elec {
        check_sector(ham, ne)?;
    }
    let blocks: Vec<(usize, usize)> = (0..=n)
        .flat_map(|a| (0..=n).map(move |b| (a, b)))
        .collect();
    let ranges = ranges_over(ham, blocks);
    let full = ranges
        .iter()
        .map(|(_, r)| *r)
        .reduce(Range::merge)
        .expect("vacuum block always present");
    let sector = n_elec.map(|ne| {
        let r = ranges
            .iter()
            .filter(|((a, b), _)| a + b == ne)
            .map(|(_, r)| *r)
            .reduce(Range::merge)
            .expect("sector validated above");
        SectorRange {
            n_elec: ne,
            e_min: r.e_min,
            e_max: r.e_max,
            delta_e: r.width(),
        }
    });
    Ok(SpectralReport {
        e_min_full: full.e_min,
        e_max_full: full.e_max,
        delta_e: full.width(),
        sector,
    })
}

/// Extremes within the `n_elec`-electron sector (all spin projections).
pub fn sector_spectral_range(ham: &MolecularHamiltonian, n_elec: usize) -> Result<SectorRange> {
    check_sector(ham, n_elec)?;
    let r = ranges_over(ham, blocks_for(ham.n_orbitals(), n_elec))
        .into_iter()
        .map(|(_, r)| r)
        .reduce(Range::merge)
        .expect("at least one block");
    Ok(SectorRange {
        n_elec,
        e_min: r.e_min,
        e_max: r.e_max,
        delta_e: r.width(),
    })
}

/// Matrix of `H` on the `n_elec` sector with blocks stacked in increasing
/// `n_alpha`.
pub fn sector_matrix(ham: &MolecularHamiltonian, n_elec: usize) -> Result<DMatrix<f64>> {
    check_sector(ham, n_elec)?;
    let n = ham.n_orbitals();
    let ints = SpinOrbitalIntegrals::new(ham);
    let blocks: Vec<CsrMatrix<f64>> = blocks_for(n, n_elec)
        .into_iter()
        .map(|(a, b)| ints.block_matrix(&DeterminantBasis::new(n, a, b)))
        .collect();
    let dim: usize = blocks.iter().map(|b| b.dim()).sum();
    if dim > MAX_DENSE_SECTOR {
        return Err(Error::TooLarge(format!(
            "dense sector matrix limited to {MAX_DENSE_SECTOR}, got {dim}"
        )));
    }
    let mut out = DMatrix::zeros(dim, dim);
    let mut offset = 0;
    for b in &blocks {
        let d = b.to_dense();
        out.view_mut((offset, offset), (b.dim(), b.dim())).copy_from(&d);
        offset += b.dim();
    }
    Ok(out)
}

/// All eigenvalues of the sector, ascending.
pub fn sector_eigenvalues(ham: &MolecularHamiltonian, n_elec: usize) -> Result<Vec<f64>> {
    let m = sector_matrix(ham, n_elec)?;
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Largest deviation between the sorted sector spectra of two Hamiltonians.
pub fn sector_isospectrality(
    a: &MolecularHamiltonian,
    b: &MolecularHamiltonian,
    n_elec: usize,
) -> Result<f64> {
    if a.n_orbitals() != b.n_orbitals() {
        return Err(Error::Contract(format!(
            "orbital counts differ: {} vs {}",
            a.n_orbitals(),
            b.n_orbitals()
        )));
    }
    let ea = sector_eigenvalues(a, n_elec)?;
    let eb = sector_eigenvalues(b, n_elec)?;
    Ok(ea
        .iter()
        .zip(&eb)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::Tensor4;
    use crate::shift::ShiftParameters;
    use crate::testutil::random_hamiltonian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_orbital_number_operator() {
        let h = DMatrix::from_element(1, 1, 1.0);
        let ham = MolecularHamiltonian::new(0.0, h, Tensor4::zeros(1)).unwrap();
        let r = full_spectral_range(&ham, None).unwrap();
        assert_eq!((r.e_min_full, r.e_max_full, r.delta_e), (0.0, 2.0, 2.0));
    }

    #[test]
    fn vacuum_sector() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ham = random_hamiltonian(3, &mut rng);
        let s = sector_spectral_range(&ham, 0).unwrap();
        assert_eq!(s.delta_e, 0.0);
        assert!((s.e_min - ham.e0()).abs() < 1e-15);
    }

    #[test]
    fn sector_inside_full_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ham = random_hamiltonian(3, &mut rng);
        let r = full_spectral_range(&ham, Some(3)).unwrap();
        let s = r.sector.unwrap();
        assert!(r.delta_e >= s.delta_e && s.delta_e >= 0.0);
        assert_eq!(s, sector_spectral_range(&ham, 3).unwrap());
    }

    #[test]
    fn shifted_sector_is_isospectral() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ham = random_hamiltonian(3, &mut rng);
        let s = ShiftParameters::random(3, 2, &mut rng);
        let shifted = ham.absorb_shift(&s).unwrap();
        assert!(sector_isospectrality(&ham, &shifted, 2).unwrap() < 1e-9);
        assert!(sector_isospectrality(&ham, &shifted, 3).unwrap() > 1e-6);
        assert_eq!(sector_isospectrality(&ham, &ham, 4).unwrap(), 0.0);
    }

    #[test]
    fn lanczos_block_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ham = random_hamiltonian(7, &mut rng);
        let ints = SpinOrbitalIntegrals::new(&ham);
        let basis = DeterminantBasis::new(7, 3, 4);
        assert!(basis.len() >= DENSE_LIMIT);
        let ev = ints.block_matrix(&basis).to_dense().symmetric_eigenvalues();
        let r = block_range(&ints, 7, 3, 4);
        assert!((r.e_min - ev.min()).abs() < 1e-8);
        assert!((r.e_max - ev.max()).abs() < 1e-8);
    }

    #[test]
    fn guards() {
        let ham = MolecularHamiltonian::zeros(9);
        assert!(matches!(full_spectral_range(&ham, None), Err(Error::TooLarge(_))));
        assert!(matches!(sector_spectral_range(&ham, 19), Err(Error::Contract(_))));
        let big = MolecularHamiltonian::zeros(12);
        assert!(matches!(sector_spectral_range(&big, 12), Err(Error::TooLarge(_))));
    }
}
