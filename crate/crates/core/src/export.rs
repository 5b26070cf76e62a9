//! Shifted Hamiltonians as integral files plus a JSON sidecar holding the
//! shift parameters.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fcidump::{load_fcidump, save_fcidump, Fcidump};
use crate::shift::{ShiftParameters, ShiftResult};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftSidecar {
    pub kappa1: f64,
    pub kappa2: f64,
    pub xi: Vec<Vec<f64>>,
    pub n_elec: usize,
    pub norm_before: f64,
    pub norm_after: f64,
    pub converged: bool,
    pub tool_version: String,
}

impl ShiftSidecar {
    pub fn from_result(r: &ShiftResult) -> Self {
        let xi = r.params.xi();
        Self {
            kappa1: r.params.kappa1(),
            kappa2: r.params.kappa2(),
            xi: xi.row_iter().map(|row| row.iter().copied().collect()).collect(),
            n_elec: r.params.n_elec(),
            norm_before: r.norm_before,
            norm_after: r.norm_after,
            converged: r.converged,
            tool_version: TOOL_VERSION.to_string(),
        }
    }

    pub fn params(&self) -> Result<ShiftParameters> {
        let n = self.xi.len();
        if self.xi.iter().any(|row| row.len() != n) {
            return Err(Error::Schema("xi is not a square matrix".into()));
        }
        let xi = DMatrix::from_fn(n, n, |i, j| self.xi[i][j]);
        ShiftParameters::new(self.kappa1, self.kappa2, xi, self.n_elec)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }
}

/// Sidecar location for an exported integral file: `x.fcidump` → `x.shift.json`.
pub fn sidecar_path(fcidump: &Path) -> PathBuf {
    fcidump.with_extension("shift.json")
}

/// Writes `r.shifted` to `path` and its parameters next to it.
pub fn export_shifted(r: &ShiftResult, ms2: i64, path: &Path) -> Result<PathBuf> {
    save_fcidump(path, &r.shifted, r.params.n_elec(), ms2)?;
    let side = sidecar_path(path);
    let json = serde_json::to_string_pretty(&ShiftSidecar::from_result(r))
        .expect("plain data serializes");
    std::fs::write(&side, json + "\n")?;
    Ok(side)
}

/// Loads an exported Hamiltonian together with its sidecar.
pub fn load_shifted(path: &Path) -> Result<(Fcidump, ShiftSidecar)> {
    let f = load_fcidump(path)?;
    let side = ShiftSidecar::parse(&std::fs::read_to_string(sidecar_path(path))?)?;
    if side.xi.len() != f.hamiltonian.n_orbitals() {
        return Err(Error::Schema(format!(
            "sidecar xi is {0}x{0} but the Hamiltonian has {1} orbitals",
            side.xi.len(),
            f.hamiltonian.n_orbitals()
        )));
    }
    Ok((f, side))
}
