//! Batch analysis over integral files and report rendering.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::TOOL_VERSION;
use crate::fcidump::load_fcidump;
use crate::fit::{scaling_fit, FitResult};
use crate::hamiltonian::MolecularHamiltonian;
use crate::lcu::{evaluate_methods, LcuReport, Method, MethodOptions, OrbitalOptions, DEFAULT_CUTOFF};
use crate::shift::{optimize_bliss_from, optimize_symmetry_shift, ShiftKind};
use crate::spectral::{self, MAX_FULL_QUBITS};

pub const SCHEMA_VERSION: u32 = 1;

/// Slack allowed when checking `λ ≥ ΔE/2`.
pub const NORM_BOUND_SLACK: f64 = 1e-6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Markdown,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            other => Err(Error::Config(format!("unknown output format '{other}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub n_elec_override: Option<usize>,
    pub methods: Vec<Method>,
    pub shifts: Vec<ShiftKind>,
    pub cutoff: f64,
    pub seed: u64,
    pub format: OutputFormat,
    /// Worker threads across molecules; `None` uses the global pool.
    pub jobs: Option<usize>,
    /// Compute spectral ranges where the size guards allow.
    pub spectral: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            inputs: Vec::new(),
            n_elec_override: None,
            methods: Method::ALL.to_vec(),
            shifts: ShiftKind::ALL.to_vec(),
            cutoff: DEFAULT_CUTOFF,
            seed: 0,
            format: OutputFormat::Json,
            jobs: None,
            spectral: true,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.inputs.is_empty() {
            return Err(Error::Config("no input files".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("method list is empty".into()));
        }
        if self.shifts.is_empty() {
            return Err(Error::Config("shift list is empty".into()));
        }
        if !(self.cutoff >= 0.0 && self.cutoff.is_finite()) {
            return Err(Error::Config(format!("cutoff {} must be finite and >= 0", self.cutoff)));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        Ok(())
    }

    fn method_options(&self) -> MethodOptions {
        MethodOptions {
            cutoff: self.cutoff,
            seed: self.seed,
            orbital: OrbitalOptions {
                seed: self.seed,
                ..OrbitalOptions::default()
            },
            ..MethodOptions::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShiftRow {
    pub shift: ShiftKind,
    pub kappa1: Option<f64>,
    pub kappa2: Option<f64>,
    pub shift_converged: Option<bool>,
    pub half_delta_e: Option<f64>,
    pub half_delta_e_sector: Option<f64>,
    pub methods: Vec<LcuReport>,
    /// Every 1-norm in the row is at least `ΔE/2` (minus slack).
    pub norm_bound_ok: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MoleculeReport {
    pub name: String,
    pub path: String,
    /// Orbital set recorded next to the integral file, if any.
    pub orbitals: Option<String>,
    pub n_orbitals: Option<usize>,
    pub n_elec: Option<usize>,
    pub rows: Vec<ShiftRow>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub cutoff: f64,
    pub seed: u64,
    pub molecules: Vec<MoleculeReport>,
}

impl Report {
    pub fn failed(&self) -> usize {
        self.molecules.iter().filter(|m| m.error.is_some()).count()
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => render_json(self),
            OutputFormat::Csv => render_csv(self),
            OutputFormat::Markdown => render_markdown(self),
        }
    }
}

/// Reads `orbitals` from `<stem>.meta.json` beside the input, if present.
pub fn orbital_provenance(path: &Path) -> Option<String> {
    let meta = path.with_extension("meta.json");
    let text = std::fs::read_to_string(meta).ok()?;
    let v: serde_json::Value = serde_json::from_str(&text).ok()?;
    v.get("orbitals")?.as_str().map(str::to_string)
}

fn molecule_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn spectral_row(
    ham: &MolecularHamiltonian,
    n_elec: usize,
) -> (Option<f64>, Option<f64>) {
    let full = if 2 * ham.n_orbitals() <= MAX_FULL_QUBITS {
        match spectral::full_spectral_range(ham, Some(n_elec)) {
            Ok(r) => return (Some(0.5 * r.delta_e), r.sector.map(|s| 0.5 * s.delta_e)),
            Err(e) => {
                warn!("full spectral range skipped: {e}");
                None
            }
        }
    } else {
        None
    };
    let sector = match spectral::sector_spectral_range(ham, n_elec) {
        Ok(s) => Some(0.5 * s.delta_e),
        Err(e) => {
            warn!("sector spectral range skipped: {e}");
            None
        }
    };
    (full, sector)
}

fn analyze_molecule(path: &Path, cfg: &RunConfig) -> Result<(usize, usize, Vec<ShiftRow>)> {
    let f = load_fcidump(path)?;
    let ham = f.hamiltonian;
    let n_elec = cfg.n_elec_override.unwrap_or(f.n_elec);
    let opts = cfg.method_options();
    let want = |k: ShiftKind| cfg.shifts.contains(&k);

    let s = if want(ShiftKind::Symmetry) || want(ShiftKind::Bliss) {
        Some(optimize_symmetry_shift(&ham, n_elec)?)
    } else {
        None
    };
    let t = if want(ShiftKind::Bliss) {
        Some(optimize_bliss_from(&ham, s.as_ref().expect("computed above"))?)
    } else {
        None
    };

    let mut rows = Vec::new();
    for kind in ShiftKind::ALL.into_iter().filter(|k| want(*k)) {
        let (target, result) = match kind {
            ShiftKind::None => (&ham, None),
            ShiftKind::Symmetry => {
                let r = s.as_ref().expect("computed above");
                (&r.shifted, Some(r))
            }
            ShiftKind::Bliss => {
                let r = t.as_ref().expect("computed above");
                (&r.shifted, Some(r))
            }
        };
        let methods = evaluate_methods(target, &cfg.methods, kind, &opts)?;
        let (half_delta_e, half_delta_e_sector) = if cfg.spectral {
            spectral_row(target, n_elec)
        } else {
            (None, None)
        };
        let norm_bound_ok = half_delta_e.map(|b| {
            methods
                .iter()
                .all(|m| m.one_norm >= b - NORM_BOUND_SLACK)
        });
        rows.push(ShiftRow {
            shift: kind,
            kappa1: result.map(|r| r.params.kappa1()),
            kappa2: result.map(|r| r.params.kappa2()),
            shift_converged: result.map(|r| r.converged),
            half_delta_e,
            half_delta_e_sector,
            methods,
            norm_bound_ok,
        });
    }
    Ok((ham.n_orbitals(), n_elec, rows))
}

fn molecule_report(path: &Path, cfg: &RunConfig) -> MoleculeReport {
    let name = molecule_name(path);
    info!("analyzing {}", path.display());
    let (n_orbitals, n_elec, rows, error) = match analyze_molecule(path, cfg) {
        Ok((n, ne, rows)) => (Some(n), Some(ne), rows, None),
        Err(e) => {
            warn!("{}: {e}", path.display());
            (None, None, Vec::new(), Some(e.to_string()))
        }
    };
    MoleculeReport {
        name,
        path: path.display().to_string(),
        orbitals: orbital_provenance(path),
        n_orbitals,
        n_elec,
        rows,
        error,
    }
}

/// Runs every molecule and shift in `cfg`. Per-molecule failures are
/// recorded in the report rather than aborting the run.
pub fn run_analysis(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let run = || -> Vec<MoleculeReport> {
        cfg.inputs
            .par_iter()
            .map(|p| molecule_report(p, cfg))
            .collect()
    };
    let molecules = match cfg.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(run),
        None => run(),
    };
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        cutoff: cfg.cutoff,
        seed: cfg.seed,
        molecules,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub name: String,
    pub n_orbitals: usize,
    pub one_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingSeries {
    pub method: Method,
    pub shift: ShiftKind,
    /// Distinct orbital labels among the inputs.
    pub orbitals: Vec<String>,
    pub points: Vec<ScalingPoint>,
    pub fit: Option<FitResult>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub series: Vec<ScalingSeries>,
    pub failures: Vec<String>,
}

/// Fits `log10 λ = α log10 N + β` per (method, shift) over the inputs,
/// taking `N` as the orbital count.
pub fn run_scaling(cfg: &RunConfig) -> Result<ScalingReport> {
    let cfg = RunConfig {
        spectral: false,
        ..cfg.clone()
    };
    let report = run_analysis(&cfg)?;
    let failures = report
        .molecules
        .iter()
        .filter_map(|m| m.error.as_ref().map(|e| format!("{}: {e}", m.name)))
        .collect();
    let mut orbitals: Vec<String> = report
        .molecules
        .iter()
        .filter(|m| m.error.is_none())
        .map(|m| m.orbitals.clone().unwrap_or_else(|| "unknown".into()))
        .collect();
    orbitals.sort();
    orbitals.dedup();

    let mut series = Vec::new();
    for &shift in ShiftKind::ALL.iter().filter(|k| cfg.shifts.contains(k)) {
        for &method in &cfg.methods {
            let mut points: Vec<ScalingPoint> = report
                .molecules
                .iter()
                .filter_map(|m| {
                    let row = m.rows.iter().find(|r| r.shift == shift)?;
                    let l = row.methods.iter().find(|l| l.method == method)?;
                    Some(ScalingPoint {
                        name: m.name.clone(),
                        n_orbitals: m.n_orbitals?,
                        one_norm: l.one_norm,
                    })
                })
                .collect();
            points.sort_by(|a, b| a.n_orbitals.cmp(&b.n_orbitals).then(a.name.cmp(&b.name)));
            let sizes: Vec<usize> = points.iter().map(|p| p.n_orbitals).collect();
            let norms: Vec<f64> = points.iter().map(|p| p.one_norm).collect();
            let (fit, error) = match scaling_fit(&sizes, &norms) {
                Ok(f) => (Some(f), None),
                Err(e) => (None, Some(e.to_string())),
            };
            series.push(ScalingSeries {
                method,
                shift,
                orbitals: orbitals.clone(),
                points,
                fit,
                error,
            });
        }
    }
    Ok(ScalingReport {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        series,
        failures,
    })
}

fn render_json(r: &Report) -> String {
    serde_json::to_string_pretty(r).expect("plain data serializes") + "\n"
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn render_csv(r: &Report) -> String {
    let mut out = String::from(
        "molecule,shift,method,one_norm,unitary_count,converged,half_delta_e,half_delta_e_sector,error\n",
    );
    for m in &r.molecules {
        if let Some(e) = &m.error {
            let _ = writeln!(out, "{},,,,,,,,\"{}\"", m.name, e.replace('"', "'"));
            continue;
        }
        for row in &m.rows {
            for l in &row.methods {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},",
                    m.name,
                    row.shift.label(),
                    l.method.label(),
                    l.one_norm,
                    l.unitary_count,
                    l.converged,
                    opt(row.half_delta_e),
                    opt(row.half_delta_e_sector)
                );
            }
        }
    }
    out
}

/// Three significant figures, as in the usual published tables.
fn sig3(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let digits = (2 - x.abs().log10().floor() as i32).max(0) as usize;
    format!("{x:.digits$}")
}

fn render_markdown(r: &Report) -> String {
    let methods: Vec<Method> = r
        .molecules
        .iter()
        .flat_map(|m| m.rows.iter())
        .flat_map(|row| row.methods.iter().map(|l| l.method))
        .fold(Vec::new(), |mut acc, m| {
            if !acc.contains(&m) {
                acc.push(m);
            }
            acc
        });
    let mut out = String::from("| System | Shift |");
    for m in &methods {
        let _ = write!(out, " {} |", m.label());
    }
    out.push_str(" ΔE/2 | ΔE_Ne/2 |\n|---|---|");
    out.push_str(&"---|".repeat(methods.len() + 2));
    out.push('\n');
    for mol in &r.molecules {
        if let Some(e) = &mol.error {
            let _ = writeln!(out, "| {} | error: {} |", mol.name, e);
            continue;
        }
        for (k, row) in mol.rows.iter().enumerate() {
            let name = if k == 0 { mol.name.as_str() } else { "" };
            let _ = write!(out, "| {name} | {} |", row.shift.label());
            for m in &methods {
                match row.methods.iter().find(|l| l.method == *m) {
                    Some(l) => {
                        let _ = write!(out, " {} ({}) |", sig3(l.one_norm), l.unitary_count);
                    }
                    None => out.push_str(" |"),
                }
            }
            let _ = writeln!(
                out,
                " {} | {} |",
                row.half_delta_e.map(sig3).unwrap_or_default(),
                row.half_delta_e_sector.map(sig3).unwrap_or_default()
            );
        }
    }
    out
}
