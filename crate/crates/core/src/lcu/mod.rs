//! Linear-combination-of-unitaries decompositions and their 1-norms.
//!
//! Constant terms never enter a 1-norm.

pub mod ac;
pub mod csa;
pub mod df;
pub mod orbital;
pub mod pauli;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::MolecularHamiltonian;
use crate::pauli::PauliSum;
use crate::shift::ShiftKind;

pub use ac::{ac_grouping, ac_one_norm, AnticommutingGroup};
pub use csa::{csa_greedy, csa_one_norm, CSADecomposition, CSAFragment};
pub use df::{df_decompose, df_one_norm, DFFragment};
pub use orbital::{orbital_optimize, OrbitalOptimization, OrbitalOptions};
pub use pauli::{majorana_term_count, pauli_one_norm};

/// Default coefficient threshold for counting unitaries.
pub const DEFAULT_CUTOFF: f64 = 1e-6;

/// Eigenvalues `μ_i` of `h_ij + 2 Σ_k g_ijkk` and `λ1 = Σ|μ_i|`.
pub fn one_body_corrected_norm(ham: &MolecularHamiltonian) -> (Vec<f64>, f64) {
    let mu: Vec<f64> = ham
        .corrected_one_body()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    let l1 = mu.iter().map(|m| m.abs()).sum();
    (mu, l1)
}

#[derive(Clone, Debug)]
pub enum Decomposition {
    Pauli(PauliSum),
    Anticommuting(Vec<AnticommutingGroup>),
    Csa {
        mu: Vec<f64>,
        fragments: Vec<CSAFragment>,
    },
    Df {
        mu: Vec<f64>,
        fragments: Vec<DFFragment>,
    },
}

impl Decomposition {
    pub fn one_norm(&self) -> f64 {
        match self {
            Decomposition::Pauli(sum) => sum.one_norm(),
            Decomposition::Anticommuting(groups) => ac_one_norm(groups),
            Decomposition::Csa { mu, fragments } => csa_one_norm(fragments, mu),
            Decomposition::Df { mu, fragments } => df_one_norm(fragments, mu),
        }
    }
}

/// Unitaries with coefficient magnitude above `cutoff`.
///
/// Pauli: non-identity words. AC: groups. CSA and DF: two spin reflections
/// per one-body eigenvalue, plus reflection products per CSA fragment or
/// one unitary per DF fragment.
pub fn count_unitaries(d: &Decomposition, cutoff: f64) -> usize {
    let one_body = |mu: &[f64]| 2 * mu.iter().filter(|m| m.abs() > cutoff).count();
    match d {
        Decomposition::Pauli(sum) => sum.without_identity().count_above(cutoff),
        Decomposition::Anticommuting(groups) => {
            groups.iter().filter(|g| g.norm() > cutoff).count()
        }
        Decomposition::Csa { mu, fragments } => {
            one_body(mu)
                + fragments
                    .iter()
                    .map(|f| f.unitary_count(cutoff))
                    .sum::<usize>()
        }
        Decomposition::Df { mu, fragments } => {
            one_body(mu) + fragments.iter().filter(|f| f.one_norm() > cutoff).count()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Method {
    Pauli,
    #[serde(rename = "OO-Pauli")]
    OoPauli,
    #[serde(rename = "AC")]
    Ac,
    #[serde(rename = "OO-AC")]
    OoAc,
    #[serde(rename = "DF")]
    Df,
    #[serde(rename = "GCSA")]
    Gcsa,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Pauli,
        Method::OoPauli,
        Method::Ac,
        Method::OoAc,
        Method::Df,
        Method::Gcsa,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Method::Pauli => "Pauli",
            Method::OoPauli => "OO-Pauli",
            Method::Ac => "AC",
            Method::OoAc => "OO-AC",
            Method::Df => "DF",
            Method::Gcsa => "GCSA",
        }
    }

    pub fn needs_orbital_optimization(self) -> bool {
        matches!(self, Method::OoPauli | Method::OoAc)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pauli" => Ok(Method::Pauli),
            "oo-pauli" => Ok(Method::OoPauli),
            "ac" => Ok(Method::Ac),
            "oo-ac" => Ok(Method::OoAc),
            "df" => Ok(Method::Df),
            "gcsa" | "csa" => Ok(Method::Gcsa),
            other => Err(Error::Config(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LcuReport {
    pub method: Method,
    pub shift: ShiftKind,
    pub one_norm: f64,
    pub unitary_count: usize,
    /// Optimizer or greedy fit reached its own stopping test.
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct MethodOptions {
    pub cutoff: f64,
    pub csa_tol: f64,
    pub seed: u64,
    pub orbital: OrbitalOptions,
}

impl Default for MethodOptions {
    fn default() -> Self {
        Self {
            cutoff: DEFAULT_CUTOFF,
            csa_tol: csa::CSA_DEFAULT_TOL,
            seed: 0,
            orbital: OrbitalOptions::default(),
        }
    }
}

/// AC groups over the Majorana-product terms (unmerged, see
/// [`pauli::majorana_terms`]).
fn ac_report(ham: &MolecularHamiltonian, cutoff: f64) -> Result<(f64, usize)> {
    let groups = ac::ac_grouping_terms(pauli::majorana_terms(ham)?);
    let count = count_unitaries(&Decomposition::Anticommuting(groups.clone()), cutoff);
    Ok((ac_one_norm(&groups), count))
}

/// 1-norms and unitary counts of `ham` under each requested method. The
/// orbital optimization is run once and shared by the OO variants.
pub fn evaluate_methods(
    ham: &MolecularHamiltonian,
    methods: &[Method],
    shift: ShiftKind,
    opts: &MethodOptions,
) -> Result<Vec<LcuReport>> {
    let oo = methods
        .iter()
        .any(|m| m.needs_orbital_optimization())
        .then(|| orbital_optimize(ham, &opts.orbital));
    let (mu, _) = one_body_corrected_norm(ham);
    let mut out = Vec::with_capacity(methods.len());
    for &method in methods {
        let (one_norm, unitary_count, converged) = match method {
            Method::Pauli => (pauli_one_norm(ham), majorana_term_count(ham, opts.cutoff), true),
            Method::OoPauli => {
                let oo = oo.as_ref().expect("computed above");
                (
                    oo.norm_after,
                    majorana_term_count(&oo.rotated, opts.cutoff),
                    oo.converged,
                )
            }
            Method::Ac => {
                let (l, c) = ac_report(ham, opts.cutoff)?;
                (l, c, true)
            }
            Method::OoAc => {
                let oo = oo.as_ref().expect("computed above");
                let (l, c) = ac_report(&oo.rotated, opts.cutoff)?;
                (l, c, oo.converged)
            }
            Method::Df => {
                let d = Decomposition::Df {
                    mu: mu.clone(),
                    fragments: df_decompose(ham.two_body()),
                };
                (d.one_norm(), count_unitaries(&d, opts.cutoff), true)
            }
            Method::Gcsa => {
                let fit = csa_greedy(ham.two_body(), opts.csa_tol, None, opts.seed);
                let d = Decomposition::Csa {
                    mu: mu.clone(),
                    fragments: fit.fragments,
                };
                (d.one_norm(), count_unitaries(&d, opts.cutoff), fit.complete)
            }
        };
        out.push(LcuReport {
            method,
            shift,
            one_norm,
            unitary_count,
            converged,
        });
    }
    Ok(out)
}
