//! FCIDUMP reader and writer.
//!
//! Records are `value i j k l` with 1-based orbital indices:
//! `(ij|kl)` when all four are nonzero, the core one-body integral `t_ij` when
//! `k = l = 0`, and the scalar core energy when all four are zero.
//!
//! On load the chemist integrals are converted to the excitation-operator
//! convention used by [`MolecularHamiltonian`]:
//!
//! ```text
//! g_ijkl = (ij|kl) / 2,    h_ij = t_ij - Σ_k g_ikkj,    e0 = core energy
//! ```

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use regex::Regex;

use crate::error::{Error, Result};
use crate::hamiltonian::{MolecularHamiltonian, Tensor4, SYMMETRY_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct Fcidump {
    pub hamiltonian: MolecularHamiltonian,
    /// `NELEC` from the header; the default target electron count.
    pub n_elec: usize,
    pub ms2: i64,
}

pub fn load_fcidump(path: impl AsRef<Path>) -> Result<Fcidump> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_fcidump(&text, path)
}

fn header_field(header: &str, key: &str) -> Option<i64> {
    let re = Regex::new(&format!(r"(?i)\b{key}\s*=\s*(-?\d+)")).expect("static regex");
    re.captures(header)
        .and_then(|c| c.get(1))
        .and_then(|m| m.as_str().parse().ok())
}

/// Parses FCIDUMP text; `path` is only used in error messages.
pub fn parse_fcidump(text: &str, path: &Path) -> Result<Fcidump> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut lines = text.lines().enumerate();
    let mut header = String::new();
    let mut closed = false;
    let mut started = false;
    for (_, line) in lines.by_ref() {
        let trimmed = line.trim();
        if !started {
            if trimmed.is_empty() {
                continue;
            }
            if !trimmed.to_ascii_uppercase().starts_with("&FCI") {
                return Err(Error::Structure(format!(
                    "{}: missing &FCI header",
                    path.display()
                )));
            }
            started = true;
        }
        header.push_str(line);
        header.push('\n');
        let upper = trimmed.to_ascii_uppercase();
        if upper.ends_with("&END") || upper.ends_with('/') || upper == "$END" {
            closed = true;
            break;
        }
    }
    if !closed {
        return Err(Error::Structure(format!(
            "{}: header not terminated by &END or /",
            path.display()
        )));
    }
    let norb = header_field(&header, "NORB")
        .ok_or_else(|| Error::Structure(format!("{}: header lacks NORB", path.display())))?;
    if norb <= 0 {
        return Err(Error::Structure(format!("NORB must be positive, got {norb}")));
    }
    let n = norb as usize;
    let n_elec = header_field(&header, "NELEC").unwrap_or(0);
    if n_elec < 0 {
        return Err(Error::Structure(format!("NELEC must be nonnegative, got {n_elec}")));
    }
    let ms2 = header_field(&header, "MS2").unwrap_or(0);

    let mut eri = Tensor4::zeros(n);
    let mut eri_set = vec![false; n * n * n * n];
    let mut t = DMatrix::<f64>::zeros(n, n);
    let mut t_set = DMatrix::from_element(n, n, false);
    let mut core = 0.0;

    for (lineno, line) in lines {
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(parse_err(
                lineno,
                format!("expected `value i j k l`, found {} fields", fields.len()),
            ));
        }
        let value: f64 = fields[0]
            .replace(['D', 'd'], "e")
            .parse()
            .map_err(|_| parse_err(lineno, format!("invalid value {:?}", fields[0])))?;
        if !value.is_finite() {
            return Err(parse_err(lineno, "non-finite value".into()));
        }
        let mut idx = [0usize; 4];
        for (slot, f) in idx.iter_mut().zip(&fields[1..]) {
            *slot = f
                .parse()
                .map_err(|_| parse_err(lineno, format!("invalid index {f:?}")))?;
            if *slot > n {
                return Err(Error::Structure(format!(
                    "{}:{lineno}: orbital index {slot} exceeds NORB={n}",
                    path.display()
                )));
            }
        }
        match idx {
            [0, 0, 0, 0] => core = value,
            [i, j, 0, 0] if i > 0 && j > 0 => {
                for (a, b) in [(i - 1, j - 1), (j - 1, i - 1)] {
                    if t_set[(a, b)] && (t[(a, b)] - value).abs() > SYMMETRY_TOL {
                        return Err(Error::Validation(format!(
                            "{}:{lineno}: one-body integral ({i},{j}) disagrees with its transpose",
                            path.display()
                        )));
                    }
                    if !t_set[(a, b)] {
                        t[(a, b)] = value;
                        t_set[(a, b)] = true;
                    }
                }
            }
            // orbital energies; not part of the Hamiltonian
            [i, 0, 0, 0] if i > 0 => {}
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                for img in Tensor4::symmetric_images(i - 1, j - 1, k - 1, l - 1) {
                    let o = ((img[0] * n + img[1]) * n + img[2]) * n + img[3];
                    if eri_set[o] {
                        if (eri[img] - value).abs() > SYMMETRY_TOL {
                            return Err(Error::Validation(format!(
                                "{}:{lineno}: (ij|kl) = ({i}{j}|{k}{l}) disagrees with a symmetry-equivalent entry",
                                path.display()
                            )));
                        }
                    } else {
                        eri[img] = value;
                        eri_set[o] = true;
                    }
                }
            }
            _ => {
                return Err(Error::Structure(format!(
                    "{}:{lineno}: unrecognized index pattern {idx:?}",
                    path.display()
                )));
            }
        }
    }

    let mut g = eri;
    g.as_mut_slice().iter_mut().for_each(|v| *v *= 0.5);
    let h = DMatrix::from_fn(n, n, |i, j| {
        t[(i, j)] - (0..n).map(|k| g[[i, k, k, j]]).sum::<f64>()
    });
    let hamiltonian = MolecularHamiltonian::new(core, h, g)?;
    Ok(Fcidump {
        hamiltonian,
        n_elec: n_elec as usize,
        ms2,
    })
}

/// Serializes `ham` back to chemist integrals, emitting only the
/// symmetry-unique entries `i≥j, k≥l, (ij)≥(kl)` with 16 significant digits.
pub fn write_fcidump(ham: &MolecularHamiltonian, n_elec: usize, ms2: i64) -> String {
    let n = ham.n_orbitals();
    let mut out = String::new();
    let orbsym = "1,".repeat(n);
    let _ = writeln!(out, " &FCI NORB={n},NELEC={n_elec},MS2={ms2},");
    let _ = writeln!(out, "  ORBSYM={orbsym}");
    let _ = writeln!(out, "  ISYM=1,");
    let _ = writeln!(out, " &END");
    let g = ham.two_body();
    let pair = |a: usize, b: usize| a * (a + 1) / 2 + b;
    for i in 0..n {
        for j in 0..=i {
            for k in 0..n {
                for l in 0..=k {
                    if pair(i, j) < pair(k, l) {
                        continue;
                    }
                    let v = 2.0 * g[[i, j, k, l]];
                    if v != 0.0 {
                        write_record(&mut out, v, [i + 1, j + 1, k + 1, l + 1]);
                    }
                }
            }
        }
    }
    let t = ham.normal_ordered_one_body();
    for i in 0..n {
        for j in 0..=i {
            let v = t[(i, j)];
            if v != 0.0 {
                write_record(&mut out, v, [i + 1, j + 1, 0, 0]);
            }
        }
    }
    write_record(&mut out, ham.e0(), [0, 0, 0, 0]);
    out
}

fn write_record(out: &mut String, value: f64, idx: [usize; 4]) {
    let _ = writeln!(
        out,
        "{value:>24.15e} {:>4} {:>4} {:>4} {:>4}",
        idx[0], idx[1], idx[2], idx[3]
    );
}

pub fn save_fcidump(
    path: impl AsRef<Path>,
    ham: &MolecularHamiltonian,
    n_elec: usize,
    ms2: i64,
) -> Result<()> {
    std::fs::write(path, write_fcidump(ham, n_elec, ms2))?;
    Ok(())
}
