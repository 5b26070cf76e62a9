use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bliss_core::export::{export_shifted, ShiftSidecar};
use bliss_core::fcidump::load_fcidump;
use bliss_core::fit::{linear_fit, proportional_fit, scaling_fit, FitResult};
use bliss_core::lcu::{Method, DEFAULT_CUTOFF};
use bliss_core::report::{run_analysis, run_scaling, OutputFormat, RunConfig};
use bliss_core::shift::{optimize_bliss_from, optimize_symmetry_shift};
use bliss_core::{Error, ShiftKind};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::error;
use serde::Deserialize;

const EXIT_PARTIAL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "bliss", version, about = "Symmetry-shift preprocessing and LCU 1-norm analysis of molecular Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-molecule 1-norms, unitary counts and spectral ranges.
    Analyze(RunArgs),
    /// Optimize shift parameters and print them as JSON.
    Shift(ShiftArgs),
    /// Fit log10 λ = α log10 N + β across a family of inputs.
    Scaling(RunArgs),
    /// Fit y against x from a two-column CSV file or inline lists.
    Fit(FitArgs),
    /// Write the fully shifted Hamiltonian as FCIDUMP plus a JSON sidecar.
    Export(ExportArgs),
}

#[derive(Args, Default)]
struct RunArgs {
    /// FCIDUMP files to process.
    #[arg(long, num_args = 1..)]
    input: Vec<PathBuf>,
    /// Electron count for the target sector [default: NELEC from the file].
    #[arg(long)]
    nelec: Option<usize>,
    /// Comma-separated methods from pauli,oo-pauli,ac,oo-ac,df,gcsa [default: all; pauli for scaling].
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Comma-separated shifts from none,s,t [default: none,s,t; t for scaling].
    #[arg(long, value_delimiter = ',')]
    shifts: Option<Vec<String>>,
    /// Coefficient threshold for unitary counts [default: 1e-6].
    #[arg(long)]
    cutoff: Option<f64>,
    /// Seed for randomized optimizer starts [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Output format [default: json].
    #[arg(long)]
    format: Option<String>,
    /// Molecules processed concurrently [default: all cores].
    #[arg(long)]
    jobs: Option<usize>,
    /// Skip exact spectral ranges.
    #[arg(long)]
    no_spectral: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML file with any of the options above; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    input: Option<Vec<PathBuf>>,
    nelec: Option<usize>,
    methods: Option<Vec<String>>,
    shifts: Option<Vec<String>>,
    cutoff: Option<f64>,
    seed: Option<u64>,
    format: Option<String>,
    jobs: Option<usize>,
    spectral: Option<bool>,
}

#[derive(Args)]
struct ShiftArgs {
    #[arg(long, num_args = 1..)]
    input: Vec<PathBuf>,
    #[arg(long)]
    nelec: Option<usize>,
    /// Shift family: s (κ only) or t (full) [default: t].
    #[arg(long, default_value = "t")]
    kind: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FitModel {
    /// y = αx
    Proportional,
    /// y = αx + β
    Linear,
    /// log10 y = α log10 x + β, x integer
    Scaling,
}

#[derive(Args)]
struct FitArgs {
    /// CSV file whose first two numeric columns are x and y; a header row is skipped.
    #[arg(long, conflicts_with_all = ["x", "y"])]
    data: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', requires = "y")]
    x: Vec<f64>,
    #[arg(long, value_delimiter = ',', requires = "x")]
    y: Vec<f64>,
    #[arg(long, value_enum, default_value = "proportional")]
    model: FitModel,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    nelec: Option<usize>,
    /// Destination FCIDUMP; the sidecar lands next to it as `<stem>.shift.json`.
    #[arg(long)]
    out: PathBuf,
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Config(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Config(e.to_string()),
            other => Failure::Run(other.to_string()),
        }
    }
}

fn parse_list<T: std::str::FromStr<Err = Error>>(items: &[String]) -> Result<Vec<T>, Failure> {
    items
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<T>().map_err(Failure::from))
        .collect()
}

fn run_config(args: RunArgs, default_methods: &[Method], default_shifts: &[ShiftKind]) -> Result<(RunConfig, Option<PathBuf>), Failure> {
    let file: FileConfig = match &args.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?;
            toml::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?
        }
        None => FileConfig::default(),
    };
    let inputs = if args.input.is_empty() {
        file.input.unwrap_or_default()
    } else {
        args.input
    };
    let methods = match args.methods.or(file.methods) {
        Some(m) => parse_list::<Method>(&m)?,
        None => default_methods.to_vec(),
    };
    let shifts = match args.shifts.or(file.shifts) {
        Some(s) => parse_list::<ShiftKind>(&s)?,
        None => default_shifts.to_vec(),
    };
    let format = match args.format.or(file.format) {
        Some(f) => f.parse::<OutputFormat>()?,
        None => OutputFormat::Json,
    };
    let cfg = RunConfig {
        inputs,
        n_elec_override: args.nelec.or(file.nelec),
        methods,
        shifts,
        cutoff: args.cutoff.or(file.cutoff).unwrap_or(DEFAULT_CUTOFF),
        seed: args.seed.or(file.seed).unwrap_or(0),
        format,
        jobs: args.jobs.or(file.jobs),
        spectral: !args.no_spectral && file.spectral.unwrap_or(true),
    };
    cfg.validate()?;
    Ok((cfg, args.out))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Run(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("plain data serializes") + "\n"
}

fn analyze(args: RunArgs) -> Result<bool, Failure> {
    let (cfg, out) = run_config(args, &Method::ALL, &ShiftKind::ALL)?;
    let report = run_analysis(&cfg)?;
    emit(&report.render(cfg.format), out.as_deref())?;
    Ok(report.failed() == 0)
}

fn scaling(args: RunArgs) -> Result<bool, Failure> {
    let (cfg, out) = run_config(args, &[Method::Pauli], &[ShiftKind::Bliss])?;
    let report = run_scaling(&cfg)?;
    let text = match cfg.format {
        OutputFormat::Json => to_json(&report),
        OutputFormat::Csv | OutputFormat::Markdown => {
            let mut s = String::from("method,shift,alpha,stderr,beta,r_squared,points\n");
            for series in &report.series {
                let f = series.fit.as_ref();
                s.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    series.method.label(),
                    series.shift.label(),
                    f.map(|f| f.slope.to_string()).unwrap_or_default(),
                    f.map(|f| f.stderr.to_string()).unwrap_or_default(),
                    f.and_then(|f| f.intercept).map(|b| b.to_string()).unwrap_or_default(),
                    f.and_then(|f| f.r_squared).map(|r| r.to_string()).unwrap_or_default(),
                    series.points.len()
                ));
            }
            s
        }
    };
    emit(&text, out.as_deref())?;
    Ok(report.failures.is_empty() && report.series.iter().all(|s| s.error.is_none()))
}

fn shift(args: ShiftArgs) -> Result<bool, Failure> {
    let kind: ShiftKind = args.kind.parse()?;
    if kind == ShiftKind::None {
        return Err(Failure::Config("shift kind must be s or t".into()));
    }
    if args.input.is_empty() {
        return Err(Failure::Config("no input files".into()));
    }
    let mut ok = true;
    let mut entries = Vec::new();
    for path in &args.input {
        let entry = (|| -> bliss_core::Result<ShiftSidecar> {
            let f = load_fcidump(path)?;
            let ne = args.nelec.unwrap_or(f.n_elec);
            let s = optimize_symmetry_shift(&f.hamiltonian, ne)?;
            let r = match kind {
                ShiftKind::Bliss => optimize_bliss_from(&f.hamiltonian, &s)?,
                _ => s,
            };
            Ok(ShiftSidecar::from_result(&r))
        })();
        let value = match entry {
            Ok(s) => serde_json::json!({ "input": path.display().to_string(), "shift": s }),
            Err(e) => {
                error!("{}: {e}", path.display());
                ok = false;
                serde_json::json!({ "input": path.display().to_string(), "error": e.to_string() })
            }
        };
        entries.push(value);
    }
    emit(&to_json(&entries), args.out.as_deref())?;
    Ok(ok)
}

fn read_xy(path: &Path) -> Result<(Vec<f64>, Vec<f64>), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Run(format!("{}: {e}", path.display())))?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed = (cols.len() >= 2)
            .then(|| Some((cols[0].parse::<f64>().ok()?, cols[1].parse::<f64>().ok()?)))
            .flatten();
        match parsed {
            Some((x, y)) => {
                xs.push(x);
                ys.push(y);
            }
            None if k == 0 => continue,
            None => {
                return Err(Failure::Run(format!(
                    "{}:{}: expected two numeric columns",
                    path.display(),
                    k + 1
                )))
            }
        }
    }
    Ok((xs, ys))
}

fn fit(args: FitArgs) -> Result<bool, Failure> {
    let (xs, ys) = match &args.data {
        Some(p) => read_xy(p)?,
        None => (args.x.clone(), args.y.clone()),
    };
    if xs.is_empty() {
        return Err(Failure::Config("no data points; use --data or --x/--y".into()));
    }
    let result: FitResult = match args.model {
        FitModel::Proportional => proportional_fit(&xs, &ys)?,
        FitModel::Linear => linear_fit(&xs, &ys)?,
        FitModel::Scaling => {
            let sizes = xs
                .iter()
                .map(|&x| {
                    (x >= 1.0 && x.fract() == 0.0)
                        .then_some(x as usize)
                        .ok_or_else(|| Failure::Run(format!("scaling sizes must be positive integers, got {x}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            scaling_fit(&sizes, &ys)?
        }
    };
    emit(&to_json(&result), args.out.as_deref())?;
    Ok(true)
}

fn export(args: ExportArgs) -> Result<bool, Failure> {
    let f = load_fcidump(&args.input)?;
    let ne = args.nelec.unwrap_or(f.n_elec);
    let s = optimize_symmetry_shift(&f.hamiltonian, ne)?;
    let t = optimize_bliss_from(&f.hamiltonian, &s)?;
    let sidecar = export_shifted(&t, f.ms2, &args.out)?;
    eprintln!(
        "wrote {} and {} (Pauli 1-norm {:.6} -> {:.6})",
        args.out.display(),
        sidecar.display(),
        t.norm_before,
        t.norm_after
    );
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Scaling(a) => scaling(a),
        Command::Shift(a) => shift(a),
        Command::Fit(a) => fit(a),
        Command::Export(a) => export(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_PARTIAL),
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_PARTIAL)
        }
    }
}
