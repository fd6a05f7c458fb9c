//! Command-line front end: `models gen`, `spectrum`, `amu`, `essential`.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 grid cap exceeded,
//! 4 numerical failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::amu::{joint_diagonalize, Localizer};
use crate::error::Error;
use crate::essential::{amu_sequence, essential_spectrum_estimate, tail_commutator_decay, SequenceStep, WindowKind};
use crate::models::{generate_with_meta, load_tuple_file, save_tuple_file, write_spectrum_csv, Family, Format, ModelSpec};
use crate::observables::commutator_profile;
use crate::spectrum::{scan_with, ScanOptions};
use crate::tolerances::DEFAULT_GRID_CAP;
use crate::{Certificate, Spectrum, Tuple};

#[derive(Debug, Parser)]
#[command(name = "amu-spectra", version, about = "Synthetic spectra and AMU states of Hermitian tuples")]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "AMU_SPECTRA_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate model tuples.
    Models {
        #[command(subcommand)]
        action: ModelsCommand,
    },
    /// Scan the η-synthetic spectrum of a tuple.
    Spectrum(SpectrumArgs),
    /// Search AMU states at given points.
    Amu(AmuArgs),
    /// Estimate the essential synthetic spectrum from window compressions.
    Essential(EssentialArgs),
}

#[derive(Debug, Subcommand)]
pub enum ModelsCommand {
    /// Generate a tuple from a family.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FileFormat {
    Json,
    Binary,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// shift, commuting-diag, perturbed-commuting, clock or custom.
    pub family: String,
    #[arg(long, default_value_t = 64)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of observables (random families).
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Perturbation norm for perturbed-commuting.
    #[arg(long, default_value_t = 0.01)]
    pub perturbation: f64,
    /// Range of diagonal entries, `lo,hi`.
    #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
    pub range: String,
    /// Source tuple for the custom family.
    #[arg(short, long)]
    pub input: Option<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Output format (defaults from the extension: `.bin` is binary).
    #[arg(long, value_enum)]
    pub format: Option<FileFormat>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub eta: f64,
    /// Override the subdivision k(η).
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_GRID_CAP)]
    pub grid_cap: u64,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Also write accepted points as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AmuArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// A point `x,y,…` (repeatable) or `all-accepted`.
    #[arg(long, required = true, allow_hyphen_values = true)]
    pub lambda: Vec<String>,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long)]
    pub eps: f64,
    /// η of the scan used by `all-accepted`.
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_GRID_CAP)]
    pub grid_cap: u64,
    /// Also try basis vectors from an approximate joint diagonalization.
    #[arg(long)]
    pub decompose: bool,
    /// Clustering radius for `--decompose` (default η/2, or ε/2 without `--eta`).
    #[arg(long)]
    pub cluster_radius: Option<f64>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WindowArg {
    Interior,
    Tail,
}

#[derive(Debug, Args)]
pub struct EssentialArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub eta: f64,
    /// Increasing cut indices, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub cuts: Vec<usize>,
    #[arg(long, value_enum, default_value_t = WindowArg::Interior)]
    pub window: WindowArg,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_GRID_CAP)]
    pub grid_cap: u64,
    /// Also build an AMU sequence at this point.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// σ (and ε) for the AMU sequence.
    #[arg(long, default_value_t = 0.2)]
    pub sigma: f64,
    #[arg(short, long)]
    pub output: PathBuf,
}

/// Failure with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::GridTooLarge { .. } => 3,
            Error::NoConvergence { .. } => 4,
            _ => 2,
        };
        let message = match &e {
            Error::GridTooLarge { .. } => format!("{e}, a smaller --k, or raise --grid-cap"),
            _ => e.to_string(),
        };
        Self { code, message }
    }
}

fn config(message: impl Into<String>) -> CliError {
    CliError {
        code: 2,
        message: message.into(),
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses arguments, runs, prints errors to stderr and returns the exit code.
pub fn main_with_args<I, A>(args: I) -> ExitCode
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(config("--threads must be positive"));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| config(format!("cannot start thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Models {
            action: ModelsCommand::Gen(args),
        } => cmd_models(&args),
        Command::Spectrum(args) => cmd_spectrum(&args),
        Command::Amu(args) => cmd_amu(&args),
        Command::Essential(args) => cmd_essential(&args),
    })
}

fn write_json<S: Serialize>(path: &Path, value: &S) -> CliResult<()> {
    let file = File::create(path).map_err(|e| config(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer(&mut w, value).map_err(|e| config(format!("cannot write {}: {e}", path.display())))?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| config(e.to_string()))?;
    Ok(())
}

fn load(path: &Path) -> CliResult<Tuple> {
    load_tuple_file(path)
        .map(|f| f.tuple)
        .map_err(|e| config(format!("{}: {}", path.display(), CliError::from(e).message)))
}

fn parse_point(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| config(format!("cannot parse '{x}' in point '{s}'"))))
        .collect()
}

fn check_positive(name: &str, x: f64) -> CliResult<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(config(format!("{name} must be positive, got {x}")))
    }
}

fn scan_options(k: Option<u64>, grid_cap: u64) -> ScanOptions {
    ScanOptions {
        k_override: k,
        grid_cap,
        ..Default::default()
    }
}

pub fn cmd_models(args: &GenArgs) -> CliResult<()> {
    let family: Family = args.family.parse()?;
    let range = parse_point(&args.range)?;
    if range.len() != 2 {
        return Err(config(format!("--range needs two values, got '{}'", args.range)));
    }
    let spec = ModelSpec {
        family,
        dim: args.dim,
        seed: args.seed,
        n: args.n,
        perturbation: args.perturbation,
        range: (range[0], range[1]),
        path: args.input.clone(),
    };
    let (tuple, meta) = generate_with_meta(&spec)?;
    let format = match args.format {
        Some(FileFormat::Json) => Format::Json,
        Some(FileFormat::Binary) => Format::Binary,
        None => Format::from_path(&args.output),
    };
    let meta = serde_json::to_value(&meta).expect("metadata serializes");
    save_tuple_file(&args.output, &tuple, Some(&meta), format)?;
    println!(
        "{} dim={} n={} M={} max_commutator={}",
        family,
        tuple.dim(),
        tuple.n(),
        tuple.bound(),
        meta["max_commutator"]
    );
    Ok(())
}

#[derive(Serialize)]
struct SpectrumReport<'a> {
    #[serde(flatten)]
    result: &'a Spectrum,
    grid_points: u64,
    commutator_profile: Vec<Vec<f64>>,
}

pub fn cmd_spectrum(args: &SpectrumArgs) -> CliResult<()> {
    let tuple = load(&args.input)?;
    let result = scan_with(&tuple, args.eta, &scan_options(args.k, args.grid_cap))?;
    let report = SpectrumReport {
        result: &result,
        grid_points: result.grid().point_count(),
        commutator_profile: commutator_profile(&tuple),
    };
    write_json(&args.output, &report)?;
    if let Some(csv) = &args.csv {
        let file = File::create(csv).map_err(|e| config(format!("cannot create {}: {e}", csv.display())))?;
        write_spectrum_csv(BufWriter::new(file), &result)?;
    }
    println!(
        "eta={} k={} grid_points={} accepted={}",
        result.eta,
        result.k,
        report.grid_points,
        result.accepted.len()
    );
    Ok(())
}

#[derive(Serialize)]
struct AmuSummary {
    lambda: Vec<f64>,
    amu_member: bool,
    expectation_close: bool,
    max_sd: f64,
    max_deviation: f64,
}

#[derive(Serialize)]
struct AmuReport {
    sigma: f64,
    eps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<u64>,
    certified: usize,
    summary: Vec<AmuSummary>,
    certificates: Vec<Certificate>,
}

pub fn cmd_amu(args: &AmuArgs) -> CliResult<()> {
    check_positive("sigma", args.sigma)?;
    check_positive("eps", args.eps)?;
    let tuple = load(&args.input)?;

    let all = args.lambda.iter().any(|l| l == "all-accepted");
    let (points, k) = if all {
        if args.lambda.len() != 1 {
            return Err(config("all-accepted cannot be combined with explicit points"));
        }
        let eta = args.eta.ok_or_else(|| config("--lambda all-accepted needs --eta"))?;
        let spectrum = scan_with(&tuple, eta, &scan_options(args.k, args.grid_cap))?;
        (spectrum.points(), Some(spectrum.k))
    } else {
        let pts = args.lambda.iter().map(|s| parse_point(s)).collect::<CliResult<Vec<_>>>()?;
        (pts, None)
    };
    if let Some(p) = points.iter().find(|p| p.len() != tuple.n()) {
        return Err(config(format!(
            "lambda {:?} has {} coordinates, the tuple has {} observables",
            p,
            p.len(),
            tuple.n()
        )));
    }

    let decomposition = if args.decompose {
        let radius = args.cluster_radius.unwrap_or_else(|| args.eta.unwrap_or(args.eps) / 2.0);
        Some(joint_diagonalize(&tuple, 50, 1e-12, radius)?)
    } else {
        None
    };
    let localizer = Localizer::new(&tuple);
    let certificates: Vec<Certificate> = points
        .par_iter()
        .map(|p| localizer.amu_search(p, args.sigma, args.eps, decomposition.as_ref()))
        .collect::<crate::Result<_>>()?;

    let summary: Vec<AmuSummary> = certificates
        .iter()
        .map(|c| AmuSummary {
            lambda: c.lambda.clone(),
            amu_member: c.amu_member,
            expectation_close: c.expectation_close,
            max_sd: c.report.max_sd(),
            max_deviation: c.report.max_deviation(&c.lambda),
        })
        .collect();
    for s in &summary {
        println!(
            "lambda={:?} amu_member={} expectation_close={} max_sd={:.6e} max_dev={:.6e}",
            s.lambda, s.amu_member, s.expectation_close, s.max_sd, s.max_deviation
        );
    }
    let report = AmuReport {
        sigma: args.sigma,
        eps: args.eps,
        eta: args.eta.filter(|_| all),
        k,
        certified: certificates.iter().filter(|c| c.certified()).count(),
        summary,
        certificates,
    };
    println!("certified {}/{}", report.certified, report.certificates.len());
    write_json(&args.output, &report)
}

#[derive(Serialize)]
struct EssentialReport {
    tail_commutator_decay: Vec<(usize, f64)>,
    #[serde(flatten)]
    estimate: crate::essential::EssentialSpectrumEstimate<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    amu_sequence: Option<Vec<SequenceStep<f64>>>,
}

pub fn cmd_essential(args: &EssentialArgs) -> CliResult<()> {
    let tuple = load(&args.input)?;
    let kind = match args.window {
        WindowArg::Interior => WindowKind::Interior,
        WindowArg::Tail => WindowKind::Tail,
    };
    let decay = tail_commutator_decay(&tuple, &args.cuts)?;
    let estimate = essential_spectrum_estimate(&tuple, args.eta, &args.cuts, kind, &scan_options(args.k, args.grid_cap))?;
    let sequence = match &args.lambda {
        Some(l) => {
            check_positive("sigma", args.sigma)?;
            let lambda = parse_point(l)?;
            let stable_near = estimate
                .stabilized
                .iter()
                .any(|p| p.iter().zip(&lambda).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() <= args.eta);
            if !stable_near {
                eprintln!("warning: lambda {lambda:?} is not in the last-level estimate");
            }
            Some(amu_sequence(&tuple, &lambda, &args.cuts, &[args.sigma])?)
        }
        None => None,
    };
    for level in &estimate.levels {
        println!(
            "cut={} window=[{}, {}) accepted={}",
            level.cut,
            level.window[0],
            level.window[1],
            level.result.accepted.len()
        );
    }
    match estimate.stability {
        Some(s) => println!("stability={s} pitch={} stable={}", estimate.pitch, estimate.is_stable),
        None => println!("stability=undefined (empty level) pitch={}", estimate.pitch),
    }
    if let Some(steps) = &sequence {
        for s in steps {
            println!("cut={} max_sd={:.6e}", s.cut, s.certificate.report.max_sd());
        }
    }
    let report = EssentialReport {
        tail_commutator_decay: decay,
        estimate,
        amu_sequence: sequence,
    };
    write_json(&args.output, &report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::from(Error::GridTooLarge { points: 10, cap: 1 }).code, 3);
        assert_eq!(CliError::from(Error::NoConvergence { iterations: 1, residual: 1.0 }).code, 4);
        assert_eq!(CliError::from(Error::InvalidParameter("x".into())).code, 2);
    }

    #[test]
    fn points_parse() {
        assert_eq!(parse_point("1,-0.5").unwrap(), vec![1.0, -0.5]);
        assert!(parse_point("1,a").is_err());
    }
}
