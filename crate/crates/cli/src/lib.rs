//! `nrho`: scriptable access to the noise-radar detection toolkit.
//!
//! Every command that writes a file also writes `<file>.manifest.json`
//! holding the merged parameters, the seed, the crate version and the
//! SHA-256 of the data. Parameters come from flags first, then from the
//! section of the `--config` JSON file named after the subcommand, then
//! from built-in defaults.
//!
//! Exit codes: 0 on success, 2 for invalid arguments, 3 when a
//! computation or an output write fails.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use noise_radar::analytic::{RocFamily, SmallRhoFamily};
use noise_radar::detectors::DetectorKind;
use noise_radar::signal::MatrixVariant;
use serde::de::DeserializeOwned;
use serde::Deserialize;

mod commands;
pub mod manifest;

/// Default output directory when `--out-dir` is not given.
pub const OUT_DIR_ENV: &str = "NRHO_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "nrho", version, about = "Detection performance of noise-type radars")]
pub struct Cli {
    /// Directory for outputs written without an explicit --output.
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = ".")]
    pub out_dir: PathBuf,
    /// JSON file of per-command defaults, keyed by subcommand name.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detection probability as a function of Nρ² for several false-alarm probabilities.
    PdCurve(PdCurveArgs),
    /// Nρ² needed for a detection probability, with the implied N and integration time.
    Required(RequiredArgs),
    /// Monte Carlo detection probability at a calibrated threshold.
    Simulate(SimulateArgs),
    /// Fit the logistic approximation for every table row.
    FitTables(FitTablesArgs),
    /// Finite-ρ detection probability next to the small-ρ prediction.
    LargeRho(LargeRhoArgs),
    /// Dump one simulated IQ block as CSV.
    Sample(SampleArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::PdCurve(_) => "pd-curve",
            Command::Required(_) => "required",
            Command::Simulate(_) => "simulate",
            Command::FitTables(_) => "fit-tables",
            Command::LargeRho(_) => "large-rho",
            Command::Sample(_) => "sample",
        }
    }
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct PdCurveArgs {
    /// d0_first_order, d0_large_n, rhohat_large_n, rhohat_small_rho, mf_large_n or rhohat_exact.
    #[arg(long)]
    pub family: Option<RocFamily>,
    /// Comma-separated false-alarm probabilities.
    #[arg(long, value_delimiter = ',')]
    pub pfa: Option<Vec<f64>>,
    #[arg(long)]
    pub nrho2_min: Option<f64>,
    #[arg(long)]
    pub nrho2_max: Option<f64>,
    #[arg(long)]
    pub nrho2_step: Option<f64>,
    /// Fixed N for families that need finite (ρ, N); ρ = √(Nρ² / N).
    #[arg(long)]
    pub n: Option<u64>,
    /// Explicit `rho:n` operating points instead of an Nρ² grid.
    #[arg(long, value_delimiter = ',')]
    pub points: Option<Vec<String>>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct RequiredArgs {
    #[arg(long)]
    pub pd: Option<f64>,
    #[arg(long)]
    pub pfa: Option<f64>,
    /// marcum (ρ̂ and matched filter) or d0.
    #[arg(long)]
    pub family: Option<SmallRhoFamily>,
    /// Correlation coefficient; reports the number of samples N.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Receiver sample rate in Hz; reports the integration time.
    #[arg(long)]
    pub sample_rate: Option<f64>,
    /// Print JSON instead of `key value` lines.
    #[arg(long)]
    pub json: bool,
    /// Also write the JSON report here.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct SimulateArgs {
    /// d0, rhohat or mf.
    #[arg(long)]
    pub kind: Option<DetectorKind>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub sigma1: Option<f64>,
    #[arg(long)]
    pub sigma2: Option<f64>,
    /// rotation or reflection.
    #[arg(long)]
    pub variant: Option<MatrixVariant>,
    /// Samples integrated per block.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub pfa: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct FitTablesArgs {
    /// CSV path; the JSON table is written next to it.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct LargeRhoArgs {
    #[arg(long)]
    pub kind: Option<DetectorKind>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub pfa: Option<Vec<f64>>,
    #[arg(long)]
    pub n_min: Option<u64>,
    #[arg(long)]
    pub n_max: Option<u64>,
    #[arg(long)]
    pub n_step: Option<u64>,
    /// Monte Carlo trials per hypothesis (d0 and mf).
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct SampleArgs {
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub sigma1: Option<f64>,
    #[arg(long)]
    pub sigma2: Option<f64>,
    /// rotation or reflection.
    #[arg(long)]
    pub variant: Option<MatrixVariant>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub stream: Option<u64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) | CliError::Io { .. } => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "invalid arguments: {m}"),
            CliError::Numeric(m) => write!(f, "computation failed: {m}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<noise_radar::Error> for CliError {
    fn from(e: noise_radar::Error) -> Self {
        use noise_radar::Error as E;
        match e {
            E::Domain(_) | E::InsufficientTrials { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

/// The subcommand's section of the config file, or defaults.
fn config_section<T: DeserializeOwned + Default>(config: Option<&Path>, name: &str) -> Result<T, CliError> {
    let Some(path) = config else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let root: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    match root.get(name) {
        None => Ok(T::default()),
        Some(v) => T::deserialize(v).map_err(|e| CliError::Usage(format!("{} [{name}]: {e}", path.display()))),
    }
}

/// Runs a parsed command, writing human-readable output to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = cli.config.as_deref();
    let name = cli.command.name();
    let dir = cli.out_dir.as_path();
    match cli.command {
        Command::PdCurve(a) => commands::pd_curve(a, config_section(cfg, name)?, dir, out),
        Command::Required(a) => commands::required(a, config_section(cfg, name)?, out),
        Command::Simulate(a) => commands::simulate(a, config_section(cfg, name)?, dir, out),
        Command::FitTables(a) => commands::fit_tables(a, config_section(cfg, name)?, dir, out),
        Command::LargeRho(a) => commands::large_rho(a, config_section(cfg, name)?, dir, out),
        Command::Sample(a) => commands::sample(a, config_section(cfg, name)?, dir, out),
    }
}

/// Parses `args` (program name first), runs, and maps the outcome to an
/// exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
