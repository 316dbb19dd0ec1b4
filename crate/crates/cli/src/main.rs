mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pqst::PqstError;

use config::FileConfig;

#[derive(Debug, Parser)]
#[command(
    name = "pqst",
    version,
    about = "Partial shadow tomography on simulated qubit registers"
)]
struct Cli {
    /// TOML file with values for any of the long flags; flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads. Results are identical for every value.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rebuild a state from partial shadow estimators and report the fidelity.
    Reconstruct(ReconstructArgs),
    /// Estimate the expectation value of a Pauli-sum observable.
    Estimate(EstimateArgs),
    /// Monte Carlo MSE study over a grid of shot budgets, written as CSV.
    Bench(BenchArgs),
    /// Check the closed forms and channel identities.
    Validate(ValidateArgs),
    /// Member count, p and activity signature of an ensemble.
    EnsembleInfo(InfoArgs),
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Fixture name or density-matrix JSON file.
    #[arg(long)]
    pub state: Option<String>,
    /// State to compare against; defaults to the input state.
    #[arg(long)]
    pub reference: Option<String>,
    /// Comma-separated ensembles, e.g. `zeta-X,zeta-A:1|zeta-A:2`.
    #[arg(long)]
    pub sets: Option<String>,
    /// Two-qubit population pipeline over ζ_X and ζ_1 instead of `--sets`.
    #[arg(long)]
    pub pipeline: bool,
    #[arg(long, conflicts_with = "shots")]
    pub exact: bool,
    /// Shots per set.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub state: Option<String>,
    /// Fixture name or `coeff WORD; coeff WORD ...`.
    #[arg(long)]
    pub obs: Option<String>,
    /// pqst, pqst-rotated, pauli, clifford or mub.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long, conflicts_with = "shots")]
    pub exact: bool,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Treat the state as an X-state, so pqst uses ζ_X alone.
    #[arg(long)]
    pub x_state: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long)]
    pub obs: Option<String>,
    /// Comma-separated subset of pqst, pauli, clifford, mub.
    #[arg(long)]
    pub methods: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Comma-separated budgets; default 100,1000,10000,100000.
    #[arg(long)]
    pub shots: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// CSV path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub x_state: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Random states per check.
    #[arg(long)]
    pub states: Option<usize>,
    /// Seed of the random test states (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Added to every closed-form p, to see the checks fail.
    #[arg(long, allow_hyphen_values = true)]
    pub p_offset: Option<f64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub ensemble: Option<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<PqstError> for CliError {
    fn from(e: PqstError) -> Self {
        Self {
            code: if e.is_usage() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::numeric(e.to_string())
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    if let Some(w) = cli.workers.or(cfg.workers) {
        if w == 0 {
            return Err(CliError::usage("--workers must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::numeric(e.to_string()))?;
    }
    match cli.command {
        Command::Reconstruct(a) => commands::reconstruct(a, cfg),
        Command::Estimate(a) => commands::estimate(a, cfg),
        Command::Bench(a) => commands::bench(a, cfg),
        Command::Validate(a) => commands::validate(a, cfg),
        Command::EnsembleInfo(a) => commands::ensemble_info(a, cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
