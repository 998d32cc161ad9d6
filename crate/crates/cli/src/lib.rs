//! `hybridlab`: named experiment recipes over the `hybrid-lab` library.
//!
//! Every run writes, into one output directory,
//!
//! - `<recipe>.csv` (or `audit.json`): the structured result;
//! - `summary.txt`: a plain-text digest;
//! - `manifest.json`: resolved config, file list and invariant checks;
//! - `metadata.json`: timestamps and wall time.
//!
//! The first three are byte-identical across runs with the same config and seed.
//! Exit status: 0 success, 1 invariant failure or numerical error, 2 configuration error.

pub mod config;
pub mod output;
pub mod recipes;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub use config::ExperimentConfig;

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "HYBRIDLAB_OUT";

#[derive(Debug, Parser)]
#[command(name = "hybridlab", version, about = "Hybrid quantum-classical ensemble experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub recipe: Recipe,
    /// Experiment config (TOML). Defaults apply to every missing field.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory. Defaults to `$HYBRIDLAB_OUT/<recipe>`, else `hybridlab-out/<recipe>`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized state draws.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Points per grid axis.
    #[arg(long = "grid-n", global = true)]
    pub grid_n: Option<usize>,
    /// Config override, `dotted.key=value` with a TOML value. Repeatable.
    #[arg(long = "override", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Recipe {
    /// Moment time series with log-negativity from the symplectic propagator.
    MediateGaussian,
    /// Grid transport vs Madelung advection vs moment oracle.
    MediateGrid,
    /// Bracket homomorphism residuals on seeded random states.
    BracketCheck,
    /// Strong-separability brackets over probe/mediator pairs.
    SeparabilityScan,
    /// Log-negativity against the mediator momentum variance.
    KSensitivity,
    /// Classically tagged moment propagation and its refusal of entanglement queries.
    ClassicalTwin,
    /// Qubit post-selection protocol trace.
    QubitProtocol,
    /// Witness-assumption audit and verdict for a protocol script.
    Audit,
}

impl Recipe {
    pub fn name(self) -> &'static str {
        match self {
            Recipe::MediateGaussian => "mediate-gaussian",
            Recipe::MediateGrid => "mediate-grid",
            Recipe::BracketCheck => "bracket-check",
            Recipe::SeparabilityScan => "separability-scan",
            Recipe::KSensitivity => "k-sensitivity",
            Recipe::ClassicalTwin => "classical-twin",
            Recipe::QubitProtocol => "qubit-protocol",
            Recipe::Audit => "audit",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Config { field: String, message: String },
    Invariant(String),
    Numerical(hybrid_lab::Error),
    Io(String),
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl fmt::Display) -> Self {
        CliError::Config {
            field: field.into(),
            message: message.to_string(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { field, message } => write!(f, "config error in `{field}`: {message}"),
            CliError::Invariant(m) => write!(f, "invariant violated: {m}"),
            CliError::Numerical(e) => write!(f, "numerical error: {e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<hybrid_lab::Error> for CliError {
    fn from(e: hybrid_lab::Error) -> Self {
        CliError::Numerical(e)
    }
}

fn output_dir(cli: &Cli) -> PathBuf {
    if let Some(out) = &cli.out {
        return out.clone();
    }
    let root = std::env::var_os(OUT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("hybridlab-out"));
    root.join(cli.recipe.name())
}

/// Runs one recipe end to end and returns the process exit status.
pub fn run(cli: &Cli) -> ExitCode {
    match execute(cli) {
        Ok(dir) => {
            eprintln!("wrote {}", dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hybridlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(cli: &Cli) -> Result<PathBuf, CliError> {
    let started = output::now_ms();
    let mut overrides = cli.overrides.clone();
    if let Some(seed) = cli.seed {
        overrides.push(format!("seed={seed}"));
    }
    if let Some(n) = cli.grid_n {
        overrides.push(format!("grid.points={n}"));
    }
    let (cfg, _) = ExperimentConfig::load(cli.config.as_deref(), &overrides)?;
    let result = recipes::run(cli.recipe, &cfg)?;
    let dir = output_dir(cli);
    output::write_run(&dir, cli.recipe, &cfg, &result, started)?;
    if let Some(failed) = result.checks.iter().find(|c| c.enforced && !c.passed) {
        return Err(CliError::Invariant(format!(
            "{} (value {}, limit {})",
            failed.name, failed.value, failed.limit
        )));
    }
    Ok(dir)
}
