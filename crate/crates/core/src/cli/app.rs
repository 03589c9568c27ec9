//! Command-line front end.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::cli::config::{ExperimentConfig, Kind};
use crate::cli::csv::emit_csv;
use crate::cli::run::run;

#[derive(Debug, Parser)]
#[command(
    name = "curvsense",
    version,
    about = "Radius estimation with particles confined to curved surfaces"
)]
pub struct Args {
    #[command(subcommand)]
    pub command: Command,
    /// TOML experiment config. Optional for ratio-scan and mle.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output CSV path; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Exit with status 2 if any row carries a warning.
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Metric, curvatures, surface potential and Ricci scalar on a chart grid.
    Geometry,
    /// QFI of a free probe, numeric and closed form.
    QfiFree,
    /// QFI of field-perturbed eigenstates.
    QfiField,
    /// Position-measurement Fisher information.
    FiPosition,
    /// FI/QFI over a two-level scan.
    RatioScan,
    /// Maximum-likelihood radius estimates from sampled positions.
    Mle,
}

impl Command {
    pub fn kind(self) -> Kind {
        match self {
            Command::Geometry => Kind::Geometry,
            Command::QfiFree => Kind::QfiFree,
            Command::QfiField => Kind::QfiField,
            Command::FiPosition => Kind::FiPosition,
            Command::RatioScan => Kind::RatioScan,
            Command::Mle => Kind::Mle,
        }
    }
}

/// Failure classes and their exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0} row(s) carry warnings")]
    Warnings(usize),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Warnings(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

/// Loads the config for `args`, applying command-line overrides.
pub fn load_config(args: &Args) -> Result<ExperimentConfig, CliError> {
    let kind = args.command.kind();
    let text = match &args.config {
        Some(p) => std::fs::read_to_string(p)?,
        None if matches!(kind, Kind::RatioScan | Kind::Mle) => format!("kind = \"{kind}\"\n"),
        None => return Err(CliError::Config(format!("{kind} needs --config"))),
    };
    let mut cfg = ExperimentConfig::from_toml(&text).map_err(|e| CliError::Config(e.to_string()))?;
    if cfg.kind != kind {
        return Err(CliError::Config(format!(
            "config kind is \"{}\" but the subcommand is {kind}",
            cfg.kind
        )));
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

/// Runs the parsed command line.
pub fn execute(args: &Args) -> Result<(), CliError> {
    let cfg = load_config(args)?;
    let table = match args.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?
            .install(|| run(&cfg)),
        None => run(&cfg),
    }
    .map_err(|e| CliError::Config(e.to_string()))?;
    let out = args.out.as_deref().or(cfg.output.as_deref());
    match emit_csv(&cfg, &table, out) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => return Ok(()),
        r => r?,
    }
    for (k, v) in &table.summary {
        eprintln!("{k}: {v}");
    }
    let warned = table.warning_count();
    if warned > 0 {
        eprintln!("warning: {warned} row(s) carry warnings");
        if args.strict {
            return Err(CliError::Warnings(warned));
        }
    }
    Ok(())
}

pub fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
