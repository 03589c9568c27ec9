//! Experiment configuration, execution and CSV output for the `curvsense`
//! binary.

pub mod app;
pub mod config;
pub mod csv;
pub mod run;

pub use app::{execute, Args, CliError, Command};
pub use config::{ConfigError, ExperimentConfig, Grid, Kind, ProbeSpec};
pub use csv::{config_digest, emit_csv, metadata_line, write_csv};
pub use run::{build_state, columns, run, summarize_mle, Cell, MleSummary, ResultTable};
