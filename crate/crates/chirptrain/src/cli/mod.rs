//! Configuration schema and the command-line experiment runner.

pub mod config;
pub mod run;

pub use config::{validate_config, ConfigError, Diagnostic, ExperimentConfig, ExperimentKind};
pub use run::{run_experiment, RunOptions, RunSummary};
