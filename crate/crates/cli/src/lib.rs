//! Command-line front end for the Helmholtz unique continuation solver.

pub mod config;
pub mod run;

pub use config::{parse_config, ConfigError, ExperimentConfig, Flags};
pub use run::{run, RunError, RunOutcome};
