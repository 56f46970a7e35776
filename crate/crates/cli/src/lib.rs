//! Driver for the `hbt` command: run configuration, sweeps, offline analysis
//! of recorded traces, and closed-form prediction reports.

pub mod commands;
pub mod config;

pub use commands::{CliError, CliResult};
pub use config::{ConfigError, RunConfig};
