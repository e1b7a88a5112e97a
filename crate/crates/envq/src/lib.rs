//! Command-line companion to `envq-core`: run configuration, CSV and report
//! output, threaded Monte Carlo and sweeps, and the acceptance suites.

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod model;
pub mod parallel;
pub mod verify;

pub use error::{CliError, CliResult};
