//! Experiment runner for the hyperentanglement distribution and
//! purification library: config parsing, experiment execution, and
//! report emission.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

pub use config::{ExperimentKind, OutputFormat, RunConfig};
pub use error::{CliError, Result};
