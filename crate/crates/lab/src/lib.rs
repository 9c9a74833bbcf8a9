//! Sweeps, persistence and the verification suite on top of `cdlab-core`.

pub mod cache;
pub mod config;
pub mod output;
pub mod suite;
pub mod sweep;

pub use config::{Command, ExperimentConfig, Format, UsageError};
pub use output::{Assertion, RunReport, Table};
