//! Experiment runner for the blow-up solvers: configuration parsing,
//! scenario orchestration, CSV output and run summaries.

pub mod config;
pub mod error;
pub mod output;
pub mod reproduce;
pub mod scenario;

pub use config::ExperimentConfig;
pub use error::CliError;
pub use scenario::{run, RunReport};
