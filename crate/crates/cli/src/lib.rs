//! Experiment harness for the `slan-core` library: configuration parsing,
//! named test problems, convergence-history experiments with bound columns,
//! CSV and SVG emission, built-in figure recipes, and a verification suite.

pub mod config;
pub mod csvout;
pub mod error;
pub mod experiment;
pub mod figures;
pub mod problems;
pub mod rng;
pub mod svg;
pub mod verify;

pub use config::ExperimentConfig;
pub use error::{CliError, Result};
pub use experiment::{run_experiment, Experiment};
pub use verify::{run_verification, VerificationSummary};
