//! Harness-level errors with process exit-code semantics.

use std::fmt;

/// Errors surfaced by the CLI. The variant determines the process exit code:
/// configuration problems (including I/O on user-supplied paths) exit with
/// 2, numerical failures inside the pipeline with 3. Verification failures
/// are not errors — they are reported results — and exit with 1 from `main`.
#[derive(Debug)]
pub enum CliError {
    /// Bad or inconsistent configuration, unreadable input, unwritable
    /// output.
    Config(String),
    /// A numerical stage failed (quadrature tolerance, exchange
    /// non-convergence, eigensolver failure, breakdown misuse, ...).
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    /// Wraps a core error with the experiment stage and step at which it
    /// occurred, so aborts name the failing `m` and stage.
    pub fn at_stage(stage: &str, m: Option<usize>, e: slan_core::Error) -> Self {
        match m {
            Some(m) => CliError::Numerical(format!("stage {stage}, m = {m}: {e}")),
            None => CliError::Numerical(format!("stage {stage}: {e}")),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<slan_core::Error> for CliError {
    fn from(e: slan_core::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
