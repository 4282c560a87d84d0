//! Scenario runner behind the `corona` binary: classification certificates,
//! jump analysis, deformation witnesses and the self-test registry.

pub mod commands;
pub mod scenario;
pub mod selftest;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] corona_core::Error),
    #[error(transparent)]
    Numeric(#[from] corona_numeric::Error),
    /// A precondition of the command is not met (e.g. classify gate).
    #[error("refused: {0}")]
    Refused(String),
}

/// Process exit codes.
pub mod exit {
    /// Every verdict definite (equivalent or not), or command succeeded.
    pub const OK: i32 = 0;
    /// Malformed input or a failed computation.
    pub const ERROR: i32 = 1;
    /// At least one verdict is undetermined.
    pub const UNDETERMINED: i32 = 2;
}
