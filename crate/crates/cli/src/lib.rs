//! Library side of the `moq` command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod commands;
pub mod config;
pub mod verify;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VERIFY_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const EVALUATION: i32 = 3;
    pub const CONDITION: i32 = 4;
    pub const NONCONVERGENCE: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("invalid spec: {0}")]
    Spec(String),

    #[error("evaluation failed at x = {x}: {source}")]
    Evaluation { x: f64, source: moq_core::Error },

    #[error(transparent)]
    Core(#[from] moq_core::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("verification failed: {0}")]
    VerifyFailed(String),
}

fn core_exit_code(e: &moq_core::Error) -> i32 {
    match e {
        moq_core::Error::ConditionViolated { .. } => exit::CONDITION,
        moq_core::Error::Nonconvergence { .. } | moq_core::Error::ToleranceNotMet { .. } => exit::NONCONVERGENCE,
        _ => exit::EVALUATION,
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Spec(_) => exit::USAGE,
            CliError::Evaluation { source, .. } => core_exit_code(source),
            CliError::Core(e) => core_exit_code(e),
            CliError::Io(_) => exit::EVALUATION,
            CliError::VerifyFailed(_) => exit::VERIFY_FAILED,
        }
    }
}
