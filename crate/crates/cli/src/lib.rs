//! Experiment runner behind the `cqc` binary.

pub mod config;
pub mod experiments;
pub mod output;

use std::fmt;

/// Bad input: flags, config file, circuit file or parameter ranges.
pub const EXIT_VALIDATION: i32 = 2;
/// Failure after validation: numerical breakdown or output I/O.
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Runtime(m) => write!(f, "run failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<cqc_core::Error> for CliError {
    fn from(e: cqc_core::Error) -> Self {
        use cqc_core::Error::*;
        match e {
            InvalidParameter(_) | OutOfRange { .. } | DimensionCap { .. } | DimensionMismatch { .. } | NotHermitian { .. } => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}
