//! Report-building layer behind the `txh` binary.
//!
//! Everything the binary does is: parse a command, build a [`report::Report`]
//! through the core library, and emit it as CSV or JSON. Reports carry no
//! timestamps, order their parameters, and print fixed-precision numbers,
//! so identical invocations produce byte-identical files.

pub mod cli;
pub mod commands;
pub mod network;
pub mod report;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] network::ConfigError),
    #[error("configuration error: {0}")]
    Invalid(String),
    #[error("numerical failure in {operation}: {message}")]
    Numerical { operation: &'static str, message: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Exit status: 2 for configuration problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Invalid(_) | CliError::Io { .. } => 2,
            CliError::Numerical { .. } => 3,
        }
    }

    pub fn numerical(operation: &'static str, err: impl std::fmt::Display) -> Self {
        CliError::Numerical { operation, message: err.to_string() }
    }
}
