use std::path::PathBuf;

use svcloud::circuit::{CircuitError, ParseError};
use svcloud::ProtocolError;
use thiserror::Error;

pub const EXIT_REJECT: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_PROTOCOL: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("circuit: {0}")]
    Circuit(#[from] CircuitError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Protocol(#[from] ProtocolError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Protocol(_) => EXIT_PROTOCOL,
            _ => EXIT_USAGE,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}
