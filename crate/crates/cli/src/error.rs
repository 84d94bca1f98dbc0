use std::io;
use std::path::PathBuf;

use invsim::atmosphere::AltitudeOutOfRange;
use invsim::forward::ForwardError;
use invsim::model::{InvalidConfig, ParseError};
use invsim::solver::SolveError;
use invsim::trajectory::SpecError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    ConfigFile { path: PathBuf, source: ParseError },
    #[error("invalid aircraft data: {0}")]
    InvalidConfig(#[from] InvalidConfig),
    #[error("{}, row {row}: {message}", path.display())]
    Table { path: PathBuf, row: usize, message: String },
    #[error("maneuver: {0}")]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Atmosphere(#[from] AltitudeOutOfRange),
    #[error("solver: {0}")]
    Solve(#[from] SolveError),
    #[error("forward simulation: {0}")]
    Forward(#[from] ForwardError),
    #[error("round trip outside tolerance: {0}")]
    Mismatch(String),
}

impl CliError {
    /// 1 input error, 2 numerical failure, 3 round-trip mismatch.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Solve(_) | CliError::Forward(_) => 2,
            CliError::Mismatch(_) => 3,
            _ => 1,
        }
    }
}
