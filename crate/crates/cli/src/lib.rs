//! Experiment driver: energy and entropy tables, central-charge fits, the gate
//! table and exact spectra, all as plain files.

pub mod commands;
pub mod config;
pub mod output;

use std::fmt;

pub use commands::{cmd_ed, cmd_fit_c, cmd_gates, cmd_run, FitRow, MeasurementPoint};
pub use config::{ExperimentConfig, Methods, Overrides, Reference};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config file or input file.
    Config(String),
    /// Solver or linear-algebra failure.
    Numerical(String),
    /// Gate counts or operator checks that must hold on every run.
    SelfCheck(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::SelfCheck(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::SelfCheck(m) => write!(f, "self-check failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<cagmps::Error> for CliError {
    fn from(e: cagmps::Error) -> Self {
        use cagmps::Error as E;
        let msg = e.to_string();
        match e {
            E::InvalidArgument(_) | E::SizeLimit(_) | E::Io(_) | E::Format(_) => CliError::Config(msg),
            E::Enumeration(_) | E::NotClifford(_) | E::NonHermitian { .. } | E::OddTerm(_) => CliError::SelfCheck(msg),
            _ => CliError::Numerical(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Config(e.to_string())
    }
}
