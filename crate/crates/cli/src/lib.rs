//! Command-line front end: argument parsing, command execution and CSV/JSON emission.

pub mod args;
pub mod output;
pub mod run;

use std::path::PathBuf;

use thiserror::Error;

pub use args::{parse_args, RunConfig};
pub use run::{execute, run};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(#[from] clap::Error),

    #[error("usage: {0}")]
    Usage(String),

    #[error("{0}")]
    Model(#[from] qring::Error),

    #[error("spectrum is empty for these parameters")]
    EmptySpectrum,

    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("writing output: {0}")]
    Write(#[source] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) => e.exit_code(),
            CliError::Usage(_) => 2,
            CliError::EmptySpectrum => 3,
            CliError::Model(e) => match e {
                qring::Error::InsufficientStates { .. }
                | qring::Error::WindowTooSmall { .. }
                | qring::Error::WindowDidNotConverge { .. } => 3,
                _ => 2,
            },
            CliError::Io { .. } | CliError::Write(_) => 1,
        }
    }
}
