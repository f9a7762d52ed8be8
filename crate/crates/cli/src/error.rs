use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("{0}")]
    Domain(qmeas_core::Error),

    #[error("solver failure: {0}")]
    Solver(qmeas_core::Error),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("checks failed: {}", .0.join("; "))]
    ChecksFailed(Vec<String>),
}

impl CliError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code: 1 config or I/O, 2 domain (including failed
    /// inequality checks), 3 solver.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Io { .. } => 1,
            CliError::Domain(_) | CliError::ChecksFailed(_) => 2,
            CliError::Solver(_) => 3,
        }
    }
}

impl From<qmeas_core::Error> for CliError {
    fn from(e: qmeas_core::Error) -> Self {
        match e {
            qmeas_core::Error::SolverNonConvergence { .. } => CliError::Solver(e),
            other => CliError::Domain(other),
        }
    }
}
