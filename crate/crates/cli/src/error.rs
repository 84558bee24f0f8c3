use std::path::PathBuf;

use thiserror::Error;

/// Failures of a run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error in `{field}`: {message}")]
    Config {
        field: &'static str,
        message: String,
    },

    /// One or more experiment checks failed; artifacts were still written.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(field: &'static str, message: impl Into<String>) -> Self {
        CliError::Config {
            field,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 config, 2 invariant, 3 numerical or I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 1,
            CliError::Invariant(_) => 2,
            CliError::Numerical(_) | CliError::Io { .. } => 3,
        }
    }
}

impl From<qmem_core::Error> for CliError {
    fn from(e: qmem_core::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}
