use std::io;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{context}: {source}")]
    Data {
        context: String,
        #[source]
        source: hoprank::Error,
    },

    #[error("{0}")]
    Input(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data { .. } | CliError::Input(_) | CliError::Io { .. } => 2,
        }
    }

    pub fn io(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
        move |source| CliError::Io {
            path: path.to_owned(),
            source,
        }
    }

    pub fn data(context: impl std::fmt::Display) -> impl FnOnce(hoprank::Error) -> CliError {
        let context = context.to_string();
        move |source| CliError::Data { context, source }
    }
}

pub type CliResult<T> = Result<T, CliError>;
