use sysrisk::ErrorKind;
use thiserror::Error;

/// Failure of a pipeline run, classified for the process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }
}

impl From<sysrisk::Error> for CliError {
    fn from(e: sysrisk::Error) -> Self {
        let msg = e.to_string();
        match e.kind() {
            ErrorKind::Config => CliError::Config(msg),
            ErrorKind::Data => CliError::Data(msg),
            ErrorKind::Numeric => CliError::Numeric(msg),
        }
    }
}

/// Tags an error with the file it came from, keeping its class.
pub(crate) fn at(path: &std::path::Path, e: impl Into<CliError>) -> CliError {
    let p = path.display();
    match e.into() {
        CliError::Config(m) => CliError::Config(format!("{p}: {m}")),
        CliError::Data(m) => CliError::Data(format!("{p}: {m}")),
        CliError::Numeric(m) => CliError::Numeric(format!("{p}: {m}")),
    }
}

pub type CliResult<T> = Result<T, CliError>;
