use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("config {path}: {msg}")]
    Config { path: PathBuf, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}:{column}: {msg}")]
    Parse {
        path: PathBuf,
        line: u64,
        column: usize,
        msg: String,
    },

    #[error("{path}: last column must be named `label`")]
    MissingLabelColumn { path: PathBuf },

    #[error("anomaly ratio {ratio} is not below {max}")]
    AnomalyRatioTooHigh { ratio: f64, max: f64 },

    #[error(transparent)]
    Core(#[from] anomaly_bench::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 for invocation problems, 2 for bad data.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 1,
            _ => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "Usage",
            CliError::Config { .. } => "Config",
            CliError::Io { .. } => "IoError",
            CliError::Parse { .. } => "ParseError",
            CliError::MissingLabelColumn { .. } => "MissingLabelColumn",
            CliError::AnomalyRatioTooHigh { .. } => "AnomalyRatioTooHigh",
            CliError::Core(e) => e.name(),
        }
    }
}
