use std::path::PathBuf;

use seizure_core::evaluation::ExperimentError;
use seizure_core::features::AnovaError;
use seizure_core::gbdt::GbdtError;
use seizure_core::io::FormatError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: corrupt file at byte {}: {}", source.offset, source.message)]
    Format { path: PathBuf, source: FormatError },
    #[error("no segments were produced from {0}")]
    NoSegmentsProduced(PathBuf),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error(transparent)]
    Gbdt(#[from] GbdtError),
    #[error(transparent)]
    Anova(#[from] AnovaError),
    #[error("{0}")]
    Data(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    /// 1 usage, 2 data, 3 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 1,
            CliError::Internal(_) => 3,
            CliError::Gbdt(GbdtError::InvalidConfig(_)) => 1,
            CliError::Experiment(ExperimentError::Gbdt(GbdtError::InvalidConfig(_))) => 1,
            _ => 2,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}
