use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DpError {
    #[error("grid size must be even and at least 8, got {0}")]
    InvalidGrid(usize),

    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("numerical breakdown in stage {stage} at t = {t}")]
    Breakdown { stage: usize, t: f64 },

    #[error("flow map became non-finite for label {label}")]
    FlowBreakdown { label: f64 },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("line {line}, key `{key}`: {message}")]
    Parse {
        line: usize,
        key: String,
        message: String,
    },

    #[error("invalid initial data: {0}")]
    InitialData(String),

    #[error("malformed trace: {0}")]
    Trace(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl DpError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        DpError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, DpError>;
