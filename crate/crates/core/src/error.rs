use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: the torus needs N >= 2")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operator is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("seed operator must be traceless (|Tr| = {trace:.3e})")]
    NotTraceless { trace: f64 },

    #[error("{op} refuses N = {n} (limit {limit})")]
    TooLarge {
        op: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operation not defined for this map: {0}")]
    UnsupportedMap(String),

    #[error("fit window [{start}, {end}] is invalid for a series of length {len}")]
    InvalidWindow { start: usize, end: usize, len: usize },

    #[error("eigen-decomposition failed: {0}")]
    Eigen(String),

    #[error("config error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config { line: Option<usize>, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Short machine-readable tag used by the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDimension(_) => "invalid_dimension",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NotTraceless { .. } => "not_traceless",
            Error::TooLarge { .. } => "too_large",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::UnsupportedMap(_) => "unsupported_map",
            Error::InvalidWindow { .. } => "invalid_window",
            Error::Eigen(_) => "eigen",
            Error::Config { .. } => "config",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
