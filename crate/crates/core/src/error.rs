use std::path::PathBuf;

/// Errors produced by the polar code toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("densities live on different grids")]
    GridMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("channel is not symmetric: {0}")]
    NotSymmetric(String),

    #[error("unknown channel symbol {0}")]
    UnknownSymbol(f64),

    #[error("matrix is singular over GF(2)")]
    Singular,

    #[error("code verification failed: {0}")]
    CodeMismatch(String),

    #[error("unsupported code: {0}")]
    UnsupportedCode(String),

    #[error("calibration failed: {0}")]
    CalibrationFailed(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
