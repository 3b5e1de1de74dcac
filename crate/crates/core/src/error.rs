use thiserror::Error;

/// Errors produced by the depth, testing and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error(
        "scatter matrix is not positive definite (smallest eigenvalue {smallest_eigenvalue:e})"
    )]
    NonInvertibleScatter { smallest_eigenvalue: f64 },

    #[error("exact depth is not available in dimension {0}; use the approximate method")]
    UnsupportedDimension(usize),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at line {line}{}: {message}", .column.map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        line: usize,
        column: Option<usize>,
        message: String,
    },

    #[error("duplicate table row: {0}")]
    DuplicateRow(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
