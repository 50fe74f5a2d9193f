use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, got {got}")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{op} requires a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("matrix entries must be finite")]
    NonFiniteEntry,

    #[error("row {row} has zero norm")]
    ZeroRow { row: usize },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("ill-posed instance: sigma_min = {sigma_min:e}, sigma_1 = {sigma_max:e}")]
    IllPosed { sigma_min: f64, sigma_max: f64 },

    #[error("matrix is not symmetric (max |A - A^T| = {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("Jacobi SVD did not converge after {sweeps} sweeps (off-diagonal {off_diagonal:e})")]
    SvdNoConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("non-finite value at step {step}")]
    NumericFailure { step: usize },

    #[error("order-1 seminorm is negative ({value:e}); operator is not positive definite")]
    NotPositiveDefinite { value: f64 },

    #[error("unknown {kind} '{name}'")]
    UnknownName { kind: &'static str, name: String },

    #[error("{}:{line}: {kind}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        kind: ParseErrorKind,
    },

    #[error("invalid config field '{field}': {msg}")]
    Config { field: String, msg: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            msg: msg.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("ragged row: expected {expected} values, found {found}")]
    RaggedRow { expected: usize, found: usize },
    #[error("invalid number '{0}'")]
    InvalidNumber(String),
    #[error("non-finite value '{0}'")]
    NonFinite(String),
    #[error("expected {expected} data lines, found {found}")]
    WrongLineCount { expected: usize, found: usize },
}
