use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid sparse structure: {0}")]
    InvalidStructure(String),

    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dense conversion refused: dimension {dim} exceeds cap {cap}")]
    DenseCapExceeded { dim: usize, cap: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("matrix not positive definite (failing pivot index {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("degenerate row {0}: zero norm")]
    DegenerateRow(usize),

    #[error("all rows of the matrix are zero")]
    ZeroMatrix,

    #[error("breakdown: {0}")]
    Breakdown(String),

    #[error("least-squares factor is numerically rank deficient at column {0}")]
    RankDeficient(usize),

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
