use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A line of an input file could not be parsed.
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// Input is syntactically valid but describes an impossible shape
    /// (index out of range, missing header field, ...).
    #[error("structural error: {0}")]
    Structure(String),

    /// Numerical invariants do not hold (asymmetric tensors, indefinite
    /// matrices, non-finite entries).
    #[error("validation error: {0}")]
    Validation(String),

    /// Caller passed arguments that violate an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Problem exceeds a dense-representation size guard.
    #[error("size guard exceeded: {0}")]
    TooLarge(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
