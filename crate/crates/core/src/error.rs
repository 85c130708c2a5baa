use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} qubits, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("not a line: {0}")]
    NotALine(String),

    #[error("invalid operator string {0:?}")]
    Parse(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("search space too large: {reason}")]
    Intractable {
        reason: String,
        /// Reference bound reported instead of a computed optimum, if one is known.
        reference: Option<String>,
    },

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Internal invariant violations are simulation bugs; everything else is a
    /// problem with the request.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_) | Error::Consistency(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
