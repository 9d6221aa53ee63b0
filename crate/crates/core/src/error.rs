use thiserror::Error;

/// Errors raised by the library operations.
///
/// Every variant renders as a single line so the CLI can forward it to
/// stderr unchanged.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain: {0}")]
    Domain(String),

    #[error("index mismatch: {0}")]
    IndexMismatch(String),

    #[error("range: {0}")]
    Range(String),

    #[error("precondition: {0}")]
    Precondition(String),

    #[error("zero function: {0}")]
    ZeroFunction(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("empty eigenspace: no integer points with d={d}, n={n}")]
    EmptySphere { d: usize, n: u64 },

    #[error("non-convergence: {what} after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("internal consistency: {0}")]
    Consistency(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
