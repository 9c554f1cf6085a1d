use thiserror::Error;

/// Errors shared across the certificate pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("bad input: {0}")]
    BadInput(String),

    #[error("integer overflow: {0}")]
    Overflow(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e}, tol {tol:.3e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        tol: f64,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn bad_input(msg: impl Into<String>) -> Self {
        Error::BadInput(msg.into())
    }

    pub fn budget(msg: impl Into<String>) -> Self {
        Error::Budget(msg.into())
    }

    /// Process exit code convention: 1 invariant failure, 2 bad input, 3 budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BadInput(_) => 2,
            Error::Budget(_) | Error::Overflow(_) => 3,
            _ => 1,
        }
    }
}
