use thiserror::Error;

/// Errors surfaced by the analytic and simulation layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument was outside the mathematical domain of the operation.
    #[error("domain error in {op}: {message}")]
    Domain { op: &'static str, message: String },

    /// A root finder could not bracket a sign change.
    #[error("no sign change bracketing a root of {op} on [{lo}, {hi}]")]
    BracketFailure { op: &'static str, lo: f64, hi: f64 },

    /// An iterative solver ran out of iterations.
    #[error("{op} did not converge after {iterations} iterations (last residual {residual:e})")]
    NonConvergence {
        op: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// A spectral density failed validation.
    #[error("invalid spectral density: {0}")]
    InvalidSpectrum(String),

    /// A simulation was refused because it would exceed a resource cap.
    #[error("resource cap exceeded: {message} (requested {requested}, cap {cap})")]
    ResourceCap {
        message: String,
        requested: u64,
        cap: u64,
    },

    /// Experiment configuration failed validation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(op: &'static str, message: impl Into<String>) -> Self {
        Error::Domain {
            op,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
