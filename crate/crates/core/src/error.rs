use thiserror::Error;

/// Errors produced by the detection toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The input is well-formed but carries no information (e.g. zero power).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A numerical routine failed to reach its tolerance.
    #[error("numerical failure: {0}")]
    Numeric(String),

    /// Too few Monte Carlo trials to estimate the requested tail quantile.
    #[error("insufficient trials: {trials} trials at pfa = {pfa} give fewer than 100 exceedances; need at least {min_trials}")]
    InsufficientTrials { trials: usize, pfa: f64, min_trials: usize },

    /// Every optimizer start failed to converge.
    #[error("optimization failed: {0}")]
    Optimization(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
