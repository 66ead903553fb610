//! Error type shared across the crate.

/// Errors raised by estimators, bandwidth selectors, and theory routines.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// An argument fell outside its mathematical domain (nonpositive
    /// bandwidth, nonpositive evaluation point, and so on).
    #[error("domain error: {0}")]
    Domain(String),

    /// The sample is empty or too small for the requested operation.
    #[error("sample error: {0}")]
    Sample(String),

    /// All log-scale observations are identical, so every scale estimate
    /// is zero and no data-driven bandwidth exists.
    #[error("degenerate sample: all log-scale observations are identical")]
    DegenerateSample,

    /// A bandwidth search failed to produce a usable minimizer or root.
    #[error("bandwidth optimization failed: {0}")]
    Optimization(String),

    /// A required integral or moment does not converge for the target.
    #[error("divergent functional: {0}")]
    DivergentFunctional(String),

    /// The requested combination of options is not implemented.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Invalid configuration value (grid sizes, simulation settings, ...).
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
