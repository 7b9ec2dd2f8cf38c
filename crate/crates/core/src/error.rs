use thiserror::Error;

/// Errors surfaced by the simulation and analytics routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("edge probability must lie in [0, 1], got {0}")]
    ProbabilityOutOfRange(f64),

    #[error("vertex count must be at least {min}, got {got}")]
    VertexCount { min: usize, got: usize },

    #[error("branching parameter must be positive, got {0}")]
    NonPositiveLambda(f64),

    #[error("branching parameter {0} too large for series evaluation")]
    LambdaTooLarge(f64),

    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("sparse parameter {lambda} yields edge probability {lambda}/{n} > 1")]
    SparseParameterTooLarge { lambda: f64, n: usize },

    #[error("degenerate prior: no atom has positive limit density")]
    DegeneratePrior,

    #[error("degenerate target: sigma^2 = 0 for the requested set")]
    DegenerateVariance,

    #[error("exhaustive enumeration supports n <= {max}, got {n}")]
    EnumerationTooLarge { n: usize, max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
