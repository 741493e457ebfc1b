use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("hurst out of open interval (0,1): {0}")]
    HurstOutOfRange(f64),

    #[error("coeffs and hurst must have the same length (got {coeffs} and {hurst})")]
    LengthMismatch { coeffs: usize, hurst: usize },

    #[error("a process spec needs at least one component")]
    EmptySpec,

    #[error("at least one coefficient must be nonzero")]
    AllCoefficientsZero,

    #[error("coefficient must be finite, got {0}")]
    NonFiniteCoefficient(f64),

    #[error("times must be nonnegative and finite, got {0}")]
    NegativeTime(f64),

    #[error("time ordering violated: {0}")]
    TimeOrder(String),

    #[error("lag must be at least 1")]
    ZeroLag,

    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("Gram matrix factorization failed at every jitter level (max diagonal {max_diag:e})")]
    FactorizationFailure { max_diag: f64 },

    #[error("need at least 2 replicas, got {0}")]
    InsufficientReplicas(usize),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("insufficient resolution: {0}")]
    InsufficientResolution(String),

    #[error("level {0} is not crossed by the path")]
    LevelNotCrossed(f64),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for errors caused by bad inputs, as opposed to numerical
    /// breakdown or estimator limits.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::FactorizationFailure { .. }
                | Error::InsufficientResolution(_)
                | Error::LevelNotCrossed(_)
        )
    }
}
