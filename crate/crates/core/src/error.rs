use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("covariance block is singular or not positive definite ({0})")]
    SingularBlock(String),

    #[error("symbol sets must be disjoint")]
    DisjointnessViolated,

    #[error("information quantity {raw:e} is below the clamp tolerance")]
    NegativeInformation { raw: f64 },

    #[error("ground set of size {0} is too large")]
    GroundSetTooLarge(usize),

    #[error("mixture weights must be non-negative and sum to one")]
    BadWeights,

    #[error("average power {value} exceeds the cap {cap} at coordinate {index}")]
    PowerViolated { index: usize, value: f64, cap: f64 },

    #[error("quantization covariance is not positive semidefinite")]
    QNotPsd,

    #[error("fronthaul capacity must be positive, got {0}")]
    BadCapacity(f64),

    #[error("channel matrix is singular")]
    SingularChannel,

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("time-share weight {name} = {value} lies outside (0, 1]")]
    WeightOutOfRange { name: &'static str, value: f64 },

    #[error("target sum rate {rate} exceeds the achievable value {max}")]
    InfeasibleRate { rate: f64, max: f64 },

    #[error("sweep column {column} decreases at C = {c}")]
    NonMonotone { column: &'static str, c: f64 },

    #[error("identity check failed: {what} (residual {residual:e})")]
    IdentityFailed { what: &'static str, residual: f64 },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
