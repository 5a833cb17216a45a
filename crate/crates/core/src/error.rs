use thiserror::Error;

/// Errors produced by index computation, table generation and simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid Bernoulli state: need 0 < sigma < n, got sigma={sigma}, n={n}")]
    InvalidBernoulliState { sigma: f64, n: f64 },

    #[error(
        "invalid normal state: need finite mu and n > 0, tau > 0, got mu={mu}, n={n}, tau={tau}"
    )]
    InvalidNormalState { mu: f64, n: f64, tau: f64 },

    #[error("discount factor must lie in [0, 1), got {0}")]
    InvalidDiscount(f64),

    #[error("invalid calibration interval: lower={lower}, upper={upper}, epsilon={epsilon}")]
    InvalidInterval {
        lower: f64,
        upper: f64,
        epsilon: f64,
    },

    #[error("epsilon {epsilon} is below the supported floor {floor}")]
    EpsilonTooSmall { epsilon: f64, floor: f64 },

    #[error("initial interval does not bracket the index: value is {side} at lambda={lambda}")]
    BoundViolation { side: BoundSide, lambda: f64 },

    #[error("lambda must be finite, got {0}")]
    NonFiniteLambda(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("query {0} lies outside the table")]
    OutOfRange(String),

    #[error("failed at state {state}: {source}")]
    AtState {
        state: String,
        #[source]
        source: Box<Error>,
    },

    #[error("table format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

/// Which end of a calibration interval was found unsafe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSide {
    /// The value was still positive at the upper end.
    PositiveAtUpper,
    /// The value was already zero at the lower end.
    ZeroAtLower,
}

impl std::fmt::Display for BoundSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundSide::PositiveAtUpper => write!(f, "positive at the upper end"),
            BoundSide::ZeroAtLower => write!(f, "zero at the lower end"),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
