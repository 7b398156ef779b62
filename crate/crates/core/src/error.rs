use thiserror::Error;

/// Everything that can go wrong in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("enclosure domain error: {0}")]
    EnclosureDomain(String),
    #[error("reversal undefined for λ")]
    ReversalOfEmpty,
    #[error("invalid digit {0}: continued-fraction digits must be at least 1")]
    InvalidDigit(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("requires finite fan")]
    InfiniteFan,
    #[error("fan too large: {0} terms (pass --allow-large to evaluate)")]
    FanTooLarge(String),
    #[error("not a valid 𝓔-code: {0}")]
    InvalidCode(String),
    #[error("gale condition violated at {0}")]
    GaleConditionViolated(String),
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("exponent mismatch: {0}")]
    ExponentMismatch(String),
    #[error("weight overflow: weights sum to {0} > 1")]
    WeightOverflow(String),
    #[error("smoothing requires s > s' (got s = {s}, s' = {s_prime})")]
    SmoothingExponent { s: String, s_prime: String },
    #[error("n must exceed |w| (n = {n}, |w| = {len})")]
    NeighborLevel { n: usize, len: usize },
    #[error("exponent out of range: {0}")]
    ExponentRange(String),
    #[error("level {0} is not prefix-free")]
    NotPrefixFree(String),
    #[error("depth exceeds available schedule: {0}")]
    ScheduleDepth(String),
    #[error("indeterminate at node {0}; raise precision")]
    Indeterminate(String),
    #[error("unknown suite: {0}")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
