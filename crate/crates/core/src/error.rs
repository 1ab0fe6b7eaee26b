use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed interval: lo {lo} exceeds hi {hi}")]
    MalformedInterval { lo: String, hi: String },
    #[error("operation requires a non-empty set")]
    EmptySet,
    #[error("scale must be strictly positive, got {0}")]
    NonPositiveScale(String),
    #[error("point {0} is not in the set")]
    CenterNotInSet(String),
    #[error("scale order violated: {0}")]
    ScaleOrderViolation(String),
    #[error("brute-force oracle limited to {limit} points, got {got}")]
    TooLarge { limit: usize, got: usize },
    #[error("ratio {0} outside the admissible range")]
    RatioOutOfRange(String),
    #[error("index {requested} beyond horizon {horizon}")]
    HorizonExceeded { requested: usize, horizon: usize },
    #[error("level {0} is not defined for this system")]
    LevelOutOfRange(usize),
    #[error("pullback decay bound failed at step {step}: {distance} > {bound}")]
    DecayViolation { step: usize, distance: String, bound: String },
    #[error("exponent equation needs at least one ratio")]
    EmptyRatios,
    #[error("need at least {needed} scales, got {got}")]
    TooFewScales { needed: usize, got: usize },
    #[error("system is not autonomous")]
    NotAutonomous,
    #[error("exponent {given} does not solve the Moran equation (solution {solved})")]
    ExponentMismatch { given: f64, solved: f64 },
    #[error("open-set condition not certified")]
    OpenSetConditionFailed,
    #[error("parse error: {0}")]
    Parse(String),
}
