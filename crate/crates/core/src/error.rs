use thiserror::Error;

use crate::geometry::Point;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("unknown map id `{0}`")]
    UnknownMap(String),
    #[error("invalid map parameter: {0}")]
    InvalidParameter(String),
    #[error("point {0:?} lies on the critical set")]
    CriticalPoint(Point),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrbitError {
    #[error("invalid orbit request: {0}")]
    InvalidArgument(String),
    #[error("orbit hits the critical set at step {step}")]
    CriticalHit { step: usize },
    #[error("critical hit produced a singular cocycle ({hits} excluded steps)")]
    DegenerateCocycle {
        hits: usize,
        partial: crate::orbit::LyapunovEstimate,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HyperbolicError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("need at least 3 hyperbolic times, found {0}")]
    TooFewTimes(usize),
    #[error("no hyperbolic times along the record")]
    NoHyperbolicTimes,
    #[error("no power ℓ ≤ {max} gives a cocycle average below −4c (c = {c})")]
    NoSuchPower { c: f64, max: usize },
    #[error("calibration ladder exhausted: no c reaches frequency {threshold}")]
    CalibrationFailed { threshold: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BallError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("inverse-branch continuation crossed the critical set at pull-back step {step}")]
    BranchAmbiguity { step: usize },
    #[error("images do not cover the phase space within {0} steps")]
    NotCoveredBy(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClosingError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no verified periodic point with period ≤ {0}")]
    NotFound(usize),
    #[error("root refinement left the ball")]
    SearchDiverged,
    #[error("no hyperbolic time brackets n = {0} within the record")]
    NoHyperbolicFrame(usize),
    #[error("no reference measure integral available for {0}")]
    UnknownReference(String),
    #[error(transparent)]
    Ball(#[from] BallError),
    #[error(transparent)]
    Hyperbolic(#[from] HyperbolicError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecurrenceError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no return within {0} steps")]
    NoReturnBy(usize),
    #[error("{censored} of {total} samples censored on one radius ladder (limit 20%)")]
    Censored { censored: usize, total: usize },
}
