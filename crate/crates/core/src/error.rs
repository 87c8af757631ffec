use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension {0} unsupported (need 3 <= n <= {max})", max = crate::jet::MAX_DIM)]
    Dimension(usize),
    #[error("invalid chart point: {0}")]
    InvalidPoint(String),
    #[error("point outside the metric domain: {0}")]
    Domain(String),
    #[error("metric not positive definite at {0:?}")]
    NotPositiveDefinite(Vec<f64>),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("quadrature rejected: {0}")]
    Quadrature(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("divergent tail: {0}")]
    DivergentTail(String),
    #[error("critical point of the potential encountered: |grad f| = {0:e}")]
    CriticalPoint(f64),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
