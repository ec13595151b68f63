use thiserror::Error;

/// Errors produced by the geometric operations in this crate.
#[derive(Debug, Error)]
pub enum HeisError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("points coincide; no connecting geodesic is defined")]
    CoincidentPoints,

    #[error("root solve did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("radius recursion left f64 range at step {step}")]
    RadiusOverflow { step: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, HeisError>;
