use thiserror::Error;

use crate::state::Repr;

/// Errors raised by the propagation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected:?}, got {found:?}")]
    Dimension { expected: Repr, found: Repr },

    #[error("length mismatch: {left} vs {right}")]
    Length { left: usize, right: usize },

    #[error("invalid Chebyshev order {0}")]
    InvalidOrder(usize),

    #[error("empty input")]
    Empty,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The inhomogeneity needs more Chebyshev terms than there are samples.
    #[error("inhomogeneity series not converged with {n_samples} samples (best ratio {ratio:e})")]
    IncreaseSamples { n_samples: usize, ratio: f64 },

    /// An operator-function series did not converge within the sample cap.
    #[error("Chebyshev series did not converge within {n_max} terms (achieved ratio {ratio:e})")]
    SeriesNotConverged { n_max: usize, ratio: f64 },

    /// The Chebyshev recurrence grew, so the spectral bounds do not bracket the operator.
    #[error("Chebyshev recurrence diverged at term {term}: spectral bounds violated")]
    BoundsViolation { term: usize },

    #[error("expansion order {order} exceeds limit {limit}")]
    OrderTooLarge { order: usize, limit: usize },

    #[error("time-ordering iteration did not converge after {iterations} iterations (residual {residual:e})")]
    IterationNotConverged { iterations: usize, residual: f64 },

    #[error("operation not supported for this representation: {0}")]
    Unsupported(&'static str),

    #[error("quadrature did not converge (difference {0:e})")]
    QuadratureNotConverged(f64),

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("root finding failed: {0}")]
    RootFinding(String),
}

pub type Result<T> = std::result::Result<T, Error>;
