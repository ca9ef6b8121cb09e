use alloc::boxed::Box;
use alloc::string::String;

/// Errors raised by the simulation, spectral and estimation routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument or parameter lies outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A matrix handed to a symmetric solver is not symmetric.
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    /// An iterative eigensolver ran out of iterations.
    #[error("no convergence after {iters} iterations (last residual {residual:e})")]
    NoConvergence { residual: f64, iters: usize },

    /// The series fixed-point iterate left its admissible bracket.
    #[error("series fixed point left [{lower}, {upper}] (iterate {iterate})")]
    SeriesDivergence { iterate: f64, lower: f64, upper: f64 },

    /// A failure while processing one point of a time grid.
    #[error("at grid index {index}: {source}")]
    AtGridPoint { index: usize, source: Box<Error> },

    /// An estimator was given fewer samples than it needs.
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
