use thiserror::Error;

use crate::expr::{EvalError, ParseError};

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty box on axis {axis}: [{lo}, {hi}]")]
    EmptyBox { axis: usize, lo: f64, hi: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("field `{0}` has no declared positivity floor")]
    MissingFloor(String),
    #[error("the refine method supports dimensions 1 to 3; use the stochastic method for dimension {0}")]
    DimensionTooHigh(usize),
    #[error("tolerance not met: error estimate {err:e} exceeds target {target:e}")]
    ToleranceNotMet { err: f64, target: f64 },
    #[error("denominator {value:e} is indistinguishable from zero (error bound {err:e})")]
    ZeroDenominator { value: f64, err: f64 },
    #[error("all {0} seeds were dropped as numerically dependent")]
    AllSeedsDropped(usize),
    #[error("orthogonality residual {residual:e} exceeds tolerance {tol:e}")]
    NotOrthogonal { residual: f64, tol: f64 },
    #[error("family weight is not the reciprocal of `{0}`")]
    WeightMismatch(String),
    #[error("truncation {n} exceeds family size {size}")]
    Truncation { n: usize, size: usize },
    #[error("cell {cell}: {source}")]
    Cell { cell: usize, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;
