use thiserror::Error;

use crate::rootfind::Bracket;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("no sign change found after {doublings} doublings (last bracket [{lo}, {hi}])")]
    BracketFailure { lo: f64, hi: f64, doublings: u32 },

    #[error("root finder did not converge in {iterations} iterations (best bracket [{}, {}])", .bracket.lo, .bracket.hi)]
    NoConvergence { iterations: usize, bracket: Bracket },

    #[error("moment of order {order} overflows (ln E[X^n] = {log_value})")]
    MomentOverflow { order: u32, log_value: f64 },

    #[error("objective is not finite at stencil point {point:?}")]
    StencilFailure { point: Vec<f64> },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("uncertainty unavailable: {0}")]
    UncertaintyUnavailable(String),

    #[error("no k in the grid produced a converged fit: {}", .0.join("; "))]
    AllFitsFailed(Vec<String>),
}
