use thiserror::Error;

use crate::convexity::ConvexityVerdict;
use crate::quadrature::QuadResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter error: {0}")]
    Param(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite function value at x = {x}")]
    NonFinite { x: f64 },

    #[error(
        "evaluation budget exhausted after {} evaluations (estimate {}, error {})",
        .0.evaluations, .0.value, .0.error_estimate
    )]
    Budget(QuadResult),

    #[error(
        "hypothesis not satisfied: worst violation {} at (x, y, t) = ({}, {}, {})",
        .0.worst_violation, .0.witness.0, .0.witness.1, .0.witness.2
    )]
    Gate(Box<ConvexityVerdict>),

    #[error("unknown identifier: {0}")]
    Unknown(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
