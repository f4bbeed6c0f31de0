use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("base q = {0} is outside the open interval (0, 1)")]
    InvalidBase(f64),

    #[error("invalid truncation policy: {0}")]
    InvalidPolicy(&'static str),

    #[error("zero denominator in {context} at index {index}")]
    ZeroDenominator { context: &'static str, index: i64 },

    #[error("pole of {function} at {at}")]
    Pole { function: &'static str, at: f64 },

    #[error("no convergence after {terms} terms (partial value {partial})")]
    Truncation { partial: f64, terms: usize },

    #[error("series diverges for argument {argument}")]
    Divergent { argument: f64 },

    #[error("series does not terminate")]
    NotTerminating,

    #[error("shape mismatch: {numerator} numerator vs {denominator} denominator parameters")]
    Shape { numerator: usize, denominator: usize },

    #[error("quadrature failed: {reason} (best estimate {estimate})")]
    Quadrature { reason: String, estimate: f64 },

    #[error("parameter outside admissible domain: {0}")]
    Domain(String),

    #[error("at node {index}: {source}")]
    AtNode { index: usize, source: Box<Error> },
}
