//! Crate-wide error type.

use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("malformed coefficient: {0}")]
    MalformedCoefficient(String),

    #[error("substitution makes denominator `{factor}` vanish identically")]
    Pole { factor: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("malformed expression: {0}")]
    MalformedExpression(String),

    #[error("mixed index variance: {0}")]
    MixedVariance(String),

    #[error("conformal weights disagree across terms: {0} vs {1}")]
    WeightMismatch(String, String),

    #[error("operation requires {expected} mode")]
    ModeError { expected: &'static str },

    #[error("unknown transformation rule for symbol `{0}`")]
    UnknownTransformation(String),

    #[error("degenerate weight: invariance solver kernel has dimension {dim} (expected 1){detail}")]
    DegenerateWeight { dim: usize, detail: String },

    #[error("critical weight: {delta} lies in {family} for (k'={kprime}, l={ell}); witness factor {factor}")]
    CriticalWeight {
        kprime: usize,
        ell: usize,
        delta: String,
        family: String,
        factor: String,
    },

    #[error("weight {delta} is not critical for (k'={kprime}, l={ell}); use the generic construction")]
    NotCritical {
        kprime: usize,
        ell: usize,
        delta: String,
    },

    #[error("no natural-operator witness: {0}")]
    NoWitness(String),

    #[error("operator not fully expanded: {0}")]
    NotExpanded(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("weight error: {0}")]
    WeightError(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
