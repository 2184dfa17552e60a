use thiserror::Error;

/// Errors raised by the accounting library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("no parameter reaches expected count {mean}: {reason}")]
    InfeasibleMean { mean: f64, reason: String },

    #[error("target {target:e} is unreachable: {reason}")]
    UnreachableTarget { target: f64, reason: String },

    #[error("loss grid too coarse: refining changed delta({eps}) from {coarse:e} to {fine:e}")]
    GridTooCoarse { eps: f64, coarse: f64, fine: f64 },

    #[error("composition needs {cells} grid cells, above the budget of {budget}")]
    MemoryBudget { cells: usize, budget: usize },

    #[error("no admissible Renyi order for the requested baseline")]
    EmptyCurve,

    #[error("neighbouring score vectors differ by {gap} in coordinate {index}")]
    SensitivityViolation { index: usize, gap: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn require_finite_positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("expected a finite positive value, got {v}")))
    }
}

pub(crate) fn require_probability(name: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(name, format!("expected a value in [0,1], got {v}")))
    }
}
