use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{series} did not converge within {max_terms} terms (last term {last_term:e})")]
    Truncation {
        series: &'static str,
        max_terms: usize,
        last_term: f64,
    },

    #[error("adaptive quadrature on [{lo}, {hi}] failed to reach tolerance {tol:e}")]
    Quadrature { lo: f64, hi: f64, tol: f64 },

    #[error("{what}({x}) = {value} lies outside [0, 1] beyond tolerance")]
    RangeViolation {
        what: &'static str,
        x: f64,
        value: f64,
    },

    #[error("argument {x} outside the evaluation domain |x| <= {limit}")]
    OutOfDomain { x: f64, limit: f64 },

    #[error("invalid die probabilities p1 = {p1}, p2 = {p2}")]
    InvalidProbabilities { p1: f64, p2: f64 },

    #[error("empty input vector")]
    EmptyInput,

    #[error("length mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("the feasible perturbation set is empty for t = {t}, n = {n}")]
    EmptyFeasibleSet { t: f64, n: usize },

    #[error("invalid value for `{field}`: {reason}")]
    InvalidSpec { field: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn spec(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidSpec {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
