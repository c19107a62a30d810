use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("size mismatch: expected {expected} values, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("invalid input `{name}`: {reason}")]
    InvalidInput { name: &'static str, reason: String },

    /// Lateral boundary data violates `0 <= g <= (1 - xn) g(x', 0) + xn g(x', 1)`.
    #[error("boundary data violates the admissibility condition at lateral node {node} (xn = {xn}): g = {value}, bound = [0, {upper}]")]
    Admissibility {
        node: usize,
        xn: f64,
        value: f64,
        upper: f64,
    },

    #[error("{solver} did not converge in {iterations} iterations (last relative residual {residual:e})")]
    NotConverged {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("input is not certified: {0}")]
    Uncertified(String),

    #[error("{0}")]
    NotApplicable(String),
}

impl Error {
    pub(crate) fn input(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            name,
            reason: reason.into(),
        }
    }
}
