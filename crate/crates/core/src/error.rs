use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid chain member: {0}")]
    InvalidMember(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("n = {n} exceeds the limit of {cap}")]
    ResourceLimit { n: usize, cap: usize },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("singular configuration: {0}")]
    Singular(String),

    #[error("outside the domain: {0}")]
    Domain(String),

    #[error("no feasible point after {starts} starts (best residual {best_residual:.3e})")]
    Convergence { starts: usize, best_residual: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
