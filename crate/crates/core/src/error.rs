use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite parameter: {0}")]
    NonFinite(&'static str),

    #[error("rate constant {0} must be positive")]
    NonPositiveRate(&'static str),

    #[error("equilibrium coordinates must be positive (got {0}, {1})")]
    NonPositiveEquilibrium(f64, f64),

    #[error("point is not an equilibrium: relative residual {residual:e} exceeds {tolerance:e}")]
    NotAnEquilibrium { residual: f64, tolerance: f64 },

    #[error("all signed areas vanish: the four exponent points are collinear")]
    CollinearPoints,

    #[error("degenerate system: {0}")]
    Degenerate(String),

    #[error("configuration mismatch: {0}")]
    Configuration(String),

    #[error("state is outside the open simplex")]
    OutOfDomain,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
