use thiserror::Error;

/// Errors raised by the numerical operations of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid exponent p = {0} (must be >= 1)")]
    InvalidExponent(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("vector field has no components")]
    EmptyField,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("radius {radius} exceeds the domain half-width {half_width}")]
    DomainTruncation { radius: f64, half_width: f64 },

    #[error("time t = {t} too large for the box (sqrt(t) must be <= {limit})")]
    HeatTruncation { t: f64, limit: f64 },

    #[error("series for argument {argument} did not converge within {max_terms} terms")]
    SeriesCap { argument: f64, max_terms: usize },

    #[error("kernel argument {0} overflows f64")]
    KernelOverflow(f64),

    #[error("root system: {0}")]
    RootSystem(String),

    #[error("requires p <= q (got p = {p}, q = {q})")]
    ExponentOrder { p: f64, q: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
