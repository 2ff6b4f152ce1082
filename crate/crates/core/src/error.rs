use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of a formula (zero distance, empty split, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration field violates its invariant.
    #[error("invalid {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    /// The amplification factor would exceed the configured per-element cap.
    #[error("amplification factor {alpha} exceeds cap {alpha_max}")]
    AmplitudeCap { alpha: f64, alpha_max: f64 },

    /// A brute-force search would need more evaluations than allowed.
    #[error("search needs {required} evaluations, limit is {limit}")]
    BudgetExceeded { required: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
