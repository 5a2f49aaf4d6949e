use thiserror::Error;

/// Errors raised by the simulator core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A numeric argument was outside its domain (negative distance, NaN, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A scenario or policy parameter violates its contract.
    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    /// Shapes that must agree did not.
    #[error("internal error: {0}")]
    Internal(String),

    /// A run-time invariant failed during simulation.
    #[error("invariant `{invariant}` violated at slot {slot}: {detail}")]
    InvariantViolation {
        slot: u64,
        invariant: &'static str,
        detail: String,
    },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
