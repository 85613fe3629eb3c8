//! Library error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated its domain; `field` names the offender.
    #[error("invalid {field}: {message}")]
    Invalid { field: String, message: String },

    /// Root bracketing failed: f(lo) and f(hi) share a sign.
    #[error("no sign change on [{lo}, {hi}]: f(lo)={flo}, f(hi)={fhi}")]
    Bracket { lo: f64, hi: f64, flo: f64, fhi: f64 },

    /// Input data failed validation (for example unbalanced cells).
    #[error("data error: {0}")]
    Data(String),

    /// A file could not be parsed; the message names the offending field.
    #[error("parse error: {0}")]
    Parse(String),

    /// The optimizer exhausted its budget without a feasible improvement.
    #[error("optimization infeasible: {0}")]
    Infeasible(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }
}
