//! Crate-wide error and result types.

use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed concrete syntax; `pos` is a byte offset into the input text.
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// A configured resource cap would be exceeded by the requested operation.
    #[error("resource cap exceeded: {what} = {value} exceeds cap {cap}")]
    Cap { what: String, value: u64, cap: u64 },

    /// A wall-clock deadline was exceeded.
    #[error("timed out after {0} ms")]
    Timeout(u64),

    /// Structurally invalid input (bad agent count, unknown atom, bad file, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// Two independent implementations of the same definition disagreed.
    /// This always indicates a bug and is never expected on valid inputs.
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

impl Error {
    /// Convenience constructor for cap violations.
    pub fn cap(what: impl Into<String>, value: u64, cap: u64) -> Self {
        Error::Cap { what: what.into(), value, cap }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
