//! Error taxonomy shared by all modules.
//!
//! Three failure classes matter to callers: malformed inputs (`Structural`),
//! instances too large for an exact method (`Resource`), and conditions that
//! indicate a bug rather than bad input (`Internal`).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// The input violates a documented precondition or invariant.
    #[error("structural error: {0}")]
    Structural(String),

    /// The instance exceeds a size cap for the requested exact method.
    #[error("resource limit: {message}")]
    Resource { message: String },

    /// A condition that cannot arise from user input; signals a bug.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource {
            message: msg.into(),
        }
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
