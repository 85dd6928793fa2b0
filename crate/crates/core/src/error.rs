use thiserror::Error;

/// Error type shared by every module in this crate.
///
/// The CLI maps the variants onto process exit codes, so the split
/// mirrors the externally visible failure classes: bad arguments,
/// unparseable input, a size guard refusing oversized work, and
/// internal invariant violations (which always indicate a bug here,
/// never bad user input).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
