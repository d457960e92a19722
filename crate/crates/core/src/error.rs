use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Operand shapes or moduli do not line up.
    #[error("structural mismatch: {0}")]
    Structure(String),

    /// A bit/symbol string has the wrong length for the tree.
    #[error("length mismatch: expected {expected}, got {actual} ({what})")]
    Length {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    /// Parameters or values violate a documented invariant.
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// A caller-side precondition does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Malformed descriptor or command-line style input.
    #[error("usage: {0}")]
    Usage(String),

    /// Malformed serialized data.
    #[error("data format: {0}")]
    Format(String),

    /// Epoch bookkeeping does not match (updatable encryption).
    #[error("protocol: {0}")]
    Protocol(String),

    /// Robust decoding found a residual beyond the tolerated head-room.
    #[error("integrity: {0}")]
    Integrity(String),

    /// The evaluation cache does not hold what an incremental evaluation needs.
    #[error("stale cache: {0}")]
    StaleCache(String),
}

impl Error {
    /// Process exit code for this error class: 2 usage, 3 data-format,
    /// 4 invariant-violation, 5 precondition.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            Error::Format(_) => 3,
            Error::Invariant(_) | Error::Structure(_) | Error::StaleCache(_) => 4,
            Error::Length { .. }
            | Error::Precondition(_)
            | Error::Protocol(_)
            | Error::Integrity(_) => 5,
        }
    }

    pub(crate) fn length(what: &'static str, expected: usize, actual: usize) -> Self {
        Error::Length {
            what,
            expected,
            actual,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
