use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Malformed partitions, strategies or games.
    #[error("structural error: {0}")]
    Structural(String),
    /// An operation was called outside its domain.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The instance exceeds a configured size cap.
    #[error("size cap exceeded: {0}")]
    Size(String),
    /// The model lacks a property the method relies on (e.g. perfect recall).
    #[error("model error: {0}")]
    Model(String),
    /// Conditioning on an event of probability zero.
    #[error("conditioning on a null event: {0}")]
    Conditioning(String),
    #[error("parse error: {0}")]
    Parse(String),
    /// Two computations that must agree did not.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(alloc::format!($($arg)*)))
    };
}

pub(crate) use bail;
