use thiserror::Error;

/// Errors raised by the library.
///
/// `Contract` marks a violated precondition of an operation (the caller passed
/// something the operation is not defined on). `Domain` marks a well-formed
/// request that has no answer for the given parameters, e.g. asking for the
/// atom of an unbounded parameter. `Parse` covers the text formats.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! contract {
    ($($arg:tt)*) => { $crate::error::Error::Contract(format!($($arg)*)) };
}

macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(format!($($arg)*)) };
}

pub(crate) use contract;
pub(crate) use domain;
