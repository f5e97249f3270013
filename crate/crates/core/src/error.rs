use thiserror::Error;

/// Largest worker universe the exhaustive tables accept (2^20 subsets).
pub const MAX_WORKERS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{what}: {got} exceeds the limit of {limit}")]
    Capacity {
        what: &'static str,
        got: usize,
        limit: usize,
    },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unknown firm {0:?}")]
    UnknownFirm(String),
    #[error("unknown worker {0:?}")]
    UnknownWorker(String),
    #[error("malformed market: {0}")]
    Malformed(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("construction could not be verified: {0}")]
    Unverified(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
