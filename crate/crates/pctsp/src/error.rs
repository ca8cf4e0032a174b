//! Crate-wide error type.

/// Errors surfaced by the library.
///
/// `Invariant` marks conditions that a correct run can never reach (they
/// indicate an arithmetic or bookkeeping bug, not bad input) and is kept
/// separate from input-shaped errors so callers can map them to distinct
/// exit codes.
#[derive(thiserror::Error, Debug)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid tour: {0}")]
    InvalidTour(String),
    #[error("json: {0}")]
    Json(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("lp: {0}")]
    Lp(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parameter out of domain: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
