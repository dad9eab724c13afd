//! Error taxonomy shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An operation that requires odd (or even) sizes was given the wrong parity.
    #[error("parity error: {0}")]
    Parity(String),

    /// Structural argument violation (dimension mismatch, bad ranges, missing context).
    #[error("argument error: {0}")]
    Argument(String),

    /// A matrix is too ill-conditioned for the requested operation.
    #[error("conditioning error: {0}")]
    Conditioning(String),

    /// An iterative numeric procedure failed to converge.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A caller broke a documented contract (e.g. asymmetric input to a symmetric op).
    #[error("contract error: {0}")]
    Contract(String),

    /// Unknown identifier; the message lists valid choices.
    #[error("lookup error: {0}")]
    Lookup(String),

    /// Malformed preset string, model file or flag value.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;
