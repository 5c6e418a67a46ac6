//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the numerical operations.
///
/// Absence of a result (a bounded orbit, an empty sample) is *not* an
/// error; these variants flag genuine domain violations or numerical
/// failures that the caller must handle.
#[derive(Debug, Clone, Error)]
pub enum BifError {
    /// Input outside the domain of definition of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A branch of a multivalued function could not be continued.
    #[error("branch error: {0}")]
    Branch(String),

    /// Grid resolution too coarse to resolve the required topology.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// Polynomial interpolation failed even after the extended retry.
    #[error("conditioning error: {0}")]
    Conditioning(String),

    /// An iterative solve ran out of its budget without a certificate.
    #[error("budget exhausted: {0}")]
    Budget(String),

    /// Degenerate configuration (e.g. the critical points collide at c = 0).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Requested computation exceeds the configured memory guard.
    #[error("memory guard: {0}")]
    MemoryGuard(String),
}

pub type Result<T> = std::result::Result<T, BifError>;
