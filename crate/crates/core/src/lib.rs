//! Exact simulation of sequential coherent quantum measurements and
//! numerical certification of the entropic bounds they obey.
//!
//! A "coherent measurement" couples a system `S` to a fresh memory register
//! `M` with a controlled-shift unitary instead of collapsing the state.
//! Measuring `S` twice in a row, in two different bases, leaves `S` entangled
//! with the pair of memories whenever the bases are incompatible. This crate
//! provides:
//!
//! - a small dense complex linear-algebra kernel ([`linalg`]),
//! - bases, states, and device distributions ([`qstate`]),
//! - the measurement circuit itself ([`circuit`]),
//! - classical/quantum entropies, including SDP-based conditional
//!   min-entropy ([`entropy`]),
//! - verifiers that certify each bound and identity numerically and return
//!   machine-readable reports ([`bounds`]).
//!
//! Everything is deterministic: randomized constructions take explicit seeds,
//! and all tolerances live in [`tol`].

pub mod bounds;
pub mod circuit;
pub mod entropy;
pub mod linalg;
pub mod qstate;
pub mod tol;

use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix or state shapes do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// A tensor-product dimension would exceed the configured cap.
    #[error("dimension {0} exceeds cap {1}")]
    DimensionCap(usize, usize),
    /// Input violates a mathematical precondition (not Hermitian, not a
    /// density operator, not a distribution, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// The request is valid but outside what this operation supports.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// An iterative solver failed to reach its convergence criterion.
    #[error("convergence failure: {0}")]
    Convergence(String),
    /// A subsystem label was not found on the state.
    #[error("unknown subsystem label: {0}")]
    UnknownLabel(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
