//! Centralized numerical tolerances.
//!
//! Every comparison in the crate funnels through these constants (or a
//! [`Tolerances`] value seeded from them) so a single edit retunes the whole
//! suite and no magic epsilon hides in a call site.

/// Absolute tolerance for quantities computed by exact linear algebra
/// (eigensolves, partial traces, closed-form identities).
pub const ATOL_EXACT: f64 = 1e-9;

/// Absolute tolerance for values produced by the interior-point SDP solver.
pub const ATOL_SDP: f64 = 1e-6;

/// Slack tolerance when asserting an inequality between exact-arithmetic
/// quantities: `lhs >= rhs - SLACK_TOL`.
pub const SLACK_TOL: f64 = 1e-7;

/// Slack tolerance for inequalities where at least one side comes from the
/// SDP solver.
pub const SLACK_TOL_SDP: f64 = 1e-5;

/// Eigenvalues below this floor are treated as zero when deciding support
/// membership (entropy sums, support-inclusion checks, purification rank).
pub const EIG_FLOOR: f64 = 1e-12;

/// Default cap on total Hilbert-space dimension for tensor products.
pub const DIM_CAP: usize = 4096;

/// Tolerance bundle passed to the bound verifiers.
///
/// Defaults mirror the crate constants; the CLI lets callers override
/// individual entries (mainly to prove that a corrupted tolerance makes the
/// suite fail rather than silently pass).
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// See [`ATOL_EXACT`].
    pub atol_exact: f64,
    /// See [`ATOL_SDP`].
    pub atol_sdp: f64,
    /// See [`SLACK_TOL`].
    pub slack_tol: f64,
    /// See [`SLACK_TOL_SDP`].
    pub slack_tol_sdp: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            atol_exact: ATOL_EXACT,
            atol_sdp: ATOL_SDP,
            slack_tol: SLACK_TOL,
            slack_tol_sdp: SLACK_TOL_SDP,
        }
    }
}

impl Tolerances {
    /// Override one named tolerance; returns false if the key is unknown.
    pub fn set(&mut self, key: &str, value: f64) -> bool {
        match key {
            "atol_exact" => self.atol_exact = value,
            "atol_sdp" => self.atol_sdp = value,
            "slack_tol" => self.slack_tol = value,
            "slack_tol_sdp" => self.slack_tol_sdp = value,
            _ => return false,
        }
        true
    }
}
