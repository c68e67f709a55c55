//! Numerical tolerances and resource guards shared across the crate.

/// Hermitian symmetry slack, relative to `max(1, max |a_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Default Jacobi convergence threshold on the off-diagonal Frobenius mass,
/// relative to `max(1, ||A||_F)`.
pub const JACOBI_TOL: f64 = 1e-12;

/// Sweep budget for the cyclic Jacobi eigensolver.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Unit-norm precondition slack on `| ||phi|| - 1 |`.
pub const UNIT_NORM_TOL: f64 = 1e-8;

/// A frame with lower bound at or below this is reported as not spanning.
pub const FRAME_LOWER_TOL: f64 = 1e-10;

/// `delta <= TIGHT_TOL` classifies a frame as tight.
pub const TIGHT_TOL: f64 = 1e-6;

/// Slack on orthonormality checks of MUB blocks and cross-basis coherence.
pub const MUB_TOL: f64 = 1e-8;

/// Upper limit on `binomial(N, J)` for exhaustive subframe enumeration.
pub const EXHAUSTIVE_SUBSET_LIMIT: f64 = 2e7;

/// Upper limit on `M^m |Lambda|^m` for the exact combinatorial trace sum.
pub const EXACT_TRACE_TERM_LIMIT: f64 = 1e8;

/// Largest moment order accepted by the permutation search.
pub const MAX_BIJECTION_ORDER: usize = 8;

/// Rounding allowance in Monte-Carlo coverage checks, relative to
/// `max(1, |value|)`. Matters only when the sampled quantity is almost surely
/// constant and the standard error collapses to rounding noise.
pub const MC_ROUNDING_TOL: f64 = 1e-10;
