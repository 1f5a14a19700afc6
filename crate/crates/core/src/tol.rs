//! Numerical tolerances used across the toolkit.
//!
//! Dimensions stay at or below 256, so accumulated round-off in the dense
//! kernels is well under 1e-12; the 1e-10 class of tolerances dominates it
//! comfortably while still rejecting genuinely invalid inputs.

/// Hermiticity deviation accepted when validating states and observables.
pub const HERMITICITY: f64 = 1e-10;

/// Accepted deviation of the trace from one for density matrices.
pub const TRACE: f64 = 1e-10;

/// Eigenvalues above this negative floor still count as nonnegative.
pub const PSD: f64 = -1e-10;

/// Eigenvalues below this magnitude are treated as zero (entropies, ranks).
pub const EIGEN_ZERO: f64 = 1e-14;

/// Slack added on top of every analytic criterion bound before a
/// criterion is allowed to fire, keeping classifier outcomes stable
/// under round-off.
pub const FIRE_SLACK: f64 = 1e-9;

/// Norm deviation accepted for pure-state inputs.
pub const STATE_NORM: f64 = 1e-10;

/// Unit-modulus deviation accepted for generalized Bell-basis phases.
pub const PHASE_UNIT: f64 = 1e-12;

/// Overlap deviation accepted when validating MUB / SIC / GSIC sets.
pub const POVM_OVERLAP: f64 = 1e-9;

/// Product-state expectation floor for the witness construction gate.
pub const WITNESS_GATE: f64 = -1e-8;

/// Residual accepted for kernel-polytope membership certificates.
pub const KERNEL_RESIDUAL: f64 = 1e-9;

/// Convergence threshold for see-saw alternations.
pub const SEESAW_CONVERGENCE: f64 = 1e-10;
