//! Numerical thresholds shared across the crate.
//!
//! All values are absolute and apply to unit-trace states of dimension up to a
//! few thousand.

/// Maximum entrywise deviation `|ρ - ρ†|` for a Hermitian matrix.
pub const HERMITICITY: f64 = 1e-10;

/// Maximum deviation `|Tr ρ - 1|` (and `|‖ψ‖² - 1|` for pure states).
pub const TRACE: f64 = 1e-10;

/// Eigenvalues in `[-PSD, 0)` are clamped to zero; anything below is a hard error.
pub const PSD: f64 = 1e-9;

/// Eigenvalues at or below this are outside the support.
pub const SUPPORT_EIGENVALUE: f64 = 1e-11;

/// Largest tolerated leakage `‖(I - Π_σ) Π_ρ‖` before the support test fails.
pub const SUPPORT_LEAKAGE: f64 = 1e-7;

/// Relative entropies in `[-RELATIVE_ENTROPY_FLOOR, 0)` are clamped to zero.
pub const RELATIVE_ENTROPY_FLOOR: f64 = 1e-9;

/// Truncation weights at or below this kill the state.
pub const TRUNCATION_WEIGHT: f64 = 1e-12;

/// A state is pure when its largest eigenvalue is at least `1 - PURITY`.
pub const PURITY: f64 = 1e-8;

/// Entrywise tolerance on `Σ K†K = I`.
pub const TRACE_PRESERVATION: f64 = 1e-10;

/// Margins whose magnitude is below this are annotated as saturated.
pub const SATURATION: f64 = 1e-10;
