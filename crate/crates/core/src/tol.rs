//! Numerical thresholds shared across modules.
//!
//! The zero clamp is used both when building slack matrices and when reading
//! the zero pattern of a DNN matrix, so both sides agree on what "zero" means.

/// Relative singular-value cut for numeric rank.
pub const RANK: f64 = 1e-8;

/// Entries below this (absolute, after unit normalization, or relative to ‖A‖∞) are exact zeros.
pub const ZERO_CLAMP: f64 = 1e-10;

/// Generators with cosine similarity at least `1 − COSINE` are treated as the same ray.
pub const COSINE: f64 = 1e-9;

/// Default incidence tolerance for "generator lies on a hyperplane" with unit vectors.
pub const INCIDENCE: f64 = 1e-9;

/// Allowed `|A_ij − A_ji|` relative to `max(1, |A_ij|)`.
pub const SYMMETRY: f64 = 1e-12;

/// Jacobi stops once the off-diagonal Frobenius norm is below this times ‖A‖_F.
pub const JACOBI_OFF_DIAGONAL: f64 = 1e-13;

/// Relative residual allowed in the cycle conditions of the symmetric scaling equations.
pub const SCALING_CYCLE: f64 = 1e-8;

/// PSD acceptance: minimum eigenvalue at least `-PSD·‖A‖∞`.
pub const PSD: f64 = 1e-9;
