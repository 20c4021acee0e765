//! Default numerical tolerances, collected in one place.
//!
//! All are `f64` values; convert with [`crate::Real::tol`] when a computation
//! runs over another scalar type. Operations that accept a tolerance override
//! fall back to these defaults.

/// Hermiticity / positivity / projection residuals in element classification
/// and constructor validation.
pub const CLASSIFY: f64 = 1e-10;

/// Projection-family invariants: members are projections, mutually
/// orthogonal, and sum to the identity within this bound.
pub const FAMILY: f64 = 1e-8;

/// Exact-formula comparisons (closed forms, unitary invariance, frame
/// formulas on the commutative path).
pub const EXACT: f64 = 1e-9;

/// Tight exact comparisons (classification, structured-witness attainment,
/// axiom equalities on exact kinds).
pub const STRICT: f64 = 1e-10;

/// Sampled-inequality checks (frame sampling, min-lambda dominance,
/// principal angles are compared against 1e-8 as well).
pub const SAMPLED: f64 = 1e-8;

/// Relative slack for paired statistical comparisons on search-based kinds.
pub const PAIRED_REL: f64 = 1e-2;

/// Rank cutoff factor for polar decomposition: singular values below
/// `RANK_REL * sigma_max` (per block) are treated as zero.
pub const RANK_REL: f64 = 1e-10;
