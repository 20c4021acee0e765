//! Power-norms, multi-norms and summing norms on free Hilbert C*-modules
//! over finite-dimensional C*-algebras.
//!
//! An algebra is described by its matrix block sizes
//! (`A = M_{k₁}(ℂ) ⊕ … ⊕ M_{k_r}(ℂ)`, [`algebra::AlgebraDescriptor`]), a
//! module is the free right module `E = Aᵐ` with the inner product
//! `⟨x, y⟩ = Σᵢ xᵢ* yᵢ`, and every norm reduces — through a fixed
//! block-flattening isomorphism — to singular values of small dense complex
//! matrices.
//!
//! The layers, bottom to top:
//!
//! * [`algebra`] — elements, the C*-norm, absolute value, square root,
//!   PSD order, classification, deterministic sampling.
//! * [`module`] — vectors and adjointable operators on `Aᵐ`, operator
//!   norm, rank-one operators, polar decomposition and its power
//!   identities.
//! * [`powernorm`] — the power-norm family on tuples (lattice and dual
//!   lattice, Hilbert C*-multi-norm, `μ`, `μ*`, the `l²` norm, the
//!   classical `μ₂`), sampled suprema, axiom batteries, amplification
//!   norms.
//! * [`summing`] — the 2-summing and 1-summing norms `π̃₂`/`π̃₁`, frames
//!   and the exact frame formula, the triangle decomposition of absolute
//!   values.
//! * [`search`] — seeded, bit-deterministic samplers and local searches
//!   shared by everything above.
//! * [`verify`] — the named invariant suites behind the `verify` command.
//!
//! Every estimate is labeled exact or a certified lower bound with a
//! reproducible witness; searches are pure functions of `(inputs, seed)`.
//!
//! All computations are generic over the real scalar ([`Real`], implemented
//! by `f32` and `f64`); the `f64` instantiations below are the types the
//! command-line tool and most callers want.

pub mod algebra;
pub mod error;
mod linalg;
pub mod module;
pub mod powernorm;
pub mod scalar;
pub mod search;
pub mod summing;
pub mod tol;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

/// Library version, echoed into every report the command-line tool writes.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Algebra element over `f64` scalars.
pub type Element = algebra::AlgebraElement<f64>;
/// Module vector over `f64` scalars.
pub type Vector = module::ModuleVector<f64>;
/// Adjointable module operator over `f64` scalars.
pub type Operator = module::ModuleOperator<f64>;
/// Norm estimate over `f64` scalars.
pub type Estimate = powernorm::NormEstimate<f64>;
