//! Sparse multivariate polynomials over ℂ in the coordinate-functional basis.
//!
//! [`ScalarPoly`] elements are the observables `Σ c_α φ^α`; [`VectorPoly`]
//! holds polynomial maps ℂⁿ → ℂⁿ. Everything here is an immutable value type.

mod multi_index;
mod norm;
mod polar;
mod scalar;
mod vector;

pub use multi_index::MultiIndex;
pub use norm::{max_norm, sample_unit_ball, sample_unit_sphere, seeded_rng, sup_norm_estimate};
pub use polar::polarize;
pub use scalar::{ScalarPoly, Term};
pub use vector::{compose_scalar, VectorPoly};
