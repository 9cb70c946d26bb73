//! Normal-form conjugacies and approximate Koopman eigenfunctions for
//! polynomial diffeomorphisms of ℂⁿ near an asymptotically stable fixed point.
//!
//! Given `T(x) = Λx + P₂(x) + ⋯` in eigen-coordinates, [`normalform::run`]
//! removes the nonlinear terms degree by degree with near-identity changes of
//! variables `Φₘ = I + Qₘ`. Their compositions `τₘ = Φ₂ ∘ ⋯ ∘ Φₘ` conjugate
//! `T` to its linear part up to `O(‖z‖^{m+1})`, and monomials pulled back
//! through `τₘ⁻¹` are approximate eigenfunctions of the Koopman operator of
//! `T` ([`numerics`]).

pub mod error;
pub mod normalform;
pub mod numerics;
pub mod observables;
pub mod polyalg;
pub mod spectrum;

pub use error::{Error, Result};
pub use normalform::{NormalFormConfig, NormalFormSequence, NormalFormStage};
pub use polyalg::{MultiIndex, ScalarPoly, VectorPoly};
pub use spectrum::{ResonanceReport, Spectrum};

pub use num_complex::Complex64;
