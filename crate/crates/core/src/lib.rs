//! Self-similar blow-up structures of the radially symmetric quasilinear heat
//! equation with a power source,
//!
//! ```text
//! u_t = x^{1−N} (x^{N−1} u^σ u_x)_x + u^β,
//! ```
//!
//! together with a blow-up evolution solver on self-similarly adapted meshes
//! and diagnostics for structural stability.
//!
//! Every numerical routine is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`.

pub mod banded;
pub mod diagnostics;
pub mod error;
pub mod evolve;
pub mod exact;
pub mod fem;
pub mod linear_init;
pub mod medium;
pub mod mesh;
pub mod scalar;
pub mod selfsim;
pub mod special;

pub use error::{Error, Result};
pub use medium::{classify, scaling_laws, solution_count, Regime, RegimeKind};
pub use mesh::ElementKind;
pub use scalar::Real;

pub type MediumParams = medium::MediumParams<f64>;
pub type Mesh1D = mesh::Mesh1D<f64>;
pub type GridFunction = mesh::GridFunction<f64>;
pub type SelfSimilarSolution = selfsim::SelfSimilarSolution<f64>;
pub type LinearApproximation = linear_init::LinearApproximation<f64>;
pub type EvolutionState = evolve::EvolutionState<f64>;
pub type DiagnosticsSeries = diagnostics::DiagnosticsSeries<f64>;
