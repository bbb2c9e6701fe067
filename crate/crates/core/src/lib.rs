//! Complete unitary invariants of quotient Hilbert modules, computed from
//! truncated power-series representations of reproducing kernels.
//!
//! The pipeline for a quotient module `Q = M ⊖ M₀`, where `M₀` is the
//! submodule of functions vanishing to second order on a hypersurface `Z`:
//!
//! 1. build the kernel `K` of `M` ([`kernels`]),
//! 2. normalize it at the origin so that `K₀(z, 0) ≡ 1` ([`normalize`]),
//! 3. form the jet kernel `[[K, ∂̄K], [∂K, ∂∂̄K]]` along the normal ([`jets`]),
//! 4. evaluate the tangential and transversal curvature and the angle
//!    `⟨∂̄e, e⟩` on `Z` ([`geometry`]),
//! 5. compare two modules invariant by invariant, or through the restricted
//!    jet kernels directly ([`equivalence`]).
//!
//! [`oracle`] checks the same structure against an explicit finite
//! Hilbert-space model.

pub mod cli;
pub mod equivalence;
pub mod error;
pub mod fmt;
pub mod geometry;
pub mod jets;
pub mod kernels;
pub mod normalize;
pub mod oracle;
pub mod series;

pub use error::{Error, Result};
pub use num_complex::Complex64;
