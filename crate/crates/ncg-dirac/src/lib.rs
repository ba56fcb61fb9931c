//! Dirac operators geometrically realised from quantum Riemannian geometry on
//! finite-dimensional *-algebras.
//!
//! The construction starts from a coordinate *-algebra `A`, a first-order
//! differential calculus `Ω¹` (graph or free-module backend), an inverse
//! quantum metric `( , ): Ω¹⊗Ω¹ → A` and a bimodule connection `∇` with
//! generalised braiding `σ`. On the spinor bimodule `S = A ⊕ Ω¹` it produces
//! the operator `D = d + δ` (with `δ = ( , )∘∇` the divergence), the
//! antilinear charge conjugation `J(a+ω) = a* + ω*`, the grading
//! `γ(a+ω) = a − ω` and the sesquilinear form `⟨a+ω, b+η⟩ = ∫(a*b + (ω*,η))`,
//! then checks every spectral-triple axiom numerically and computes spectra.
//!
//! Built-in geometries live in [`models`]: weighted bidirected graphs, chains
//! with q-integer measures, polygons, `M₂(ℂ)` with its two standard quantum
//! metrics, and reduced fuzzy spheres `Mₙ(ℂ)`. The [`gauge`] module couples
//! `D` to an external 1-form on the trivial line bundle `E = A`.
//!
//! All operators are materialised as dense complex matrices over explicit
//! bases; antilinear maps are stored as a matrix composed with entrywise
//! conjugation. Every value is immutable after construction and all
//! operations are pure, so concurrent read access is safe.

pub mod algebra;
pub mod calculus;
pub mod check;
pub mod gauge;
pub mod linalg;
pub mod models;
pub mod modelspec;
pub mod qrg;
pub mod report;
pub mod spinor;

pub use check::{CheckResult, Error, Result, VerificationReport};
pub use linalg::{Antilinear, CMat, CVec, C64};

/// Default absolute residual tolerance (Frobenius norm for operators).
pub const DEFAULT_TOL: f64 = 1e-9;

/// Eigenvalue magnitude below which a mode counts as a zero mode. Looser
/// than [`DEFAULT_TOL`] because eigenvalues accumulate roundoff.
pub const KERNEL_TOL: f64 = 1e-7;
