//! Relative m-centers of finite point sets in finite-dimensional normed
//! spaces, finite atomic models of the Bochner spaces L_p(mu, X), and the
//! pointwise-lift construction connecting the two.
//!
//! A relative m-center of a set {a_1, ..., a_n} in a subspace Y is a point
//! y0 of Y minimizing `sum_i |a_i - y0|^m`; for n = 1 it is a best
//! approximation. On a finite atomic measure space, solving that problem
//! separately at every atom assembles a function into L_p(mu, Y) — the
//! pointwise lift. When the center exponent matches the integrability
//! exponent, the lift is optimal for the corresponding problem in
//! L_p(mu, X); when the exponents differ it can fail, and for p != 2 even
//! Hilbert fibers admit three-point sets whose 2-center leaves the convex
//! hull. This crate computes all of those objects with certificates, at
//! desk scale, and ships the verification suites that exercise them.
//!
//! Per-atom solves, property-grid instances and counterexample candidates
//! are embarrassingly parallel; the `parallel` feature (on by default) runs
//! them on rayon, and every batch entry point also accepts an explicit
//! sequential mode for benchmarking and reproducibility comparisons.

pub mod bochner;
pub mod center;
mod error;
pub mod exec;
pub mod hull;
pub(crate) mod linalg;
pub mod norms;
pub(crate) mod solver;
pub mod subspace;
pub mod suites;
pub mod verification;

pub use error::{Error, Result};
pub use exec::Exec;
