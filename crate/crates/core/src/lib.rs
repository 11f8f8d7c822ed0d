//! Generalized simplex gradients over arbitrary sample sets, with the
//! approximation-error and floating-point-error bounds that govern them.
//!
//! The library computes the generalized simplex gradient (GSG), the
//! generalized centred simplex gradient (GCSG), and the generalized adapted
//! centred simplex gradient (GACSG) in the common form
//! `(A^T)^dagger B f(Y)`, evaluates the error bounds for each scheme, and
//! recommends the sample-set diameter that minimizes the combined bound.
//!
//! Modules:
//! - [`linalg`]: SVD-backed pseudo-inverse, spectral norm, condition number.
//! - [`geometry`]: sample sets, L-matrices, reflections, stretch/rotation data.
//! - [`schemes`]: the (A, B) pair per scheme and gradient evaluation.
//! - [`bounds`]: approximation and floating point error bounds, delta-min.
//! - [`oracle`]: test functions with analytic derivatives and a noise model.
//! - [`harness`]: sweep experiments, the inversion demo, CSV/JSON formats.

pub mod bounds;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod oracle;
pub mod schemes;

pub use error::{Error, Result};
pub use linalg::{Matrix, Vector};
