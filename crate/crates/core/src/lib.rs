//! Largest-eigenvalue distributions of the doubly singular beta ensemble.
//!
//! For `A ~ W_p(m, Σ)` and `B ~ W_p(q, Σ)` with `p > max(m, q)` both Wishart
//! matrices are singular, so the largest root of `B e = λ A e` has to be taken
//! relative to the range of `A`. With `Σ = I` its law is exactly the largest
//! root of `W_q(m, I) · W_q(p - m + q, I)⁻¹`, which [`exact_dist`] evaluates
//! through a Pfaffian of integrals against the Jacobi weight. The crate also
//! carries the `p → ∞` Wishart asymptotic, its scale-matrix correction, a
//! Tracy–Widom approximation and a seeded Monte Carlo simulator of the
//! ensemble itself.

pub mod beta_ensemble;
pub mod error;
pub mod exact_dist;
pub mod matrix_core;
pub mod sampling;
pub mod scale_correction;

pub use error::{Error, Result};
