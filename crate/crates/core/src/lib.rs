//! Lanczos approximation of Stieltjes matrix functions, the optimal Krylov
//! approximation, and computable near-optimality bounds.
//!
//! Given a symmetric positive definite `A`, a unit vector `b`, and a function
//! `f` that is Stieltjes — representable as
//!
//! ```text
//!             ∞
//!     f(z) = ∫  dμ(t) / (z + t),        z > 0,
//!             0
//! ```
//!
//! or of the form `z · g(z)` with `g` Stieltjes (which covers `z^{-α}`, `√z`
//! and `log(1+z)/z`-type functions) — the crate computes:
//!
//! * the Lanczos approximation `V_m f(T_m) e_1` to `f(A)b` ([`krylov`]),
//! * the orthogonal projection of `f(A)b` onto the Krylov space, i.e. the
//!   error-optimal Krylov approximation, and the exact split of the Lanczos
//!   error into its in-space and out-of-space components ([`krylov`]),
//! * resolvent-kernel representations of those two error components driven by
//!   adaptive quadrature over the defining measure ([`stieltjes`], [`kernels`]),
//! * a family of computable a-posteriori/a-priori bounds relating the Lanczos
//!   error to the optimal error ([`bounds`]), and
//! * best polynomial approximations on intervals and finite point sets plus
//!   rational approximations derived from the measure, which the comparison
//!   bounds need ([`approx`]).
//!
//! Everything is dense and deterministic: problem sizes are "desk scale"
//! (n in the hundreds), and identical inputs produce identical bytes.

pub mod approx;
pub mod bounds;
mod error;
pub mod kernels;
pub mod krylov;
pub mod linalg;
pub mod quadrature;
pub mod stieltjes;

pub use error::{Error, Result};
