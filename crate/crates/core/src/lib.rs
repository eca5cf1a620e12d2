//! Semimartingale calculus for Lévy-type processes.
//!
//! The crate computes additive and multiplicative compensators of processes
//! represented as `ξ∘X` over a real Lévy driver `X` with an optional schedule
//! of jumps at deterministic predictable times. On top of that it provides
//! Mellin/Fourier analysis of signed stochastic exponentials, Girsanov-type
//! measure changes, and an exact Monte Carlo oracle for cross-validation.
//!
//! Module map:
//!
//! * [`numkernel`]: quadrature, characteristic-function inversion, special
//!   functions and a counter-based random number generator.
//! * [`levycalc`]: triplets, representing functions, drifts, multiplicative
//!   compensators and the Lévy–Khintchin identity.
//! * [`signedexp`]: Mellin transforms `g±`, conditional characteristic
//!   functions `φ±`, subdensities and the mean–variance case study.
//! * [`measurechange`]: characteristics and compensators after a change of
//!   measure driven by `Z = 𝓔(ψ∘X)`.
//! * [`mcoracle`]: exact path simulation and Monte Carlo statistics.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod levycalc;
pub mod mcoracle;
pub mod measurechange;
pub mod numkernel;
pub mod signedexp;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Complex scalar used throughout the crate.
pub type ComplexScalar = Complex64;
