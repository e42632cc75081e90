//! Distinct-parts partitions of `n` whose largest part is at most `t·√n`.
//!
//! The crate pairs an exact big-integer enumeration of these partitions with
//! the saddle-point asymptotic `d_t(n) ~ A_n(t) n^{-3/4} e^{B(t)√n}` and with
//! numerical certificates for each ingredient of that estimate:
//!
//! - [`special_functions`]: real dilogarithm and small numeric helpers.
//! - [`exact_count`]: exact coefficient tables of `∏_{k≤L} (1 + x^k)`.
//! - [`beta_solver`]: the saddle parameter `β(t)` and the constants `B(t)`, `A(t)`.
//! - [`boltzmann_model`]: the tilted product measure on partitions and its sampler.
//! - [`local_limit`]: characteristic function, exact Fourier inversion, CLT checks.
//! - [`lemma_verify`]: grid certificates for the cubic remainder and Weyl-sum bounds.
//! - [`asymptotics`]: assembly of the estimate, limit shape, comparison sweeps.
//! - [`cli`]: the `dparts` command-line front end.

pub mod asymptotics;
pub mod beta_solver;
pub mod boltzmann_model;
pub mod bound;
pub mod cli;
pub mod error;
pub mod exact_count;
pub mod lemma_verify;
pub mod local_limit;
pub mod special_functions;

pub use bound::BoundFactor;
pub use error::{CoreError, Result};
