//! Computational kernels for murmuration statistics.
//!
//! The crate groups five independent laboratories behind one error type:
//!
//! * [`bessel`] / [`barrier`] — modified Bessel evaluation and the
//!   covariance barrier for tilted semicircle measures;
//! * [`stmodel`] — a conditioned Sato–Tate Monte Carlo model producing
//!   decile tables of conditional covariances;
//! * [`ff`] — exhaustive censuses of `y^2 = x^3 + x + D(t)` over
//!   rational function fields, with unitized L-polynomials, cyclotomic
//!   types and Tate–Shafarevich orders;
//! * [`empirics`] — ingestion and statistics for rank-zero elliptic
//!   curves over Q (adjusted correlations, sign-flip deciles, decay
//!   fits, grouped cross-validation);
//! * [`checks`] — Kloosterman/Petersson/mollifier sanity checks.
//!
//! Everything that consumes randomness is seeded and chunk-deterministic:
//! results are identical whatever the worker count, with or without the
//! `parallel` feature.

pub mod barrier;
pub mod bessel;
pub mod checks;
pub mod empirics;
pub mod error;
pub mod exec;
pub mod ff;
pub mod primes;
pub mod quad;
pub mod report;
pub mod stmodel;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Default seed used by every CLI entry point and reproduction script.
pub const DEFAULT_SEED: u64 = 42;
