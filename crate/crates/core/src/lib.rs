//! Desk-scale toolkit for correlation sums of arithmetic functions.
//!
//! The crate computes, with brute-force oracles validating every fast path:
//!
//! * segmented sieves for the Möbius, Liouville and von Mangoldt functions
//!   together with smallest prime factors ([`arith`]),
//! * the Hardy–Littlewood singular series with certified truncation
//!   intervals, its trivial upper bound, and averaged forms ([`singular`]),
//! * sets of integers with a prime factor in each of a cascade of ranges
//!   ([`typical`]),
//! * Dirichlet character tables and the Granville–Soundararajan pretentious
//!   distance, with a grid infimum over twisted characters ([`pretentious`]),
//! * even moments of short-interval exponential sums by three mutually
//!   validating routes, and the sup-of-integral statistic behind them
//!   ([`moments`]),
//! * shift-correlation sums `S(h) = Σ_{n≤X} f(n+h) g(n)` for all `h ≤ H`
//!   at once, in direct and blocked-FFT modes, plus the exact discrete
//!   Fourier identity relating them to exponential sums ([`correlate`]),
//! * configuration-driven experiment runners emitting machine-readable
//!   reports ([`experiments`]).

pub mod arith;
pub mod correlate;
pub mod error;
pub mod experiments;
pub mod moments;
pub mod pretentious;
pub mod singular;
pub mod trigpoly;
pub mod typical;
pub mod util;

pub use error::{Error, Result};
