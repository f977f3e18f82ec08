//! Text indexes trading space for speed.
//!
//! Two index families live here:
//!
//! * the FM-bloated full-text index ([`bloated`]), an FM-index whose count
//!   table and occurrence lists also cover selected q-grams, in a superlinear
//!   (power-of-two grams) and a linear (minimizer phrases) flavor;
//! * the split index ([`split`]) for dictionary matching with up to `k`
//!   mismatches, built on pigeonhole word splitting and packed byte lists.
//!
//! Supporting pieces are the suffix array / BWT substrate ([`suffix`]),
//! q-gram and minimizer primitives ([`text`]), string sketches ([`sketch`]),
//! pluggable string hashes ([`hashing`]), brute-force oracles and the
//! benchmark harness ([`harness`]), and a binary envelope for persisting
//! any index kind ([`envelope`], [`registry`]).

pub mod bloated;
pub mod chained;
pub mod envelope;
mod error;
pub mod harness;
pub mod hashing;
pub mod registry;
pub mod sketch;
pub mod split;
pub mod suffix;
pub mod text;

pub use error::{Error, Result};

/// Internal value of the end-of-text symbol. Raw input may not contain it.
pub const TERMINATOR: u8 = 0;
