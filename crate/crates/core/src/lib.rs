//! Construction and thinness/thickness analysis of Cantor-like sets on the
//! line and their planar composites, in exact big-rational arithmetic.
//!
//! The central object is a nested family `[0,1] = I_0 ⊃ I_1 ⊃ I_2 ⊃ …` where
//! each basic interval of `I_k` contains `m` equally spaced children scaled
//! by a ratio `a_{k+1}`. Everything else is analysis on finite-depth
//! approximations of the limit set:
//!
//! * [`cantor`] — interval geometry, addressing, endpoints, membership;
//! * [`dimension`] — Hausdorff-dimension estimates from the length sequence
//!   and a grid box-counting estimator;
//! * [`perfectness`] — separating annuli, uniform-perfectness modulus bounds
//!   and witnesses for the hereditary failure of uniform perfectness;
//! * [`capacity`] — transfinite-diameter statistics over endpoint
//!   configurations and a certified logarithmic-capacity lower bound;
//! * [`porosity`] — empty-ball probes and the circle-family counterexample;
//! * [`assembly`] — products, similarity images and annular packings.
//!
//! Lengths decay super-exponentially with depth (`4^{-465}` is an ordinary
//! value here), so every quantity is carried in two forms: an exact
//! `BigRational` while a configurable bit budget allows, and a 128-fractional-
//! bit fixed-point natural logarithm ([`fix128::Fx128`]) that never degrades.
//!
//! The crate is `no_std` (alloc required); IO, serialization and the command
//! line live in the companion `thinset-cli` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod assembly;
pub mod cantor;
pub mod capacity;
pub mod dimension;
pub mod error;
pub mod fix128;
pub mod perfectness;
pub mod plane;
pub mod porosity;
pub mod ratio;
pub mod rational;

pub use cantor::{Address, BasicInterval, CantorApprox, DepthState, EndpointSet, Location};
pub use error::Error;
pub use fix128::Fx128;
pub use ratio::{RatioSpec, RatioVariant};
pub use rational::Q;

/// Default per-value bit budget before exact rationals are dropped in favor
/// of the log-space representation alone.
pub const DEFAULT_BUDGET_BITS: u64 = 1_000_000;

/// Enumeration refusal threshold: operations that would materialize more
/// than this many basic intervals return [`Error::EnumerationBudget`].
pub const ENUMERATION_LIMIT: u64 = 1 << 20;
