//! Ratio sequences `ā = (a_1, a_2, …)` driving the construction.
//!
//! A [`RatioSpec`] fixes the branching count `m ≥ 2`, a base ratio
//! `a ∈ (0, 1/(m+1)]`, and one of five rules for the per-depth scaling
//! ratios. Every produced `a_k` is an exact rational in `(0, 1/(m+1)]`
//! (or `(0, 1/m)` under the documented relaxed mode).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Signed};
use rand_core::{RngCore, SeedableRng};

use crate::error::Error;
use crate::rational::{q_int, q_pow2_inv, Q};

/// Rule producing the ratio sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RatioVariant {
    /// `a_k = a` for every `k`.
    Constant,
    /// `a_k = a^n` when `k = 2^n` (n ≥ 1), `a_k = a` otherwise. The square
    /// ratios thin the set sparsely enough to keep positive dimension while
    /// killing uniform perfectness of every subset.
    SparsePower,
    /// `a_k = a^k`: super-exponentially shrinking lengths, dimension zero.
    GeometricPower,
    /// Explicitly listed ratios. Requests beyond the list clamp to the last
    /// entry, so the sequence is eventually constant.
    Explicit(Vec<Q>),
    /// I.i.d. draws, uniform on the dyadic grid of `(0, 1/(m+1)]` with the
    /// stated precision; reproducible and replayable by index.
    Random { seed: u64, precision_bits: u32 },
}

/// Validated ratio-sequence specification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioSpec {
    m: u32,
    a: Q,
    variant: RatioVariant,
    relaxed: bool,
}

pub const DEFAULT_RANDOM_PRECISION_BITS: u32 = 64;

impl RatioSpec {
    /// Standard constructor enforcing `0 < a ≤ 1/(m+1)`.
    pub fn new(m: u32, a: Q, variant: RatioVariant) -> Result<RatioSpec, Error> {
        Self::build(m, a, variant, false)
    }

    /// Relaxed constructor permitting `1/(m+1) < a < 1/m`. Gap monotonicity
    /// is no longer guaranteed; invariant checks downgrade to warnings.
    pub fn new_relaxed(m: u32, a: Q, variant: RatioVariant) -> Result<RatioSpec, Error> {
        Self::build(m, a, variant, true)
    }

    pub fn constant(m: u32, a: Q) -> Result<RatioSpec, Error> {
        Self::new(m, a, RatioVariant::Constant)
    }

    pub fn sparse_power(m: u32, a: Q) -> Result<RatioSpec, Error> {
        Self::new(m, a, RatioVariant::SparsePower)
    }

    pub fn geometric_power(m: u32, a: Q) -> Result<RatioSpec, Error> {
        Self::new(m, a, RatioVariant::GeometricPower)
    }

    pub fn explicit(m: u32, ratios: Vec<Q>) -> Result<RatioSpec, Error> {
        let bound = ratios
            .iter()
            .max()
            .cloned()
            .ok_or_else(|| Error::InvalidSpec("explicit ratio list is empty".into()))?;
        Self::new(m, bound, RatioVariant::Explicit(ratios))
    }

    /// Uniform random ratios on `(0, 1/(m+1)]`; `a` is pinned to the law's
    /// essential supremum `1/(m+1)`.
    pub fn random(m: u32, seed: u64) -> Result<RatioSpec, Error> {
        let a = Q::new(1.into(), (m as i64 + 1).into());
        Self::new(
            m,
            a,
            RatioVariant::Random {
                seed,
                precision_bits: DEFAULT_RANDOM_PRECISION_BITS,
            },
        )
    }

    fn build(m: u32, a: Q, variant: RatioVariant, relaxed: bool) -> Result<RatioSpec, Error> {
        if m < 2 {
            return Err(Error::InvalidSpec(format!("m = {m}, need m ≥ 2")));
        }
        if !a.is_positive() {
            return Err(Error::InvalidSpec("ratio a must be positive".into()));
        }
        let tight = Q::new(1.into(), (m as i64 + 1).into());
        let loose = Q::new(1.into(), (m as i64).into());
        if relaxed {
            if a >= loose {
                return Err(Error::InvalidSpec(format!(
                    "relaxed mode needs a < 1/{m}"
                )));
            }
        } else if a > tight {
            return Err(Error::InvalidSpec(format!(
                "a exceeds 1/(m+1) = 1/{}; use the relaxed constructor for (1/(m+1), 1/m)",
                m + 1
            )));
        }
        if let RatioVariant::Explicit(ratios) = &variant {
            for (i, r) in ratios.iter().enumerate() {
                if !r.is_positive() || r > &a {
                    return Err(Error::InvalidSpec(format!(
                        "explicit ratio #{} out of (0, a]",
                        i + 1
                    )));
                }
            }
        }
        if let RatioVariant::Random { precision_bits, .. } = &variant {
            if *precision_bits == 0 || *precision_bits > 64 {
                return Err(Error::InvalidSpec(
                    "random precision must be 1..=64 bits".into(),
                ));
            }
        }
        Ok(RatioSpec {
            m,
            a,
            variant,
            relaxed,
        })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// The bound ratio `a` (equals the constant ratio for `Constant`, the
    /// base for the power variants, the list maximum for `Explicit`, and
    /// `1/(m+1)` for `Random`).
    pub fn a(&self) -> &Q {
        &self.a
    }

    pub fn variant(&self) -> &RatioVariant {
        &self.variant
    }

    pub fn is_relaxed(&self) -> bool {
        self.relaxed
    }

    /// Gap floor `B = 1 − m·a`; every depth satisfies `1 − m·a_k ≥ B`.
    pub fn gap_floor(&self) -> Q {
        q_int(1) - q_int(self.m as i64) * &self.a
    }

    /// The ratio `a_k` (`k ≥ 1`).
    pub fn ratio_at(&self, k: u64) -> Q {
        assert!(k >= 1, "ratios are indexed from 1");
        match &self.variant {
            RatioVariant::Constant => self.a.clone(),
            RatioVariant::SparsePower => match exact_log2(k) {
                Some(n) if n >= 1 => pow(&self.a, n),
                _ => self.a.clone(),
            },
            RatioVariant::GeometricPower => pow(&self.a, k),
            RatioVariant::Explicit(ratios) => {
                let idx = ((k - 1) as usize).min(ratios.len() - 1);
                ratios[idx].clone()
            }
            RatioVariant::Random {
                seed,
                precision_bits,
            } => {
                let draw = dyadic_draw(*seed, k, *precision_bits);
                draw * &self.a
            }
        }
    }

    /// A human-oriented label (`constant`, `sparse-power`, …).
    pub fn variant_name(&self) -> &'static str {
        match self.variant {
            RatioVariant::Constant => "constant",
            RatioVariant::SparsePower => "sparse-power",
            RatioVariant::GeometricPower => "geometric-power",
            RatioVariant::Explicit(_) => "explicit",
            RatioVariant::Random { .. } => "random",
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "m={} variant={} a={}",
            self.m,
            self.variant_name(),
            crate::rational::format_ratio(&self.a)
        )
    }
}

/// `n` when `k = 2^n` exactly.
fn exact_log2(k: u64) -> Option<u64> {
    if k.is_power_of_two() {
        Some(k.trailing_zeros() as u64)
    } else {
        None
    }
}

fn pow(a: &Q, n: u64) -> Q {
    let mut acc = Q::one();
    let mut base = a.clone();
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            acc *= &base;
        }
        n >>= 1;
        if n > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// The `k`-th dyadic draw for a seed: uniform on `{1, …, 2^p} / 2^p`, so the
/// support is exactly the half-open `(0, 1]` at `p` fractional bits. The
/// ChaCha stream is positioned by index, never advanced statefully, so draws
/// are replayable in any order.
fn dyadic_draw(seed: u64, k: u64, precision_bits: u32) -> Q {
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    // Each u64 consumes two 32-bit words of the keystream.
    rng.set_word_pos(2 * (k as u128 - 1));
    let raw = rng.next_u64();
    let kept = if precision_bits == 64 {
        raw
    } else {
        raw >> (64 - precision_bits)
    };
    // Shift {0..2^p-1} to {1..2^p}: zero never occurs, 1/1 occurs with the
    // same probability as every other grid point.
    let num = Q::from_integer(kept.into()) + Q::one();
    num * q_pow2_inv(precision_bits as u64)
}
