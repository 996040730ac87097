//! Exact rational scalars and small construction/formatting helpers.

use alloc::string::{String, ToString};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// The exact scalar used throughout: arbitrary-precision rational.
pub type Q = BigRational;

pub fn q_int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn q_ratio(p: i64, q: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(q))
}

/// `1 / 2^n` with an arbitrary exponent.
pub fn q_pow2_inv(n: u64) -> Q {
    Q::new(BigInt::one(), BigInt::from(BigUint::one() << n))
}

/// Total bit size of a rational (numerator plus denominator), the quantity
/// checked against the exactness budget.
pub fn bit_size(x: &Q) -> u64 {
    x.numer().magnitude().bits() + x.denom().magnitude().bits()
}

/// Lossless `p/q` rendering (`-3/4`, `7`, `0`); integers omit the `/1`.
pub fn format_ratio(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        let mut s = x.numer().to_string();
        s.push('/');
        s += &x.denom().to_string();
        s
    }
}

/// Parse `p/q` or a bare integer; the inverse of [`format_ratio`].
pub fn parse_ratio(s: &str) -> Option<Q> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Q::new(n, d))
}

/// Floor of `x` as a `BigInt`.
pub fn floor_int(x: &Q) -> BigInt {
    x.numer().div_floor(x.denom())
}

/// Rational lower bound on `sqrt(x)` for `x ≥ 0`, certified by integer
/// square root: returns `s` with `s² ≤ x`, within `2^-48` relative slack.
pub fn sqrt_lower(x: &Q) -> Q {
    debug_assert!(!x.is_negative());
    if x.is_zero() {
        return Q::zero();
    }
    let scale: u64 = 48;
    // floor(sqrt(p·2^{2s}/q)) / 2^s ≤ sqrt(p/q)
    let n = (x.numer().magnitude() << (2 * scale)) / x.denom().magnitude();
    let root = n.sqrt();
    Q::new(
        BigInt::from(root),
        BigInt::from(BigUint::one() << scale),
    )
}

/// Rational upper bound on `sqrt(x)` for `x ≥ 0`: returns `s` with `s² ≥ x`;
/// exact when `x` is the square of a `2^-48`-grid rational.
pub fn sqrt_upper(x: &Q) -> Q {
    debug_assert!(!x.is_negative());
    if x.is_zero() {
        return Q::zero();
    }
    let scale: u64 = 48;
    // ceil(p·2^96 / q), then bump the floor square root only when needed.
    let n = ((x.numer().magnitude() << (2 * scale)) + x.denom().magnitude()
        - BigUint::one())
        / x.denom().magnitude();
    let mut root = n.sqrt();
    if &root * &root < n {
        root += BigUint::one();
    }
    let s = Q::new(
        BigInt::from(root),
        BigInt::from(BigUint::one() << scale),
    );
    debug_assert!(&s * &s >= *x);
    s
}

/// Truncating conversion to `f64` for reporting; exact rationals remain the
/// source of truth. Values beyond the `f64` exponent range saturate.
pub fn to_f64_approx(x: &Q) -> f64 {
    // Work from the top 64 bits of numerator and denominator.
    let (nb, db) = (
        x.numer().magnitude().bits() as i64,
        x.denom().magnitude().bits() as i64,
    );
    if x.is_zero() {
        return 0.0;
    }
    let shift_n = (nb - 64).max(0);
    let shift_d = (db - 64).max(0);
    let n_top: BigUint = x.numer().magnitude() >> shift_n as u64;
    let d_top: BigUint = x.denom().magnitude() >> shift_d as u64;
    let n64 = n_top.to_u64_digits().first().copied().unwrap_or(0) as f64;
    let d64 = d_top.to_u64_digits().first().copied().unwrap_or(1) as f64;
    let v = n64 / d64 * exp2i(shift_n - shift_d);
    if x.is_negative() {
        -v
    } else {
        v
    }
}

fn exp2i(e: i64) -> f64 {
    let mut v = 1.0f64;
    let mut e = e;
    while e > 1000 {
        v *= f64::from_bits(((1023 + 1000) as u64) << 52);
        e -= 1000;
    }
    while e < -1000 {
        v *= f64::from_bits(((1023 - 1000) as u64) << 52);
        e += 1000;
    }
    v * f64::from_bits(((1023 + e) as u64) << 52)
}
