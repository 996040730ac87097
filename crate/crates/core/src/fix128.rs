//! Signed fixed-point arithmetic with 128 fractional bits, and natural
//! logarithms of exact rationals in that representation.
//!
//! Interval lengths here underflow `f64` by depth ~30 (a depth-400
//! geometric-ratio approximation has lengths around `4^{-80200}`), so all
//! log-space bookkeeping runs on [`Fx128`]: a 256-bit sign-magnitude integer
//! scaled by `2^-128`. Addition and subtraction are exact, which makes
//! accumulated `log A_k` sums reproducible bit-for-bit regardless of
//! summation order; multiplication and division truncate toward zero and are
//! in error by at most one unit in the last place (`2^-128`) per operation.
//!
//! [`ln_ratio`] evaluates `ln(p/q)` by exact binary argument reduction to
//! `r ∈ [3/4, 3/2)` followed by the `atanh` series
//! `ln r = 2·(t + t³/3 + t⁵/5 + …)` with `t = (r−1)/(r+1)`, `|t| ≤ 1/5`.
//! The absolute error of a log value is below [`ln_abs_tol`] for any input
//! whose numerator and denominator fit in 2^24 bits, far inside the
//! coherence tolerances the callers declare.

use core::cmp::Ordering;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigUint;
use num_traits::Zero;

/// Number of fractional bits.
pub const FRAC_BITS: u32 = 128;

/// `ln 2` truncated to 128 fractional bits.
///
/// Verified in tests against an independent in-crate series evaluation
/// (`2·atanh(1/3)`) and against the literature decimal expansion.
pub const LN2: Fx128 = Fx128 {
    neg: false,
    mag: [0xc9e3_b398_03f2_f6af, 0xb172_17f7_d1cf_79ab, 0, 0],
};

/// Absolute error bound declared by this arithmetic layer for `ln_ratio`
/// and `ln_rational` results on inputs up to 2^24 bits wide: `2^-100`.
pub fn ln_abs_tol() -> Fx128 {
    Fx128 {
        neg: false,
        mag: [0, 0, 0, 0],
    }
    .set_bit(FRAC_BITS - 100)
}

/// Signed fixed-point number: `value = (-1)^neg · mag / 2^128` with a
/// 256-bit magnitude in four little-endian `u64` limbs.
///
/// The representable range `|x| < 2^128` comfortably covers every log-space
/// quantity in this crate (a depth-10^7 length log is still below 2^25).
/// Overflow panics rather than wrapping.
#[derive(Clone, Copy, Debug)]
pub struct Fx128 {
    neg: bool,
    mag: [u64; 4],
}

impl Fx128 {
    pub const ZERO: Fx128 = Fx128 {
        neg: false,
        mag: [0; 4],
    };

    pub const ONE: Fx128 = Fx128 {
        neg: false,
        mag: [0, 0, 1, 0],
    };

    fn set_bit(mut self, bit: u32) -> Fx128 {
        self.mag[(bit / 64) as usize] |= 1u64 << (bit % 64);
        self
    }

    pub fn from_u64(v: u64) -> Fx128 {
        Fx128 {
            neg: false,
            mag: [0, 0, v, 0],
        }
    }

    pub fn from_i64(v: i64) -> Fx128 {
        Fx128 {
            neg: v < 0,
            mag: [0, 0, v.unsigned_abs(), 0],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mag == [0; 4]
    }

    pub fn is_negative(&self) -> bool {
        self.neg && !self.is_zero()
    }

    pub fn abs(mut self) -> Fx128 {
        self.neg = false;
        self
    }

    /// Truncating conversion; error at most a few ulps of `f64`.
    pub fn to_f64(&self) -> f64 {
        let mut top = 3usize;
        while top > 0 && self.mag[top] == 0 {
            top -= 1;
        }
        // Two adjacent limbs carry ≥ 64 significant bits, enough for f64.
        let hi = self.mag[top] as f64 * pow2(64 * top as i32 - 128);
        let lo = if top > 0 {
            self.mag[top - 1] as f64 * pow2(64 * (top as i32 - 1) - 128)
        } else {
            0.0
        };
        let v = hi + lo;
        if self.neg {
            -v
        } else {
            v
        }
    }

    /// Largest fixed-point value `≤ p/q` (both nonzero; `p/q` must be
    /// below `2^128`).
    pub fn from_ratio(p: &BigUint, q: &BigUint) -> Fx128 {
        assert!(!q.is_zero(), "from_ratio: zero denominator");
        let scaled = (p << FRAC_BITS) / q;
        let digits = scaled.to_u64_digits();
        assert!(digits.len() <= 4, "from_ratio: value exceeds 2^128");
        let mut mag = [0u64; 4];
        mag[..digits.len()].copy_from_slice(&digits);
        Fx128 { neg: false, mag }
    }

    fn mag_cmp(a: &[u64; 4], b: &[u64; 4]) -> Ordering {
        for i in (0..4).rev() {
            match a[i].cmp(&b[i]) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    fn mag_add(a: &[u64; 4], b: &[u64; 4]) -> [u64; 4] {
        let mut out = [0u64; 4];
        let mut carry = 0u64;
        for i in 0..4 {
            let (s1, c1) = a[i].overflowing_add(b[i]);
            let (s2, c2) = s1.overflowing_add(carry);
            out[i] = s2;
            carry = (c1 as u64) + (c2 as u64);
        }
        assert!(carry == 0, "Fx128 overflow");
        out
    }

    /// Requires `a >= b`.
    fn mag_sub(a: &[u64; 4], b: &[u64; 4]) -> [u64; 4] {
        let mut out = [0u64; 4];
        let mut borrow = 0u64;
        for i in 0..4 {
            let (d1, b1) = a[i].overflowing_sub(b[i]);
            let (d2, b2) = d1.overflowing_sub(borrow);
            out[i] = d2;
            borrow = (b1 as u64) + (b2 as u64);
        }
        debug_assert!(borrow == 0);
        out
    }

    fn normalized(mut self) -> Fx128 {
        if self.mag == [0; 4] {
            self.neg = false;
        }
        self
    }

    /// Product truncated toward zero (magnitude error < 2^-128).
    fn mul_trunc(&self, rhs: &Fx128) -> Fx128 {
        // 4x4 limb schoolbook product, then >> 128.
        let mut wide = [0u64; 8];
        for i in 0..4 {
            let mut carry = 0u128;
            for j in 0..4 {
                let cur = wide[i + j] as u128
                    + (self.mag[i] as u128) * (rhs.mag[j] as u128)
                    + carry;
                wide[i + j] = cur as u64;
                carry = cur >> 64;
            }
            let mut k = i + 4;
            while carry > 0 {
                let cur = wide[k] as u128 + carry;
                wide[k] = cur as u64;
                carry = cur >> 64;
                k += 1;
            }
        }
        assert!(wide[6] == 0 && wide[7] == 0, "Fx128 overflow in mul");
        Fx128 {
            neg: self.neg != rhs.neg,
            mag: [wide[2], wide[3], wide[4], wide[5]],
        }
        .normalized()
    }

    pub fn mul_u64(&self, v: u64) -> Fx128 {
        let mut out = [0u64; 4];
        let mut carry = 0u128;
        for i in 0..4 {
            let cur = (self.mag[i] as u128) * (v as u128) + carry;
            out[i] = cur as u64;
            carry = cur >> 64;
        }
        assert!(carry == 0, "Fx128 overflow in mul_u64");
        Fx128 {
            neg: self.neg,
            mag: out,
        }
        .normalized()
    }

    pub fn mul_i64(&self, v: i64) -> Fx128 {
        let r = self.mul_u64(v.unsigned_abs());
        if v < 0 {
            -r
        } else {
            r
        }
    }

    /// Quotient truncated toward zero.
    pub fn div_u64(&self, v: u64) -> Fx128 {
        assert!(v != 0);
        let mut out = [0u64; 4];
        let mut rem = 0u128;
        for i in (0..4).rev() {
            let cur = (rem << 64) | self.mag[i] as u128;
            out[i] = (cur / v as u128) as u64;
            rem = cur % v as u128;
        }
        Fx128 {
            neg: self.neg,
            mag: out,
        }
        .normalized()
    }

    /// Exact halving `2^-n` scaling (right shift).
    pub fn shr(&self, n: u32) -> Fx128 {
        assert!(n < 256);
        let limb = (n / 64) as usize;
        let bits = n % 64;
        let mut out = [0u64; 4];
        for i in 0..4 - limb {
            let mut v = self.mag[i + limb] >> bits;
            if bits > 0 && i + limb + 1 < 4 {
                v |= self.mag[i + limb + 1] << (64 - bits);
            }
            out[i] = v;
        }
        Fx128 {
            neg: self.neg,
            mag: out,
        }
        .normalized()
    }

    /// Full division via big-integer arithmetic; truncated toward zero.
    pub fn div(&self, rhs: &Fx128) -> Fx128 {
        assert!(!rhs.is_zero(), "Fx128 division by zero");
        let num = BigUint::from_slice_u64(&self.mag) << FRAC_BITS;
        let den = BigUint::from_slice_u64(&rhs.mag);
        let q = num / den;
        let digits = q.to_u64_digits();
        assert!(digits.len() <= 4, "Fx128 overflow in div");
        let mut mag = [0u64; 4];
        mag[..digits.len()].copy_from_slice(&digits);
        Fx128 {
            neg: self.neg != rhs.neg,
            mag,
        }
        .normalized()
    }
}

trait FromSliceU64 {
    fn from_slice_u64(s: &[u64; 4]) -> BigUint;
}

impl FromSliceU64 for BigUint {
    fn from_slice_u64(s: &[u64; 4]) -> BigUint {
        let mut v = BigUint::zero();
        for (i, limb) in s.iter().enumerate() {
            v |= BigUint::from(*limb) << (64 * i);
        }
        v
    }
}

fn pow2(e: i32) -> f64 {
    // Exact for the exponent range used by to_f64.
    f64::from_bits((((1023 + e) as u64) & 0x7ff) << 52)
}

impl PartialEq for Fx128 {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Fx128 {}

impl PartialOrd for Fx128 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fx128 {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_negative(), other.is_negative()) {
            (false, true) => Ordering::Greater,
            (true, false) => Ordering::Less,
            (false, false) => Fx128::mag_cmp(&self.mag, &other.mag),
            (true, true) => Fx128::mag_cmp(&other.mag, &self.mag),
        }
    }
}

impl Neg for Fx128 {
    type Output = Fx128;
    fn neg(mut self) -> Fx128 {
        if !self.is_zero() {
            self.neg = !self.neg;
        }
        self
    }
}

impl Add for Fx128 {
    type Output = Fx128;
    fn add(self, rhs: Fx128) -> Fx128 {
        if self.neg == rhs.neg {
            Fx128 {
                neg: self.neg,
                mag: Fx128::mag_add(&self.mag, &rhs.mag),
            }
            .normalized()
        } else {
            match Fx128::mag_cmp(&self.mag, &rhs.mag) {
                Ordering::Equal => Fx128::ZERO,
                Ordering::Greater => Fx128 {
                    neg: self.neg,
                    mag: Fx128::mag_sub(&self.mag, &rhs.mag),
                },
                Ordering::Less => Fx128 {
                    neg: rhs.neg,
                    mag: Fx128::mag_sub(&rhs.mag, &self.mag),
                },
            }
        }
    }
}

impl AddAssign for Fx128 {
    fn add_assign(&mut self, rhs: Fx128) {
        *self = *self + rhs;
    }
}

impl Sub for Fx128 {
    type Output = Fx128;
    fn sub(self, rhs: Fx128) -> Fx128 {
        self + (-rhs)
    }
}

impl SubAssign for Fx128 {
    fn sub_assign(&mut self, rhs: Fx128) {
        *self = *self - rhs;
    }
}

impl Mul for Fx128 {
    type Output = Fx128;
    fn mul(self, rhs: Fx128) -> Fx128 {
        self.mul_trunc(&rhs)
    }
}

/// `ln(p/q)` for positive big integers.
pub fn ln_ratio(p: &BigUint, q: &BigUint) -> Fx128 {
    assert!(!p.is_zero() && !q.is_zero(), "ln_ratio: zero argument");
    if p == q {
        return Fx128::ZERO;
    }

    // Find e with p/q = 2^e · r, r ∈ [1, 2): q·2^e ≤ p < q·2^{e+1}.
    let mut e: i64 = p.bits() as i64 - q.bits() as i64;
    let (mut pw, mut qw) = if e >= 0 {
        (p.clone(), q << e as usize)
    } else {
        (p << (-e) as usize, q.clone())
    };
    if pw < qw {
        e -= 1;
        pw <<= 1usize;
    }
    debug_assert!(pw >= qw && pw < (&qw << 1usize));

    // Pull r into [3/4, 3/2) so |t| ≤ 1/5.
    if (&pw << 1usize) >= &qw * 3u32 {
        e += 1;
        qw <<= 1usize;
    }

    // t = (r-1)/(r+1), ln r = 2 atanh t.
    let t_neg = pw < qw;
    let t_num = if t_neg { &qw - &pw } else { &pw - &qw };
    let t_den = &pw + &qw;
    let t = Fx128::from_ratio(&t_num, &t_den);

    let t2 = t * t;
    let mut term = t;
    let mut sum = t;
    let mut n = 1u64;
    loop {
        term = term * t2;
        if term.is_zero() {
            break;
        }
        n += 2;
        sum += term.div_u64(n);
    }
    let mut atanh2 = sum.mul_u64(2);
    if t_neg {
        atanh2 = -atanh2;
    }

    LN2.mul_i64(e) + atanh2
}

/// `ln x` for a positive exact rational.
pub fn ln_rational(x: &crate::rational::Q) -> Fx128 {
    use num_traits::Signed;
    assert!(x.is_positive(), "ln_rational: argument must be positive");
    let p = x.numer().magnitude();
    let q = x.denom().magnitude();
    ln_ratio(p, q)
}
