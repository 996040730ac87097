//! Hausdorff-dimension estimation from the length sequence, closed forms
//! for the named ratio schedules, and a grid box-counting estimator.
//!
//! The working estimator is `s_k = k·ln m / (−ln A_k)`; the dimension of the
//! limit set is the liminf of `s_k`, which a finite run reports as the
//! minimum over a trailing half-open window `(K − w, K]`.
//!
//! The window default is the final quarter. Sparse-power schedules dip at
//! every `k = 2^n` and recover slowly afterwards, with each dip shallower
//! than the one before; a longer default would keep re-reporting the
//! previous, deeper dip long after the estimator has climbed out of it,
//! while the final quarter of a power-of-two horizon still contains the
//! horizon's own dip.

use alloc::string::String;
use alloc::vec::Vec;

use alloc::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Signed;

use crate::error::Error;
use crate::fix128::{ln_ratio, ln_rational, Fx128, LN2};
use crate::rational::{floor_int, format_ratio, Q};
use crate::{cantor::CantorApprox, ratio::RatioSpec, ratio::RatioVariant};

/// `ln A_k` for `k = 0..=max_depth` as exact fixed-point sums of the ratio
/// logs, cached per distinct ratio value. Random schedules never repeat a
/// draw, so they skip the cache.
pub fn log_length_sequence(spec: &RatioSpec, max_depth: u64) -> Vec<Fx128> {
    let mut cache: Option<BTreeMap<Q, Fx128>> =
        (!matches!(spec.variant(), RatioVariant::Random { .. })).then(BTreeMap::new);
    let mut out = Vec::with_capacity(max_depth as usize + 1);
    let mut acc = Fx128::ZERO;
    out.push(acc);
    for k in 1..=max_depth {
        let a = spec.ratio_at(k);
        let log_a = match cache.as_mut() {
            Some(cache) => match cache.get(&a) {
                Some(l) => *l,
                None => {
                    let l = ln_rational(&a);
                    cache.insert(a, l);
                    l
                }
            },
            None => ln_rational(&a),
        };
        acc += log_a;
        out.push(acc);
    }
    out
}

/// One estimator sample `s_k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DimSample {
    pub depth: u64,
    pub value: f64,
}

/// Estimator sequence with its tail-window minimum and, when the schedule
/// admits one, the exact expected limit.
#[derive(Clone, Debug)]
pub struct DimEstimate {
    pub samples: Vec<DimSample>,
    /// Minimum of `s_k` over the half-open tail window `(K − w, K]`.
    pub liminf_estimate: f64,
    pub window_len: u64,
    pub closed_form: Option<ClosedFormDim>,
}

/// Exact expected limit of the estimator for the named schedules.
#[derive(Clone, Debug, PartialEq)]
pub enum ClosedFormDim {
    /// `log m / (−log a)` (constant and sparse-power schedules).
    LogRatio { m: u32, a: Q },
    /// Dimension zero (geometric-power schedule).
    Zero,
    /// Almost-sure limit `log m / (log(m+1) + 1)` for uniform random ratios.
    RandomLimit { m: u32 },
}

impl ClosedFormDim {
    pub fn value(&self) -> f64 {
        match self {
            ClosedFormDim::LogRatio { m, a } => {
                let lm = ln_ratio(&BigUint::from(*m), &BigUint::from(1u8));
                let la = ln_rational(a);
                lm.div(&(-la)).to_f64()
            }
            ClosedFormDim::Zero => 0.0,
            ClosedFormDim::RandomLimit { m } => {
                let lm = ln_ratio(&BigUint::from(*m), &BigUint::from(1u8));
                let lm1 = ln_ratio(&BigUint::from(*m + 1), &BigUint::from(1u8));
                lm.div(&(lm1 + Fx128::ONE)).to_f64()
            }
        }
    }

    pub fn describe(&self) -> String {
        use alloc::format;
        match self {
            ClosedFormDim::LogRatio { m, a } => {
                format!("log {m} / -log({})", format_ratio(a))
            }
            ClosedFormDim::Zero => "0".into(),
            ClosedFormDim::RandomLimit { m } => {
                format!("log {m} / (log {} + 1), almost sure", m + 1)
            }
        }
    }
}

/// Closed-form dimension for the spec's schedule; explicit lists have none.
pub fn closed_form_dim(spec: &RatioSpec) -> Result<ClosedFormDim, Error> {
    match spec.variant() {
        RatioVariant::Constant | RatioVariant::SparsePower => Ok(ClosedFormDim::LogRatio {
            m: spec.m(),
            a: spec.a().clone(),
        }),
        RatioVariant::GeometricPower => Ok(ClosedFormDim::Zero),
        RatioVariant::Random { .. } => Ok(ClosedFormDim::RandomLimit { m: spec.m() }),
        RatioVariant::Explicit(_) => Err(Error::InvalidSpec(
            "explicit ratio lists have no closed-form dimension".into(),
        )),
    }
}

/// Estimator sequence up to `max_depth` with the default tail window
/// (final quarter of the samples).
pub fn dim_estimate_seq(spec: &RatioSpec, max_depth: u64) -> DimEstimate {
    dim_estimate_windowed(spec, max_depth, max_depth / 4)
}

/// Estimator sequence with an explicit tail-window length `w ≥ 1`: the
/// liminf estimate is `min { s_k : K − w < k ≤ K }`.
pub fn dim_estimate_windowed(spec: &RatioSpec, max_depth: u64, window_len: u64) -> DimEstimate {
    assert!(max_depth >= 1, "need at least one depth");
    let window_len = window_len.clamp(1, max_depth);
    let logs = log_length_sequence(spec, max_depth);
    let ln_m = ln_ratio(&BigUint::from(spec.m()), &BigUint::from(1u8)).to_f64();
    let mut samples = Vec::with_capacity(max_depth as usize);
    for k in 1..=max_depth {
        let denom = -logs[k as usize].to_f64();
        samples.push(DimSample {
            depth: k,
            value: (k as f64) * ln_m / denom,
        });
    }
    let tail_start = max_depth - window_len; // exclusive
    let liminf_estimate = samples
        .iter()
        .filter(|s| s.depth > tail_start)
        .map(|s| s.value)
        .fold(f64::INFINITY, f64::min);
    DimEstimate {
        samples,
        liminf_estimate,
        window_len,
        closed_form: closed_form_dim(spec).ok(),
    }
}

/// Bracketing bounds on `ln A_k` for the sparse-power schedule, `k ≥ 2`:
/// with `g = log₂ k`,
/// `(k − g + 1 + g(g+1)/2)·ln a  <  ln A_k  <  (k − g + (g−1)g/2)·ln a`.
pub fn sparse_power_log_len_bounds(a: &Q, _m: u32, k: u64) -> (Fx128, Fx128) {
    assert!(k >= 2);
    let ln_a = ln_rational(a);
    let g = ln_ratio(&BigUint::from(k), &BigUint::from(1u8)).div(&LN2);
    let k_fx = Fx128::from_u64(k);
    let low_coeff = k_fx - g + Fx128::ONE + (g * (g + Fx128::ONE)).shr(1);
    let high_coeff = k_fx - g + ((g - Fx128::ONE) * g).shr(1);
    // ln a < 0, so the larger coefficient gives the smaller value.
    (low_coeff * ln_a, high_coeff * ln_a)
}

/// Boxes of one grid scale: the number of half-open grid cells whose open
/// interior meets the approximation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxCount {
    pub delta: Q,
    pub count: u64,
}

/// Cells `(iδ, (i+1)δ)` meeting the depth-`k` line approximation. Touching a
/// cell only at its boundary does not count, which keeps grid-aligned
/// interval families at their natural counts.
pub fn box_count_line(approx: &CantorApprox, k: u64, delta: &Q) -> Result<BoxCount, Error> {
    if !delta.is_positive() {
        return Err(Error::InvalidSpec("box scale must be positive".into()));
    }
    let cells_bound = floor_int(&(Q::from_integer(1.into()) / delta));
    if cells_bound > crate::ENUMERATION_LIMIT.into() {
        return Err(Error::EnumerationBudget {
            requested: u128::MAX,
            limit: crate::ENUMERATION_LIMIT as u128,
        });
    }
    let intervals = approx.intervals(k)?;
    let mut count: u64 = 0;
    let mut prev_max: Option<i64> = None;
    for iv in &intervals {
        let (lo, hi) = cell_range(&iv.left, &iv.right(), delta);
        if hi < lo {
            continue;
        }
        let start = match prev_max {
            Some(p) => lo.max(p + 1),
            None => lo,
        };
        if hi >= start {
            count += (hi - start + 1) as u64;
            prev_max = Some(hi);
        } else {
            prev_max = Some(prev_max.unwrap_or(hi).max(hi));
        }
    }
    Ok(BoxCount {
        delta: delta.clone(),
        count,
    })
}

/// Inclusive index range of open cells met by the closed interval `[l, r]`:
/// `i ∈ [floor(l/δ), ceil(r/δ) − 1]`.
pub(crate) fn cell_range(l: &Q, r: &Q, delta: &Q) -> (i64, i64) {
    let lo = floor_int(&(l / delta));
    let hi_q = r / delta;
    let hi_floor = floor_int(&hi_q);
    let hi = if Q::from_integer(hi_floor.clone()) == hi_q {
        hi_floor - 1
    } else {
        hi_floor
    };
    (
        i64::try_from(lo).expect("cell index fits i64"),
        i64::try_from(hi).expect("cell index fits i64"),
    )
}

/// Least-squares slope of `ln N` against `−ln δ` over a scale sweep.
pub fn box_slope(samples: &[BoxCount]) -> f64 {
    let n = samples.len() as f64;
    assert!(samples.len() >= 2, "slope needs at least two scales");
    let mut sx = KahanSum::default();
    let mut sy = KahanSum::default();
    let mut sxx = KahanSum::default();
    let mut sxy = KahanSum::default();
    for s in samples {
        let x = -ln_rational(&s.delta).to_f64();
        let y = ln_ratio(&BigUint::from(s.count.max(1)), &BigUint::from(1u8)).to_f64();
        sx.add(x);
        sy.add(y);
        sxx.add(x * x);
        sxy.add(x * y);
    }
    let (sx, sy, sxx, sxy) = (sx.value(), sy.value(), sxx.value(), sxy.value());
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Neumaier-compensated accumulator for the few f64 reductions here.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Mean of `ln a_j` over `j ≤ k`, i.e. `ln A_k / k` (the strong-law
/// statistic for random schedules).
pub fn mean_log_ratio(spec: &RatioSpec, k: u64) -> f64 {
    let logs = log_length_sequence(spec, k);
    logs[k as usize].to_f64() / k as f64
}

/// `s_k` at depths where only the spec is at hand (no sweep).
pub fn estimator_at(spec: &RatioSpec, k: u64) -> f64 {
    let logs = log_length_sequence(spec, k);
    let ln_m = ln_ratio(&BigUint::from(spec.m()), &BigUint::from(1u8)).to_f64();
    (k as f64) * ln_m / -logs[k as usize].to_f64()
}

/// Hausdorff-dimension bounds for the product `W × W` of a set with itself:
/// `[2d, d + 1]` where `d = log m / log(m+1)` is the factor's dimension.
/// The upper bound uses the factor's upper box dimension, which equals `d`
/// for these schedules.
pub fn product_dim_bounds(m: u32) -> (f64, f64) {
    let lm = ln_ratio(&BigUint::from(m), &BigUint::from(1u8));
    let lm1 = ln_ratio(&BigUint::from(m + 1), &BigUint::from(1u8));
    let d = lm.div(&lm1).to_f64();
    (2.0 * d, d + 1.0)
}
