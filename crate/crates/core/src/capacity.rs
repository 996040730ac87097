//! Transfinite-diameter statistics and the certified logarithmic-capacity
//! lower bound.
//!
//! For an `n`-point configuration the pair product `P = Π_{i<j} |z_i − z_j|`
//! and `log D = (2/(n(n−1)))·log P` are computed in log space over exact
//! rational distances; a configuration drawn from a set only lower-bounds
//! the maximizing `P_n`, so these values are descriptive statistics. The one
//! *certified* capacity bound is the geometric-power series
//! `log Cap ≥ Σ_{ℓ≥0} 2^{−ℓ−1} log(B·A_ℓ)`, whose closed form
//! `log B + 2·log a` (weights `Σ 2^{−ℓ−1} = 1` and
//! `Σ 2^{−ℓ−1}(ℓ²+ℓ)/2 = 2`) gives `Cap ≥ B·a²` exactly.
//!
//! The pair statistic `μ(z, z′)` — the deepest level whose basic interval
//! contains both endpoints — controls the distance bracket
//! `e_{μ+1} ≤ |z−z′| ≤ A_μ` and, for `m = 2`, the census
//! `#{z′ : μ(z, z′) = ℓ} = 2^{k−ℓ}`.

use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::cantor::{Address, CantorApprox, EndpointSet};
use crate::error::Error;
use crate::fix128::{ln_rational, Fx128};
use crate::ratio::RatioVariant;
use crate::rational::Q;

/// Pair-product statistics of one point configuration.
#[derive(Clone, Debug)]
pub struct ConfigProduct {
    pub n: usize,
    /// `Σ_{i<j} ln |z_i − z_j|` (exact fixed-point sum of per-pair logs).
    pub log_p: Fx128,
    /// `(2/(n(n−1)))·log P`.
    pub log_d: f64,
    /// Exact product, kept as a cross-check while `n ≤ 64`.
    pub exact_p: Option<Q>,
}

/// Log-space pair product over exact rational points (must be distinct).
pub fn log_pair_product(points: &[Q]) -> Result<ConfigProduct, Error> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InvalidSpec("need at least two points".into()));
    }
    let mut sorted: Vec<&Q> = points.iter().collect();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DuplicatePoints);
    }

    let mut log_p = Fx128::ZERO;
    let keep_exact = n <= 64;
    // Accumulate numerator and denominator separately; one reduction at the
    // end instead of a gcd per pair.
    let mut exact_parts = keep_exact.then(|| {
        (
            num_bigint::BigUint::from(1u8),
            num_bigint::BigUint::from(1u8),
        )
    });
    for i in 0..n {
        for j in i + 1..n {
            let d = (&points[i] - &points[j]).abs();
            log_p += ln_rational(&d);
            if let Some((num, den)) = exact_parts.as_mut() {
                *num *= d.numer().magnitude();
                *den *= d.denom().magnitude();
            }
        }
    }
    let exact_p = exact_parts.map(|(num, den)| {
        Q::new(
            num_bigint::BigInt::from(num),
            num_bigint::BigInt::from(den),
        )
    });
    let log_d = log_p
        .mul_u64(2)
        .div_u64(n as u64)
        .div_u64(n as u64 - 1)
        .to_f64();
    Ok(ConfigProduct {
        n,
        log_p,
        log_d,
        exact_p,
    })
}

/// `μ` for two endpoints given by their interval addresses at a common
/// depth: the deepest level whose basic interval contains both. Two
/// endpoints of the same depth-`k` interval have `μ = k` (its children
/// already separate them).
pub fn mu_of_addresses(a: &Address, b: &Address) -> u64 {
    debug_assert_eq!(a.depth(), b.depth());
    if a == b {
        a.depth()
    } else {
        a.common_prefix_len(b)
    }
}

/// `μ` over an [`EndpointSet`] by endpoint indices (positional order).
#[derive(Clone, Debug)]
pub struct MuTable {
    pub depth: u64,
    m: u64,
}

impl MuTable {
    pub fn new(depth: u64, m: u32) -> MuTable {
        MuTable {
            depth,
            m: m as u64,
        }
    }

    /// μ for endpoint indices `i ≠ j` of a depth-`k` endpoint set.
    pub fn pair(&self, i: usize, j: usize) -> u64 {
        let (qi, qj) = ((i / 2) as u64, (j / 2) as u64);
        if qi == qj {
            return self.depth;
        }
        // Leading common base-m digits of the interval indices.
        let mut lcp = 0;
        let mut scale = self.m.pow(self.depth as u32 - 1);
        loop {
            if (qi / scale) % self.m != (qj / scale) % self.m {
                break;
            }
            lcp += 1;
            if scale == 1 {
                break;
            }
            scale /= self.m;
        }
        lcp
    }

    /// For a fixed endpoint index, the number of other endpoints at each μ
    /// level `0..=depth`.
    pub fn census(&self, i: usize, set_len: usize) -> Vec<u64> {
        let mut counts = alloc::vec![0u64; self.depth as usize + 1];
        for j in 0..set_len {
            if j != i {
                counts[self.pair(i, j) as usize] += 1;
            }
        }
        counts
    }
}

/// Distance bracket `e_{μ+1} ≤ |z − z′| ≤ A_μ` for endpoints of `E_k`;
/// needs exact geometry down to depth `k+1`.
pub fn mu_bracket_holds(
    approx: &CantorApprox,
    set: &EndpointSet,
    i: usize,
    j: usize,
) -> Result<bool, Error> {
    let table = MuTable::new(set.depth, approx.m());
    let l = table.pair(i, j);
    let d = (&set.points[i] - &set.points[j]).abs();
    Ok(&d >= approx.gap(l + 1)? && &d <= approx.length(l)?)
}

/// Per-depth endpoint-configuration statistics, with the structural
/// inequality `log P² ≥ 2^{k+1} Σ_{ℓ=0}^k 2^{k−ℓ} log e_{ℓ+1}` attached for
/// two-branch schedules.
#[derive(Clone, Debug)]
pub struct DepthDiameter {
    pub depth: u64,
    pub config: ConfigProduct,
    pub structural_rhs: Option<Fx128>,
    pub structural_holds: Option<bool>,
}

/// Endpoint-configuration products for depths `0..=max_depth`.
///
/// The point budget is `2^{k+1} ≤ 2^13`; the structural comparison is
/// attached only for `m = 2`, where the μ census powering it is exact.
pub fn endpoint_diameter_seq(
    approx: &CantorApprox,
    max_depth: u64,
) -> Result<Vec<DepthDiameter>, Error> {
    let m = approx.m() as u128;
    let points = 2 * m.saturating_pow(max_depth as u32);
    if points > 1 << 13 {
        return Err(Error::EnumerationBudget {
            requested: points,
            limit: 1 << 13,
        });
    }
    if approx.m() == 2 && approx.depth() <= max_depth {
        return Err(Error::InsufficientDepth {
            needed: max_depth + 1,
            have: approx.depth(),
        });
    }
    let mut out = Vec::with_capacity(max_depth as usize + 1);
    for k in 0..=max_depth {
        let set = approx.endpoints(k)?;
        let config = log_pair_product(&set.points)?;
        let (structural_rhs, structural_holds) = if approx.m() == 2 {
            let mut rhs = Fx128::ZERO;
            for l in 0..=k {
                let log_gap = ln_rational(approx.gap(l + 1)?);
                rhs += log_gap.mul_u64(1u64 << (k - l));
            }
            rhs = rhs.mul_u64(1u64 << (k + 1));
            let holds = config.log_p.mul_u64(2) >= rhs;
            (Some(rhs), Some(holds))
        } else {
            (None, None)
        };
        out.push(DepthDiameter {
            depth: k,
            config,
            structural_rhs,
            structural_holds,
        });
    }
    Ok(out)
}

/// Partial sums and certified limit of the geometric-power capacity series.
#[derive(Clone, Debug)]
pub struct SeriesBound {
    /// `(ℓ, S_ℓ)` partial sums of `Σ 2^{−ℓ−1}·log(B·A_ℓ)`.
    pub partial_sums: Vec<(u32, f64)>,
    /// Exact limit `log B + 2·log a` in fixed point.
    pub limit: Fx128,
    /// Certified bound `Cap ≥ B·a²` as an exact rational.
    pub cap_lower_bound: Q,
    pub terms_used: u32,
    pub converged: bool,
}

/// Evaluate the capacity series for a two-branch geometric-power schedule
/// until the term magnitude drops below `tolerance`.
pub fn series_capacity_bound(
    spec: &crate::RatioSpec,
    tolerance: f64,
) -> Result<SeriesBound, Error> {
    if spec.m() != 2 || !matches!(spec.variant(), RatioVariant::GeometricPower) {
        return Err(Error::InvalidSpec(
            "capacity series applies to two-branch geometric-power schedules".into(),
        ));
    }
    assert!(tolerance > 0.0);
    let a = spec.a();
    let b = spec.gap_floor(); // 1 − 2a
    let log_a = ln_rational(a);
    let log_b = ln_rational(&b);

    let mut sum = Fx128::ZERO;
    let mut partial_sums = Vec::new();
    let mut converged = false;
    let mut terms = 0u32;
    for l in 0u32..=200 {
        // term = 2^{−ℓ−1}·(log B + (ℓ²+ℓ)/2·log a)
        let weight = (l as u64 * l as u64 + l as u64) / 2;
        let term = (log_b + log_a.mul_u64(weight)).shr(l + 1);
        sum += term;
        terms = l + 1;
        partial_sums.push((l, sum.to_f64()));
        if term.abs().to_f64() < tolerance {
            converged = true;
            break;
        }
    }

    let limit = log_b + log_a.mul_u64(2);
    let cap_lower_bound = &b * a * a;
    Ok(SeriesBound {
        partial_sums,
        limit,
        cap_lower_bound,
        terms_used: terms,
        converged,
    })
}

/// Exhaustive small-`n` transfinite diameter over a candidate set.
#[derive(Clone, Debug)]
pub struct SmallTransfinite {
    pub n: usize,
    pub points: Vec<Q>,
    pub p: Q,
    pub log_d: f64,
}

/// True `D_n` over all `n`-subsets of at most 24 candidates (`n ≤ 8`):
/// an `f64` prefilter ranks subsets, then exact rational products decide
/// among near-ties, so the maximizer is exact. Ties resolve to the
/// lexicographically first subset in candidate order.
pub fn exact_small_transfinite(candidates: &[Q], n: usize) -> Result<SmallTransfinite, Error> {
    if candidates.len() > 24 || n > 8 {
        return Err(Error::EnumerationBudget {
            requested: candidates.len() as u128,
            limit: 24,
        });
    }
    if n < 2 || n > candidates.len() {
        return Err(Error::InvalidSpec("need 2 ≤ n ≤ |candidates|".into()));
    }
    let c = candidates.len();
    let mut logs = alloc::vec![0.0f64; c * c];
    for i in 0..c {
        for j in i + 1..c {
            let d = (&candidates[i] - &candidates[j]).abs();
            if d.is_zero() {
                return Err(Error::DuplicatePoints);
            }
            let l = ln_rational(&d).to_f64();
            logs[i * c + j] = l;
            logs[j * c + i] = l;
        }
    }

    // Pass 1: best f64 log-sum over all n-subsets.
    let mut best_log = f64::NEG_INFINITY;
    let mut subset: Vec<usize> = Vec::with_capacity(n);
    search_best(&logs, c, n, 0, 0.0, &mut subset, &mut best_log);

    // Pass 2: exact products for subsets within prefilter slack.
    let slack = 1e-9 * (1.0 + best_log.abs());
    let mut finalists: Vec<Vec<usize>> = Vec::new();
    collect_near(
        &logs,
        c,
        n,
        0,
        0.0,
        best_log - slack,
        &mut subset,
        &mut finalists,
    );
    let mut best: Option<(Q, Vec<usize>)> = None;
    for f in &finalists {
        let mut p = Q::one();
        for (ai, &i) in f.iter().enumerate() {
            for &j in &f[ai + 1..] {
                p *= (&candidates[i] - &candidates[j]).abs();
            }
        }
        match &best {
            Some((bp, _)) if &p <= bp => {}
            _ => best = Some((p, f.clone())),
        }
    }
    let (p, idx) = best.expect("at least one subset");
    let log_d = ln_rational(&p)
        .mul_u64(2)
        .div_u64(n as u64)
        .div_u64(n as u64 - 1)
        .to_f64();
    Ok(SmallTransfinite {
        n,
        points: idx.iter().map(|&i| candidates[i].clone()).collect(),
        p,
        log_d,
    })
}

fn search_best(
    logs: &[f64],
    c: usize,
    n: usize,
    start: usize,
    acc: f64,
    subset: &mut Vec<usize>,
    best: &mut f64,
) {
    if subset.len() == n {
        if acc > *best {
            *best = acc;
        }
        return;
    }
    let remaining = n - subset.len();
    for i in start..=c - remaining {
        let mut add = 0.0;
        for &j in subset.iter() {
            add += logs[i * c + j];
        }
        subset.push(i);
        search_best(logs, c, n, i + 1, acc + add, subset, best);
        subset.pop();
    }
}

#[allow(clippy::too_many_arguments)]
fn collect_near(
    logs: &[f64],
    c: usize,
    n: usize,
    start: usize,
    acc: f64,
    threshold: f64,
    subset: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if subset.len() == n {
        if acc >= threshold {
            out.push(subset.clone());
        }
        return;
    }
    let remaining = n - subset.len();
    for i in start..=c - remaining {
        let mut add = 0.0;
        for &j in subset.iter() {
            add += logs[i * c + j];
        }
        subset.push(i);
        collect_near(logs, c, n, i + 1, acc + add, threshold, subset, out);
        subset.pop();
    }
}

/// Greedy Fekete-style configuration: start from the diameter pair, then
/// repeatedly add the candidate maximizing the incremental exact product;
/// ties pick the smallest coordinate.
pub fn greedy_fekete(candidates: &[Q], n: usize) -> Result<Vec<Q>, Error> {
    if n < 2 || n > candidates.len() {
        return Err(Error::InvalidSpec("need 2 ≤ n ≤ |candidates|".into()));
    }
    let mut sorted = candidates.to_vec();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != candidates.len() {
        return Err(Error::DuplicatePoints);
    }
    // On the line the diameter pair is the pair of extremes.
    let mut chosen = alloc::vec![sorted[0].clone(), sorted[sorted.len() - 1].clone()];
    let mut remaining: Vec<Q> = sorted[1..sorted.len() - 1].to_vec();
    while chosen.len() < n {
        let mut best: Option<(Q, usize)> = None;
        for (idx, cand) in remaining.iter().enumerate() {
            let mut gain = Q::one();
            for s in &chosen {
                gain *= (cand - s).abs();
            }
            match &best {
                Some((g, _)) if &gain <= g => {}
                _ => best = Some((gain, idx)),
            }
        }
        let (_, idx) = best.expect("candidates remain");
        chosen.push(remaining.remove(idx));
    }
    chosen.sort();
    Ok(chosen)
}
