//! Separating annuli, the uniform-perfectness modulus bound, and witnesses
//! for the hereditary failure of uniform perfectness (HNUP).
//!
//! The canonical annulus of a depth-`k` interval is centered at its midpoint
//! with radii `r = A_k/2` and `R = A_k/2 + e_k`; its ratio satisfies
//! `R/r = 1 + 2(1/a_k − m)/(m−1)` exactly, so schedules with `liminf a_k = 0`
//! produce separating annuli of unbounded modulus around every point. In the
//! other direction, when `inf a_k = δ > 0`, no separating annulus can beat
//! `M = 1 + 2(1/δ − m)/(m−1)`.
//!
//! Separation is decided against the *open* annulus: a set point exactly on
//! a bounding circle does not breach it. Verdicts carry a `sound` flag: when
//! set, the finite-depth decision provably transfers to the limit set
//! because interval endpoints persist to every deeper approximation.

use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::cantor::{Address, CantorApprox};
use crate::error::Error;
use crate::fix128::Fx128;
use crate::plane::{Pt, Radius, Rect};
use crate::rational::{q_int, Q};

/// True annulus `{z : r < |z − center| < R}` with exact radii.
#[derive(Clone, Debug, PartialEq)]
pub struct Annulus {
    pub center: Pt,
    pub inner: Radius,
    pub outer: Radius,
}

impl Annulus {
    pub fn new(center: Pt, inner: Radius, outer: Radius) -> Result<Annulus, Error> {
        if !inner.is_positive() || outer.sq() <= inner.sq() {
            return Err(Error::InvalidSpec("annulus needs 0 < r < R".into()));
        }
        Ok(Annulus {
            center,
            inner,
            outer,
        })
    }

    /// Annulus on the real line with rational radii.
    pub fn on_line(center_x: Q, r: Q, bigr: Q) -> Result<Annulus, Error> {
        Annulus::new(
            Pt::on_line(center_x),
            Radius::rational(r),
            Radius::rational(bigr),
        )
    }

    /// `(R/r)²`, always rational.
    pub fn ratio_sq(&self) -> Q {
        self.outer.sq() / self.inner.sq()
    }

    /// `R/r` when it is rational (both radii carry the same surd factor).
    pub fn ratio(&self) -> Option<Q> {
        (self.inner.sqrt2 == self.outer.sqrt2)
            .then(|| &self.outer.scale / &self.inner.scale)
    }

    /// Modulus `log(R/r) = ½·log((R/r)²)`.
    pub fn modulus(&self) -> Fx128 {
        crate::fix128::ln_rational(&self.ratio_sq()).shr(1)
    }

    pub fn modulus_f64(&self) -> f64 {
        self.modulus().to_f64()
    }
}

/// Outcome of a separation check at finite depth.
#[derive(Clone, Debug)]
pub struct SeparationVerdict {
    pub separates: bool,
    /// A set point in the bounded complement component (`|z−c| ≤ r`).
    pub inner_witness: Option<Q>,
    /// A set point in the unbounded component (`|z−c| ≥ R`).
    pub outer_witness: Option<Q>,
    pub depth_used: u64,
    /// Whether the verdict provably transfers from `I_k` to the limit set.
    pub sound: bool,
}

/// A separating annulus of prescribed ratio around a point, certifying that
/// the point cannot belong to any uniformly perfect subset at that modulus.
#[derive(Clone, Debug)]
pub struct HnupWitness {
    pub point: Address,
    pub annulus: Annulus,
    pub achieved_ratio: Q,
    pub depth: u64,
}

impl HnupWitness {
    pub fn achieved_modulus(&self) -> f64 {
        self.annulus.modulus_f64()
    }
}

/// Witness-search outcome; exhausting the depth budget is not a disproof.
#[derive(Clone, Debug)]
pub enum WitnessOutcome {
    Found(HnupWitness),
    NotFound { scanned_depth: u64 },
}

impl WitnessOutcome {
    pub fn found(&self) -> Option<&HnupWitness> {
        match self {
            WitnessOutcome::Found(w) => Some(w),
            WitnessOutcome::NotFound { .. } => None,
        }
    }
}

/// Canonical annulus around the interval at `address`: midpoint center,
/// `r = A_k/2`, `R = A_k/2 + e_k`.
pub fn canonical_annulus(approx: &CantorApprox, address: &Address) -> Result<Annulus, Error> {
    let k = address.depth();
    assert!(k >= 1, "canonical annulus needs depth ≥ 1");
    let interval = approx.interval_of(address)?;
    let r = interval.length / q_int(2);
    let bigr = &r + approx.gap(k)?;
    Annulus::new(
        Pt::on_line(&interval.left + &r),
        Radius::rational(r),
        Radius::rational(bigr),
    )
}

/// Exact canonical ratio at depth `k`: `1 + 2(1/a_k − m)/(m−1)`.
pub fn canonical_ratio(approx: &CantorApprox, k: u64) -> Q {
    let m = approx.m() as i64;
    let a = approx.ratio(k);
    q_int(1) + q_int(2) * (a.recip() - q_int(m)) / q_int(m - 1)
}

/// Uniform-perfectness bound: no annulus separating the limit set of a
/// schedule with `inf a_k = δ` has ratio above `M = 1 + 2(1/δ − m)/(m−1)`.
pub fn up_modulus_bound(m: u32, delta: &Q) -> Result<Q, Error> {
    let tight = Q::new(1.into(), (m as i64 + 1).into());
    if !delta.is_positive() || delta > &tight {
        return Err(Error::InvalidSpec("need δ ∈ (0, 1/(m+1)]".into()));
    }
    Ok(q_int(1) + q_int(2) * (delta.recip() - q_int(m as i64)) / q_int(m as i64 - 1))
}

/// `log M` companion of [`up_modulus_bound`].
pub fn up_modulus_bound_log(m: u32, delta: &Q) -> Result<Fx128, Error> {
    Ok(crate::fix128::ln_rational(&up_modulus_bound(m, delta)?))
}

struct RingProbe<'a> {
    approx: &'a CantorApprox,
    center: &'a Pt,
    r_sq: Q,
    big_r_sq: Q,
    depth: u64,
    steps: Vec<Q>,
    lengths: Vec<Q>,
}

enum RingScan {
    /// Some depth-`k` interval meets the open ring; carries an endpoint
    /// strictly inside the ring when one exists.
    Meets { endpoint_inside: Option<Q> },
    Clear,
}

impl<'a> RingProbe<'a> {
    fn new(
        approx: &'a CantorApprox,
        center: &'a Pt,
        r_sq: Q,
        big_r_sq: Q,
        depth: u64,
    ) -> Result<RingProbe<'a>, Error> {
        let steps = (1..=depth)
            .map(|d| approx.child_step(d))
            .collect::<Result<Vec<_>, _>>()?;
        let lengths = (0..=depth)
            .map(|d| approx.length(d).cloned())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RingProbe {
            approx,
            center,
            r_sq,
            big_r_sq,
            depth,
            steps,
            lengths,
        })
    }

    fn segment(&self, left: &Q, depth: u64) -> Rect {
        Rect::segment(left.clone(), left + &self.lengths[depth as usize])
    }

    /// Does any depth-`k` interval meet the open ring? Prunes subtrees whose
    /// distance range lies entirely inside the hole or beyond the outer
    /// circle; a subtree whose whole range lands strictly inside the ring
    /// short-circuits (all of its leaves meet).
    fn scan_ring(&self, left: Q, depth: u64, hit: &mut Option<Option<Q>>) {
        if hit.as_ref().is_some_and(|e| e.is_some()) {
            return; // already have an endpoint strictly inside
        }
        let seg = self.segment(&left, depth);
        let dmin = seg.dist_sq_min(self.center);
        let dmax = seg.dist_sq_max(self.center);
        if dmax <= self.r_sq || dmin >= self.big_r_sq {
            return;
        }
        if depth == self.depth {
            if seg.meets_open_annulus(self.center, &self.r_sq, &self.big_r_sq) {
                let inside = [seg.x0.clone(), seg.x1.clone()]
                    .into_iter()
                    .find(|x| self.strictly_inside(x));
                match hit {
                    Some(prev) if prev.is_none() => *hit = Some(inside),
                    Some(_) => {}
                    None => *hit = Some(inside),
                }
            }
            return;
        }
        let step = &self.steps[depth as usize];
        for digit in 0..self.approx.m() {
            let child_left = &left + q_int(digit as i64) * step;
            self.scan_ring(child_left, depth + 1, hit);
        }
    }

    fn strictly_inside(&self, x: &Q) -> bool {
        let d = Pt::on_line(x.clone()).dist_sq(self.center);
        d > self.r_sq && d < self.big_r_sq
    }

    fn run(&self) -> RingScan {
        let mut hit: Option<Option<Q>> = None;
        self.scan_ring(Q::zero(), 0, &mut hit);
        match hit {
            Some(endpoint_inside) => RingScan::Meets { endpoint_inside },
            None => RingScan::Clear,
        }
    }

    /// First endpoint (ascending) within the closed disk `|z−c| ≤ r`.
    fn inner_witness(&self, left: Q, depth: u64) -> Option<Q> {
        let seg = self.segment(&left, depth);
        if seg.dist_sq_min(self.center) > self.r_sq {
            return None;
        }
        if depth == self.depth {
            for x in [seg.x0, seg.x1] {
                if Pt::on_line(x.clone()).dist_sq(self.center) <= self.r_sq {
                    return Some(x);
                }
            }
            return None;
        }
        let step = self.steps[depth as usize].clone();
        for digit in 0..self.approx.m() {
            let child_left = &left + q_int(digit as i64) * &step;
            if let Some(w) = self.inner_witness(child_left, depth + 1) {
                return Some(w);
            }
        }
        None
    }

    /// Whether any interval meets the closed disk at all (for soundness of
    /// a missing inner witness).
    fn disk_touched(&self, left: Q, depth: u64) -> bool {
        let seg = self.segment(&left, depth);
        if seg.dist_sq_min(self.center) > self.r_sq {
            return false;
        }
        if depth == self.depth {
            return true;
        }
        let step = self.steps[depth as usize].clone();
        (0..self.approx.m()).any(|digit| {
            let child_left = &left + q_int(digit as i64) * &step;
            self.disk_touched(child_left, depth + 1)
        })
    }

    /// First endpoint (ascending) at distance `≥ R`. The farthest point of
    /// a segment from any center is one of its endpoints, so an endpoint
    /// witness exists whenever any interval reaches that far.
    fn outer_witness(&self, left: Q, depth: u64) -> Option<Q> {
        let seg = self.segment(&left, depth);
        if seg.dist_sq_max(self.center) < self.big_r_sq {
            return None;
        }
        if depth == self.depth {
            for x in [seg.x0, seg.x1] {
                if Pt::on_line(x.clone()).dist_sq(self.center) >= self.big_r_sq {
                    return Some(x);
                }
            }
            return None;
        }
        let step = self.steps[depth as usize].clone();
        for digit in 0..self.approx.m() {
            let child_left = &left + q_int(digit as i64) * &step;
            if let Some(w) = self.outer_witness(child_left, depth + 1) {
                return Some(w);
            }
        }
        None
    }
}

/// Decide whether the annulus separates the depth-`k` approximation, with
/// witnesses and a soundness flag for transfer to the limit set.
pub fn is_separating(
    annulus: &Annulus,
    approx: &CantorApprox,
    k: u64,
) -> Result<SeparationVerdict, Error> {
    let probe = RingProbe::new(approx, &annulus.center, annulus.inner.sq(), annulus.outer.sq(), k)?;
    match probe.run() {
        RingScan::Meets { endpoint_inside } => Ok(SeparationVerdict {
            separates: false,
            inner_witness: None,
            outer_witness: None,
            depth_used: k,
            // An endpoint strictly inside the ring already belongs to the
            // limit set, so the refusal is final; otherwise a deeper
            // approximation may still evacuate the ring.
            sound: endpoint_inside.is_some(),
        }),
        RingScan::Clear => {
            let inner = probe.inner_witness(Q::zero(), 0);
            let outer = probe.outer_witness(Q::zero(), 0);
            let separates = inner.is_some() && outer.is_some();
            let sound = if separates {
                true
            } else if inner.is_none() {
                // Sound refusal only if the closed disk misses I_k entirely.
                !probe.disk_touched(Q::zero(), 0)
            } else {
                // Missing outer witness means I_k ⊂ B(c, R), final.
                true
            };
            Ok(SeparationVerdict {
                separates,
                inner_witness: inner,
                outer_witness: outer,
                depth_used: k,
                sound,
            })
        }
    }
}

/// Scan depths `1..=depth_budget` for a verified canonical separating
/// annulus of ratio at least `target_ratio` around the addressed point.
///
/// For schedules with `liminf a_k = 0` a witness exists at every ratio once
/// the budget is large enough; `NotFound` only reports budget exhaustion.
pub fn hnup_witness(
    approx: &CantorApprox,
    point: &Address,
    target_ratio: &Q,
    depth_budget: u64,
) -> Result<WitnessOutcome, Error> {
    assert!(target_ratio > &Q::one(), "target ratio must exceed 1");
    let max_k = depth_budget.min(point.depth()).min(approx.depth());
    for k in 1..=max_k {
        let ratio = canonical_ratio(approx, k);
        if &ratio < target_ratio {
            continue;
        }
        let ann = canonical_annulus(approx, &point.prefix(k))?;
        let verdict = is_separating(&ann, approx, k)?;
        if verdict.separates && verdict.sound {
            return Ok(WitnessOutcome::Found(HnupWitness {
                point: point.clone(),
                annulus: ann,
                achieved_ratio: ratio,
                depth: k,
            }));
        }
    }
    Ok(WitnessOutcome::NotFound {
        scanned_depth: max_k,
    })
}

/// Result of the exhaustive candidate-family search.
#[derive(Clone, Debug)]
pub struct BruteForceMax {
    pub ratio: Q,
    pub annulus: Annulus,
    pub candidates: u64,
    pub verified: u64,
}

/// Maximum ratio among verified separating annuli in the canonical candidate
/// family at depth `k`: centers at every interval midpoint and every gap
/// midpoint, radii from consecutive distinct endpoint distances.
///
/// Candidates are visited with centers ascending and radii ascending, and
/// only strict ratio improvements are re-verified, so ties resolve to the
/// lexicographically smallest center and smallest inner radius.
pub fn max_separating_ratio_bruteforce(
    approx: &CantorApprox,
    k: u64,
) -> Result<BruteForceMax, Error> {
    use num_bigint::BigInt;
    use num_integer::Integer;

    let m = approx.m() as u64;
    let count = m.checked_pow(k as u32).filter(|&c| c <= 1 << 14).ok_or(
        Error::EnumerationBudget {
            requested: (approx.m() as u128).saturating_pow(k as u32),
            limit: 1 << 14,
        },
    )?;
    let intervals = approx.intervals(k)?;
    debug_assert_eq!(intervals.len() as u64, count);
    let endpoints = approx.endpoints(k)?;

    let mut centers: Vec<Q> = Vec::with_capacity(2 * intervals.len() - 1);
    for (i, iv) in intervals.iter().enumerate() {
        centers.push(iv.midpoint());
        if i + 1 < intervals.len() {
            centers.push((iv.right() + &intervals[i + 1].left) / q_int(2));
        }
    }
    centers.sort();

    // Everything over one common denominator: distance arithmetic and the
    // improvement test run on raw integers; rationals are rebuilt only for
    // the rare candidates that beat the incumbent and need verification.
    let mut denom = BigInt::from(1);
    for p in endpoints.points.iter().map(|p| p.denom()) {
        denom = denom.lcm(p);
    }
    for c in centers.iter().map(|c| c.denom()) {
        denom = denom.lcm(c);
    }
    let scaled = |x: &Q| -> BigInt { x.numer() * (&denom / x.denom()) };
    let points: Vec<BigInt> = endpoints.points.iter().map(scaled).collect();

    let mut best: Option<(BigInt, BigInt, Annulus)> = None;
    let mut candidates = 0u64;
    let mut verified = 0u64;
    let mut dists: Vec<BigInt> = Vec::with_capacity(points.len());

    for c in &centers {
        let nc = scaled(c);
        // Distances split into two monotone runs around the center; merge.
        dists.clear();
        let split = points.partition_point(|p| p < &nc);
        let (mut left, mut right) = (split, split);
        while left > 0 || right < points.len() {
            let take_left = match (left > 0, right < points.len()) {
                (true, true) => (&nc - &points[left - 1]) <= (&points[right] - &nc),
                (true, false) => true,
                (false, true) => false,
                (false, false) => unreachable!(),
            };
            if take_left {
                dists.push(&nc - &points[left - 1]);
                left -= 1;
            } else {
                dists.push(&points[right] - &nc);
                right += 1;
            }
        }
        dists.dedup();

        for w in dists.windows(2) {
            let (r, bigr) = (&w[0], &w[1]);
            if r.sign() == num_bigint::Sign::NoSign {
                continue;
            }
            candidates += 1;
            // Strict improvement test without building a rational:
            // bigr/r > bn/bd ⇔ bigr·bd > r·bn.
            if let Some((bn, bd, _)) = &best {
                if bigr * bd <= r * bn {
                    continue;
                }
            }
            let ann = Annulus::on_line(
                c.clone(),
                Q::new(r.clone(), denom.clone()),
                Q::new(bigr.clone(), denom.clone()),
            )?;
            verified += 1;
            let verdict = is_separating(&ann, approx, k)?;
            if verdict.separates {
                best = Some((bigr.clone(), r.clone(), ann));
            }
        }
    }

    let (bn, bd, annulus) = best.ok_or_else(|| {
        Error::InvalidSpec("no separating annulus in the candidate family".into())
    })?;
    Ok(BruteForceMax {
        ratio: Q::new(bn, bd),
        annulus,
        candidates,
        verified,
    })
}
