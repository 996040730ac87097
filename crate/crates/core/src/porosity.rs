//! Porosity probes: certified empty balls inside `B(a, r)`, the circle
//! family that fails porosity at the origin, and its discrete variant.
//!
//! A probe reports the largest grid-found ball `B(b, ρ) ⊆ B(a, r)` missing
//! the target set, with `ρ` a *certified* rational lower bound: emptiness
//! and containment are re-verified by exact squared-distance comparisons, so
//! a reported ratio can undershoot the true porosity constant by grid slack
//! but never overshoot it.
//!
//! The circle family `⋃ C(0, 1/n) ∪ {0}` has its largest empty ball inside
//! `B(0, 1/n)` in the ring between circles `n` and `n+1`, of radius ratio
//! `1/(2(n+1)) → 0`: porosity fails at the origin. The discrete variant
//! replaces each circle by rational points placed exactly on it via the
//! tan-half-angle parametrization `((1−t²)/(1+t²), 2t/(1+t²))·r`.

use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::cantor::CantorApprox;
use crate::error::Error;
use crate::plane::Pt;
use crate::rational::{q_int, q_ratio, sqrt_lower, sqrt_upper, Q};

/// Certified planar porosity constant of any subset of the real line: the
/// ball `B(x + i·r/2, r/2) ⊂ B(x, r)` never meets the axis.
pub fn line_porosity_constant() -> Q {
    q_ratio(1, 2)
}

/// Ratio of the largest empty ball inside `B(0, 1/n)` for the circle
/// family: `1/(2(n+1))`; tends to zero, so the family is not porous at 0.
pub fn circle_family_ratio(n: u64) -> Q {
    assert!(n >= 1);
    q_ratio(1, 2 * (n as i64 + 1))
}

/// Anything a porosity probe can run against.
pub trait PorousTarget {
    /// Exact: is the open ball `B(center, rho)` disjoint from the set?
    fn ball_empty(&self, center: &Pt, rho: &Q) -> bool;
    /// Certified rational lower bound on `dist(p, set)`.
    fn dist_lower(&self, p: &Pt) -> Q;
}

/// Disjoint closed segments on the real axis (a segment `[x0,x1]` or the
/// depth-`k` intervals of a line approximation).
#[derive(Clone, Debug)]
pub struct LineSetTarget {
    /// Sorted, disjoint `[l, r]` pairs.
    segments: Vec<(Q, Q)>,
}

impl LineSetTarget {
    pub fn segment(x0: Q, x1: Q) -> LineSetTarget {
        LineSetTarget {
            segments: alloc::vec![(x0, x1)],
        }
    }

    pub fn from_approx(approx: &CantorApprox, depth: u64) -> Result<LineSetTarget, Error> {
        let segments = approx
            .intervals(depth)?
            .into_iter()
            .map(|iv| {
                let r = iv.right();
                (iv.left, r)
            })
            .collect();
        Ok(LineSetTarget { segments })
    }

    fn min_dist_sq(&self, p: &Pt) -> Q {
        // Nearest-by-x segment minimizes the horizontal part; y is common.
        let idx = self.segments.partition_point(|(l, _)| l <= &p.x);
        let y2 = &p.y * &p.y;
        let mut best: Option<Q> = None;
        for cand in [idx.wrapping_sub(1), idx] {
            if let Some((l, r)) = self.segments.get(cand) {
                let dx = if &p.x < l {
                    l - &p.x
                } else if &p.x > r {
                    &p.x - r
                } else {
                    Q::zero()
                };
                let d2 = &dx * &dx + &y2;
                best = Some(match best {
                    Some(b) if b <= d2 => b,
                    _ => d2,
                });
            }
        }
        best.expect("target has at least one segment")
    }
}

impl PorousTarget for LineSetTarget {
    fn ball_empty(&self, center: &Pt, rho: &Q) -> bool {
        self.min_dist_sq(center) >= rho * rho
    }

    fn dist_lower(&self, p: &Pt) -> Q {
        sqrt_lower(&self.min_dist_sq(p))
    }
}

/// `⋃_{n=1}^{n_max} C(0, 1/n) ∪ {0}` — the closure's limit point included.
#[derive(Clone, Debug)]
pub struct CircleFamily {
    pub n_max: u64,
}

impl CircleFamily {
    pub fn new(n_max: u64) -> CircleFamily {
        assert!(n_max >= 1);
        CircleFamily { n_max }
    }

    pub fn radii(&self) -> impl Iterator<Item = Q> + '_ {
        (1..=self.n_max as i64).map(|n| q_ratio(1, n))
    }
}

impl PorousTarget for CircleFamily {
    fn ball_empty(&self, center: &Pt, rho: &Q) -> bool {
        let u = center.norm_sq();
        let rho2 = rho * rho;
        if u < rho2 {
            return false; // origin inside the ball
        }
        for r in self.radii() {
            // Disjoint from C(0, r) ⇔ |b| ≥ r + ρ or |b| ≤ r − ρ.
            let outer = &r + rho;
            if u >= &outer * &outer {
                continue;
            }
            let inner = &r - rho;
            if !inner.is_negative() && u <= &inner * &inner {
                continue;
            }
            return false;
        }
        true
    }

    fn dist_lower(&self, p: &Pt) -> Q {
        let u = p.norm_sq();
        let norm_lo = sqrt_lower(&u);
        let norm_hi = sqrt_upper(&u);
        let mut best = norm_lo.clone(); // distance to the origin point
        for r in self.radii() {
            let d = if u >= &r * &r {
                &norm_lo - &r
            } else {
                &r - &norm_hi
            };
            let d = d.max(Q::zero());
            if d < best {
                best = d;
            }
        }
        best
    }
}

/// Discrete circles: `points_per_circle` rational points exactly on each
/// `C(0, 1/n)`, via `t ↦ ((1−t²)/(1+t²), 2t/(1+t²))·r` for a uniform grid
/// of `t ∈ (−1, 1]` and its mirror half. Spacing varies by at most a factor
/// of two along each half-circle.
#[derive(Clone, Debug)]
pub struct DiscreteCircleFamily {
    pub n_max: u64,
    pub points_per_circle: u32,
    circles: Vec<(Q, Vec<Pt>)>,
}

impl DiscreteCircleFamily {
    pub fn new(n_max: u64, points_per_circle: u32) -> DiscreteCircleFamily {
        assert!(n_max >= 1 && points_per_circle >= 8);
        let per_half = (points_per_circle / 2) as i64;
        let mut circles = Vec::new();
        for n in 1..=n_max as i64 {
            let r = q_ratio(1, n);
            let mut pts = Vec::with_capacity(2 * per_half as usize);
            for j in 0..per_half {
                // t uniform over (−1, 1]: right half-circle.
                let t = q_ratio(2 * j - per_half + 2, per_half);
                let t2 = &t * &t;
                let den = Q::one() + &t2;
                let x = (Q::one() - &t2) / &den * &r;
                let y = q_int(2) * &t / &den * &r;
                pts.push(Pt::new(x.clone(), y.clone()));
                pts.push(Pt::new(-x, y));
            }
            pts.sort();
            pts.dedup();
            circles.push((r, pts));
        }
        DiscreteCircleFamily {
            n_max,
            points_per_circle,
            circles,
        }
    }

    /// May the circle of radius `r` contain a point closer than `d` to a
    /// center with `|center|² = u`? Exact test of `(|b| − r)² < d²`.
    fn circle_can_beat(u: &Q, r: &Q, d_sq: &Q) -> bool {
        let lhs = u + r * r - d_sq;
        if lhs.is_negative() {
            return true;
        }
        &lhs * &lhs < q_int(4) * r * r * u
    }
}

impl DiscreteCircleFamily {
    /// Circle indices ordered by `| |p| − r |` (f64 ranking only; all
    /// skip decisions stay exact), so the nearest circle shrinks the
    /// running minimum immediately and prunes the rest.
    fn scan_order(&self, p: &Pt) -> Vec<usize> {
        let norm = crate::rational::to_f64_approx(&p.norm_sq()).max(0.0);
        let norm = to_f64_sqrt(norm);
        let mut order: Vec<usize> = (0..self.circles.len()).collect();
        order.sort_by(|&a, &b| {
            let da = (norm - crate::rational::to_f64_approx(&self.circles[a].0)).abs();
            let db = (norm - crate::rational::to_f64_approx(&self.circles[b].0)).abs();
            da.partial_cmp(&db).unwrap_or(core::cmp::Ordering::Equal)
        });
        order
    }
}

/// Newton square root for ranking purposes (`f64::sqrt` is std-only).
fn to_f64_sqrt(v: f64) -> f64 {
    if v <= 0.0 {
        return 0.0;
    }
    let mut x = v;
    for _ in 0..32 {
        x = 0.5 * (x + v / x);
    }
    x
}

impl PorousTarget for DiscreteCircleFamily {
    fn ball_empty(&self, center: &Pt, rho: &Q) -> bool {
        let u = center.norm_sq();
        let rho2 = rho * rho;
        if u < rho2 {
            return false; // origin is part of the set
        }
        for (r, pts) in &self.circles {
            if !Self::circle_can_beat(&u, r, &rho2) {
                continue;
            }
            for p in pts {
                if center.dist_sq(p) < rho2 {
                    return false;
                }
            }
        }
        true
    }

    fn dist_lower(&self, p: &Pt) -> Q {
        let u = p.norm_sq();
        let mut best_sq = u.clone(); // origin
        for idx in self.scan_order(p) {
            let (r, pts) = &self.circles[idx];
            if !Self::circle_can_beat(&u, r, &best_sq) {
                continue;
            }
            for q in pts {
                let d2 = p.dist_sq(q);
                if d2 < best_sq {
                    best_sq = d2;
                }
            }
        }
        sqrt_lower(&best_sq)
    }
}

/// Filled disk (a maximally non-porous region).
#[derive(Clone, Debug)]
pub struct DiskTarget {
    pub center: Pt,
    pub radius: Q,
}

impl PorousTarget for DiskTarget {
    fn ball_empty(&self, center: &Pt, rho: &Q) -> bool {
        let d2 = center.dist_sq(&self.center);
        let reach = &self.radius + rho;
        d2 >= &reach * &reach
    }

    fn dist_lower(&self, p: &Pt) -> Q {
        (sqrt_lower(&p.dist_sq(&self.center)) - &self.radius).max(Q::zero())
    }
}

/// A verified empty ball inside a probe ball.
#[derive(Clone, Debug)]
pub struct PorosityProbe {
    pub probe_center: Pt,
    pub probe_radius: Q,
    pub ball_center: Pt,
    pub ball_radius: Q,
    /// `ball_radius / probe_radius`, a lower bound on the porosity ratio.
    pub ratio: Q,
}

/// Grid search for the largest certified empty ball `B(b, ρ) ⊆ B(a, r)`
/// missing the target. Candidates are the `(2·resolution+1)²` grid points
/// `a + (i, j)·r/resolution`; ties resolve to the first candidate in grid
/// order (i then j, ascending).
pub fn empty_ball_search<T: PorousTarget>(
    target: &T,
    a: &Pt,
    r: &Q,
    resolution: u32,
) -> Result<PorosityProbe, Error> {
    if resolution < 8 {
        return Err(Error::InvalidSpec("grid resolution must be ≥ 8".into()));
    }
    if !r.is_positive() {
        return Err(Error::InvalidSpec("probe radius must be positive".into()));
    }
    let step = r / q_int(resolution as i64);
    let range = resolution as i64;
    let mut best: Option<(Q, Pt)> = None;
    for i in -range..=range {
        for j in -range..=range {
            let b = Pt::new(&a.x + q_int(i) * &step, &a.y + q_int(j) * &step);
            let off_sq = b.dist_sq(a);
            if off_sq >= r * r {
                continue;
            }
            let room = r - sqrt_upper(&off_sq);
            if !room.is_positive() {
                continue;
            }
            let rho = target.dist_lower(&b).min(room);
            if !rho.is_positive() {
                continue;
            }
            match &best {
                Some((cur, _)) if &rho <= cur => {}
                _ => best = Some((rho, b)),
            }
        }
    }
    let (rho, b) = best.unwrap_or((Q::zero(), a.clone()));
    // Certify: emptiness and containment must both verify exactly.
    if rho.is_positive() {
        debug_assert!(target.ball_empty(&b, &rho));
        let slack = r - &rho;
        debug_assert!(b.dist_sq(a) <= &slack * &slack);
    }
    Ok(PorosityProbe {
        probe_center: a.clone(),
        probe_radius: r.clone(),
        ratio: &rho / r,
        ball_center: b,
        ball_radius: rho,
    })
}
