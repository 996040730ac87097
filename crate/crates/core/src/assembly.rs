//! Planar composites: products `I × I` with their separating-annulus
//! witnesses, similarity images, and the annular packings that assemble
//! scaled components into rings `B_n = Ann(0; ρ_{n+1}, ρ_n)` around the
//! origin.
//!
//! The packing places, for each `m = 2..=m_max`, a scaled copy of the
//! two-branch-to-`m`-branch sparse-power set (base ratio `1/(m+1)`) — the
//! product `W_m × W_m` for the planar set `E`, the line set `W_m` for the
//! real set `W` — inside the even ring `B_{2m}`, so the odd rings stay empty
//! and separate the components. With `ρ_n = 2^{−n²}` the ring ratio
//! `ρ_n/ρ_{n+1} = 2^{2n+1}` grows without bound, which hands every point,
//! including the accumulation point 0, separating annuli of any prescribed
//! ratio with outer radius shrinking alongside.

use alloc::string::String;
use alloc::vec::Vec;

use alloc::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::cantor::{Address, CantorApprox};
use crate::dimension::{cell_range, product_dim_bounds, BoxCount};
use crate::error::Error;
use crate::fix128::ln_ratio;
use crate::perfectness::Annulus;
use crate::plane::{Pt, Radius, Rect};
use crate::rational::{q_int, q_pow2_inv, Q};
use crate::ratio::RatioSpec;

/// Orientation-preserving similarity `z ↦ scale·z + translate`, `scale > 0`.
/// Distance ratios, and hence all annulus ratio statistics, are preserved.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityMap {
    pub scale: Q,
    pub translate: Pt,
}

impl SimilarityMap {
    pub fn new(scale: Q, translate: Pt) -> Result<SimilarityMap, Error> {
        if !scale.is_positive() {
            return Err(Error::InvalidSpec("similarity scale must be positive".into()));
        }
        Ok(SimilarityMap { scale, translate })
    }

    pub fn identity() -> SimilarityMap {
        SimilarityMap {
            scale: Q::one(),
            translate: Pt::origin(),
        }
    }

    pub fn apply(&self, p: &Pt) -> Pt {
        Pt::new(
            &self.scale * &p.x + &self.translate.x,
            &self.scale * &p.y + &self.translate.y,
        )
    }

    pub fn apply_rect(&self, r: &Rect) -> Rect {
        Rect::new(
            &self.scale * &r.x0 + &self.translate.x,
            &self.scale * &r.x1 + &self.translate.x,
            &self.scale * &r.y0 + &self.translate.y,
            &self.scale * &r.y1 + &self.translate.y,
        )
    }
}

/// Ring radius rule `ρ_n = 2^{−n²}`: strictly decreasing, dyadic (every
/// containment check stays exact), with `ρ_n/ρ_{n+1} = 2^{2n+1} → ∞`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RhoSequence;

impl RhoSequence {
    pub fn rho(&self, n: u32) -> Q {
        q_pow2_inv(n as u64 * n as u64)
    }

    /// `ρ_n / ρ_{n+1} = 2^{2n+1}`.
    pub fn ring_ratio(&self, n: u32) -> Q {
        Q::from_integer(num_bigint::BigInt::from(1u8) << (2 * n as usize + 1))
    }

    /// The ring `B_n = Ann(0; ρ_{n+1}, ρ_n)`.
    pub fn ring(&self, n: u32) -> (Q, Q) {
        (self.rho(n + 1), self.rho(n))
    }
}

/// One building block of a planar composite.
#[derive(Clone, Debug)]
pub enum Component {
    /// An isolated point (the packing's accumulation point).
    Point(Pt),
    /// `approx × approx` under `map`.
    Product {
        index_m: u32,
        approx: CantorApprox,
        map: SimilarityMap,
    },
    /// The line set `approx` under `map`, on the real axis.
    Line {
        index_m: u32,
        approx: CantorApprox,
        map: SimilarityMap,
    },
}

impl Component {
    /// Tight bounding rectangle (components live in `[0,1]` locally).
    pub fn bounding_rect(&self) -> Rect {
        match self {
            Component::Point(p) => Rect::new(p.x.clone(), p.x.clone(), p.y.clone(), p.y.clone()),
            Component::Product { map, .. } => {
                map.apply_rect(&Rect::new(Q::zero(), Q::one(), Q::zero(), Q::one()))
            }
            Component::Line { map, .. } => {
                map.apply_rect(&Rect::segment(Q::zero(), Q::one()))
            }
        }
    }

    pub fn index_m(&self) -> Option<u32> {
        match self {
            Component::Point(_) => None,
            Component::Product { index_m, .. } | Component::Line { index_m, .. } => Some(*index_m),
        }
    }
}

/// Composite planar approximation.
#[derive(Clone, Debug)]
pub struct PlanarSet {
    pub components: Vec<Component>,
    pub rho: RhoSequence,
}

/// Dimension bookkeeping for one packed component.
#[derive(Clone, Debug)]
pub struct ComponentReport {
    pub m: u32,
    pub depth: u64,
    pub dim_lower: f64,
    pub dim_upper: f64,
}

impl PlanarSet {
    /// Single product component (e.g. the unit square at depth 0).
    pub fn product_of(approx: CantorApprox, map: SimilarityMap) -> PlanarSet {
        PlanarSet {
            components: alloc::vec![Component::Product {
                index_m: approx.m(),
                approx,
                map,
            }],
            rho: RhoSequence,
        }
    }

    /// Per-component dimension bounds `[2d_m, d_m + 1]` (products) or the
    /// exact `d_m` (lines), `d_m = log m / log(m+1)`.
    pub fn component_reports(&self) -> Vec<ComponentReport> {
        let mut out = Vec::new();
        for c in &self.components {
            match c {
                Component::Point(_) => {}
                Component::Product {
                    index_m, approx, ..
                } => {
                    let (lo, hi) = product_dim_bounds(*index_m);
                    out.push(ComponentReport {
                        m: *index_m,
                        depth: approx.depth(),
                        dim_lower: lo,
                        dim_upper: hi,
                    });
                }
                Component::Line {
                    index_m, approx, ..
                } => {
                    let d = ln_ratio(&(*index_m).into(), &1u32.into())
                        .div(&ln_ratio(&(*index_m + 1).into(), &1u32.into()))
                        .to_f64();
                    out.push(ComponentReport {
                        m: *index_m,
                        depth: approx.depth(),
                        dim_lower: d,
                        dim_upper: d,
                    });
                }
            }
        }
        out
    }

    /// Grid cells `(iδ, (i+1)δ) × (jδ, (j+1)δ)` whose open interior meets
    /// the composite.
    pub fn box_count(&self, delta: &Q) -> Result<BoxCount, Error> {
        if !delta.is_positive() {
            return Err(Error::InvalidSpec("box scale must be positive".into()));
        }
        let mut cells: BTreeSet<(i64, i64)> = BTreeSet::new();
        for c in &self.components {
            match c {
                // A point on a grid line meets no open cell; interior
                // points meet exactly one. Either way it cannot change a
                // box-dimension slope and we skip the bookkeeping.
                Component::Point(_) => {}
                Component::Product { approx, map, .. } => {
                    let k = approx.depth().min(approx.exact_depth());
                    let xs = axis_cells(approx, map, &map.translate.x, k, delta)?;
                    let ys = axis_cells(approx, map, &map.translate.y, k, delta)?;
                    let total = (xs.len() as u128) * (ys.len() as u128);
                    if total > 1 << 22 {
                        return Err(Error::EnumerationBudget {
                            requested: total,
                            limit: 1 << 22,
                        });
                    }
                    for &ix in &xs {
                        for &iy in &ys {
                            cells.insert((ix, iy));
                        }
                    }
                }
                Component::Line { approx, map, .. } => {
                    let k = approx.depth().min(approx.exact_depth());
                    let xs = axis_cells(approx, map, &map.translate.x, k, delta)?;
                    let y = &map.translate.y;
                    let (jy0, jy1) = cell_range(y, y, delta);
                    for &ix in &xs {
                        for jy in jy0..=jy1 {
                            cells.insert((ix, jy));
                        }
                    }
                }
            }
        }
        Ok(BoxCount {
            delta: delta.clone(),
            count: cells.len() as u64,
        })
    }
}

/// Distinct cell indices met along one axis by the mapped intervals.
fn axis_cells(
    approx: &CantorApprox,
    map: &SimilarityMap,
    offse: &Q,
    k: u64,
    delta: &Q,
) -> Result<Vec<i64>, Error> {
    let mut out = Vec::new();
    for iv in approx.intervals(k)? {
        let l = &map.scale * &iv.left + offse;
        let r = &map.scale * iv.right() + offse;
        let (lo, hi) = cell_range(&l, &r, delta);
        match out.last() {
            Some(&last) if last >= lo => {
                for i in (last + 1)..=hi {
                    out.push(i);
                }
            }
            _ => out.extend(lo..=hi),
        }
    }
    Ok(out)
}

/// The product annulus of the cell `(addr_x, addr_y)`:
/// `Ann((mid_x, mid_y); √2·r_k, R_k)` with `r_k = A_k/2`, `R_k = r_k + e_k`.
/// The square ring around the cell contains this true annulus, so it
/// inherits separation. Degenerate when `R_k ≤ √2·r_k`.
pub fn product_annulus(
    approx: &CantorApprox,
    addr_x: &Address,
    addr_y: &Address,
) -> Result<Annulus, Error> {
    assert_eq!(addr_x.depth(), addr_y.depth(), "cell needs equal depths");
    let k = addr_x.depth();
    assert!(k >= 1);
    let ix = approx.interval_of(addr_x)?;
    let iy = approx.interval_of(addr_y)?;
    let r = approx.length(k)? / q_int(2);
    let big_r = &r + approx.gap(k)?;
    if &big_r * &big_r <= q_int(2) * &r * &r {
        return Err(Error::DegenerateAnnulus);
    }
    Annulus::new(
        Pt::new(ix.midpoint(), iy.midpoint()),
        Radius::sqrt2_times(r),
        Radius::rational(big_r),
    )
}

/// Separation verdict for a planar annulus against the depth-`k` product
/// approximation `I_k × I_k` (untransformed coordinates).
#[derive(Clone, Debug)]
pub struct ProductVerdict {
    pub separates: bool,
    pub inner_witness: Option<Pt>,
    pub outer_witness: Option<Pt>,
    pub depth_used: u64,
    pub sound: bool,
}

/// Decide separation of `annulus` against `I_k × I_k`. Only cells within
/// the outer radius of the center can interfere, so the cost is local.
pub fn product_separation(
    annulus: &Annulus,
    approx: &CantorApprox,
    k: u64,
) -> Result<ProductVerdict, Error> {
    let r_sq = annulus.inner.sq();
    let big_r_sq = annulus.outer.sq();
    let c = &annulus.center;
    let reach = annulus.outer.upper();
    let xs = approx.intervals_in_range(&(&c.x - &reach), &(&c.x + &reach), k)?;
    let ys = approx.intervals_in_range(&(&c.y - &reach), &(&c.y + &reach), k)?;

    // Ring emptiness plus an endpoint-pair soundness certificate.
    let mut corner_inside: Option<Pt> = None;
    let mut meets = false;
    'outer: for jx in &xs {
        for jy in &ys {
            let cell = Rect::new(jx.left.clone(), jx.right(), jy.left.clone(), jy.right());
            if cell.meets_open_annulus(c, &r_sq, &big_r_sq) {
                meets = true;
                for corner in cell.corners() {
                    let d = corner.dist_sq(c);
                    if d > r_sq && d < big_r_sq {
                        corner_inside = Some(corner);
                        break 'outer;
                    }
                }
            }
        }
    }
    if meets {
        return Ok(ProductVerdict {
            separates: false,
            inner_witness: None,
            outer_witness: None,
            depth_used: k,
            sound: corner_inside.is_some(),
        });
    }

    // Bounded witness: a corner of a nearby cell inside the closed disk.
    let mut inner_witness = None;
    let mut disk_touched = false;
    'inner: for jx in &xs {
        for jy in &ys {
            let cell = Rect::new(jx.left.clone(), jx.right(), jy.left.clone(), jy.right());
            if cell.dist_sq_min(c) <= r_sq {
                disk_touched = true;
                for corner in cell.corners() {
                    if corner.dist_sq(c) <= r_sq {
                        inner_witness = Some(corner);
                        break 'inner;
                    }
                }
            }
        }
    }

    // Unbounded witness: the set's farthest point from any center is one of
    // the four unit-square corners, which are set points.
    let outer_witness = [
        Pt::new(Q::zero(), Q::zero()),
        Pt::new(Q::zero(), Q::one()),
        Pt::new(Q::one(), Q::zero()),
        Pt::new(Q::one(), Q::one()),
    ]
    .into_iter()
    .find(|p| p.dist_sq(c) >= big_r_sq);

    let separates = inner_witness.is_some() && outer_witness.is_some();
    let sound = if separates {
        true
    } else if inner_witness.is_none() {
        !disk_touched
    } else {
        true // I_k × I_k ⊂ B(c, R) is final
    };
    Ok(ProductVerdict {
        separates,
        inner_witness,
        outer_witness,
        depth_used: k,
        sound,
    })
}

/// A verified product-annulus witness.
#[derive(Clone, Debug)]
pub struct ProductWitness {
    pub x: Address,
    pub y: Address,
    pub annulus: Annulus,
    /// `(R/(√2·r))²`, exact.
    pub ratio_sq: Q,
    pub depth: u64,
}

#[derive(Clone, Debug)]
pub enum ProductOutcome {
    Found(ProductWitness),
    NotFound { scanned_depth: u64 },
}

impl ProductOutcome {
    pub fn found(&self) -> Option<&ProductWitness> {
        match self {
            ProductOutcome::Found(w) => Some(w),
            ProductOutcome::NotFound { .. } => None,
        }
    }
}

/// Scan depths for a product annulus of ratio at least `target_ratio`
/// around the planar point addressed by `(x, y)`; requires the line ratio
/// `1 + 2(1/a_k − m)/(m−1)` to reach `√2·target_ratio`.
pub fn product_hnup_witness(
    approx: &CantorApprox,
    x: &Address,
    y: &Address,
    target_ratio: &Q,
    depth_budget: u64,
) -> Result<ProductOutcome, Error> {
    assert!(target_ratio > &Q::one(), "target ratio must exceed 1");
    let max_k = depth_budget
        .min(x.depth())
        .min(y.depth())
        .min(approx.depth());
    let threshold = q_int(2) * target_ratio * target_ratio;
    for k in 1..=max_k {
        let line_ratio = crate::perfectness::canonical_ratio(approx, k);
        if &line_ratio * &line_ratio < threshold {
            continue;
        }
        let ann = match product_annulus(approx, &x.prefix(k), &y.prefix(k)) {
            Ok(a) => a,
            Err(Error::DegenerateAnnulus) => continue,
            Err(e) => return Err(e),
        };
        let verdict = product_separation(&ann, approx, k)?;
        if verdict.separates && verdict.sound {
            let ratio_sq = ann.ratio_sq();
            return Ok(ProductOutcome::Found(ProductWitness {
                x: x.clone(),
                y: y.clone(),
                annulus: ann,
                ratio_sq,
                depth: k,
            }));
        }
    }
    Ok(ProductOutcome::NotFound {
        scanned_depth: max_k,
    })
}

/// Ratio spec used for packed components: the sparse-power schedule at the
/// extremal base `a = 1/(m+1)`.
pub fn packing_spec(m: u32) -> RatioSpec {
    RatioSpec::sparse_power(m, Q::new(1.into(), (m as i64 + 1).into()))
        .expect("1/(m+1) is always admissible")
}

fn place_component(rho: &RhoSequence, m: u32) -> (Q, Q) {
    let (inner, outer) = rho.ring(2 * m);
    let side = (&outer - &inner) / q_int(2);
    let center_x = (&outer + &inner) / q_int(2);
    (side, center_x)
}

/// Assemble the planar packing `{0} ∪ ⋃_{m=2}^{m_max} (W_m × W_m)'` with
/// component `m` scaled into the ring `B_{2m}`; containment is verified
/// exactly and cannot fail under the default ring rule.
pub fn build_planar_packing(
    m_max: u32,
    depth_rule: impl Fn(u32) -> u64,
    rho: RhoSequence,
) -> Result<PlanarSet, Error> {
    assert!(m_max >= 2);
    let mut components = Vec::new();
    for m in 2..=m_max {
        let approx = CantorApprox::new(packing_spec(m), depth_rule(m));
        let (side, center_x) = place_component(&rho, m);
        let map = SimilarityMap::new(
            side.clone(),
            Pt::new(&center_x - &side / q_int(2), -&side / q_int(2)),
        )?;
        let component = Component::Product {
            index_m: m,
            approx,
            map,
        };
        verify_ring_containment(&component, &rho, m)?;
        components.push(component);
    }
    components.push(Component::Point(Pt::origin()));
    Ok(PlanarSet {
        components,
        rho,
    })
}

/// Assemble the line packing `{0} ∪ ⋃ W_m'` inside `B_{2m} ∩ [0, 1]`.
pub fn build_line_packing(
    m_max: u32,
    depth_rule: impl Fn(u32) -> u64,
    rho: RhoSequence,
) -> Result<PlanarSet, Error> {
    assert!(m_max >= 2);
    let mut components = Vec::new();
    for m in 2..=m_max {
        let approx = CantorApprox::new(packing_spec(m), depth_rule(m));
        let (side, center_x) = place_component(&rho, m);
        let map = SimilarityMap::new(
            side.clone(),
            Pt::new(&center_x - &side / q_int(2), Q::zero()),
        )?;
        let component = Component::Line {
            index_m: m,
            approx,
            map,
        };
        verify_ring_containment(&component, &rho, m)?;
        let rect = component.bounding_rect();
        if rect.x0.is_negative() || rect.x1 > Q::one() {
            return Err(Error::Containment { component: m });
        }
        components.push(component);
    }
    components.push(Component::Point(Pt::origin()));
    Ok(PlanarSet {
        components,
        rho,
    })
}

/// Exact check that a component's bounding rectangle sits strictly inside
/// its open ring `B_{2m}`.
fn verify_ring_containment(
    component: &Component,
    rho: &RhoSequence,
    m: u32,
) -> Result<(), Error> {
    let (inner, outer) = rho.ring(2 * m);
    let rect = component.bounding_rect();
    let origin = Pt::origin();
    let dmin = rect.dist_sq_min(&origin);
    let dmax = rect.dist_sq_max(&origin);
    if dmin > &inner * &inner && dmax < &outer * &outer {
        Ok(())
    } else {
        Err(Error::Containment { component: m })
    }
}

/// Exact check that every odd ring between adjacent components misses the
/// whole truncation (the packing-separation invariant).
pub fn verify_packing_separation(set: &PlanarSet) -> bool {
    let ms: Vec<u32> = set.components.iter().filter_map(|c| c.index_m()).collect();
    let Some(&max_m) = ms.iter().max() else {
        return true;
    };
    for m in 2..max_m {
        let (inner, outer) = set.rho.ring(2 * m + 1);
        let (inner_sq, outer_sq) = (&inner * &inner, &outer * &outer);
        for c in &set.components {
            let rect = c.bounding_rect();
            let dmin = rect.dist_sq_min(&Pt::origin());
            let dmax = rect.dist_sq_max(&Pt::origin());
            // Entirely inside the hole or entirely beyond the ring.
            if !(dmax <= inner_sq || dmin >= outer_sq) {
                return false;
            }
        }
    }
    true
}

/// A verified annulus for the packing's pointwise separation property:
/// `Ann(center; r, R)` misses the truncation, `R/r` meets the target, and a
/// set point lives at distance ≥ R.
#[derive(Clone, Debug)]
pub struct PackingWitness {
    pub center: Pt,
    pub inner: Radius,
    pub outer: Radius,
    pub kind: PackingWitnessKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PackingWitnessKind {
    /// Empty odd ring around the origin.
    OriginRing { ring: u32 },
    /// Scaled product-annulus witness inside component `m` at this depth.
    ProductAnnulus { m: u32, depth: u64 },
    /// Scaled line-annulus witness inside component `m`.
    LineAnnulus { m: u32, depth: u64 },
}

impl PackingWitness {
    /// `(R/r)²`, exact.
    pub fn ratio_sq(&self) -> Q {
        self.outer.sq() / self.inner.sq()
    }
}

#[derive(Clone, Debug)]
pub enum PackingOutcome {
    Found(PackingWitness),
    NotFound { reason: String },
}

impl PackingOutcome {
    pub fn found(&self) -> Option<&PackingWitness> {
        match self {
            PackingOutcome::Found(w) => Some(w),
            PackingOutcome::NotFound { .. } => None,
        }
    }
}

/// A point of the truncated packing: the origin, or an addressed point of
/// one component (product points carry two addresses, line points one).
#[derive(Clone, Debug)]
pub enum PackingPoint {
    Origin,
    Product {
        component: usize,
        x: Address,
        y: Address,
    },
    Line {
        component: usize,
        x: Address,
    },
}

/// Search a separating annulus of ratio ≥ `target_ratio` around a point of
/// the packing, disjoint from the whole truncation, with a set point at
/// distance ≥ R.
///
/// For the origin the deepest empty odd ring is used: its ratio `2^{4m+3}`
/// grows with the packing size, so failure means the truncation (not the
/// construction) ran out — enlarge `m_max` for larger targets. Component
/// points delegate to the canonical-annulus scan in local coordinates,
/// deepening the local approximation as the target demands, then re-verify
/// the scaled annulus against every other component and the origin.
pub fn additional_property_witness(
    set: &PlanarSet,
    point: &PackingPoint,
    target_ratio: &Q,
    depth_budget: u64,
) -> Result<PackingOutcome, Error> {
    if target_ratio <= &Q::one() {
        return Err(Error::InvalidSpec("target ratio must exceed 1".into()));
    }
    match point {
        PackingPoint::Origin => origin_ring_witness(set, target_ratio),
        PackingPoint::Product { component, x, y } => {
            component_product_witness(set, *component, x, y, target_ratio, depth_budget)
        }
        PackingPoint::Line { component, x } => {
            component_line_witness(set, *component, x, target_ratio, depth_budget)
        }
    }
}

fn origin_ring_witness(set: &PlanarSet, target_ratio: &Q) -> Result<PackingOutcome, Error> {
    let max_m = set
        .components
        .iter()
        .filter_map(|c| c.index_m())
        .max()
        .ok_or_else(|| Error::InvalidSpec("packing has no components".into()))?;
    // Deepest odd ring with a component on each side: B_{2m+1}, m = max−1.
    let m = max_m - 1;
    let ring = 2 * m + 1;
    let (inner, outer) = set.rho.ring(ring);
    let ratio = &outer / &inner;
    if &ratio < target_ratio {
        return Ok(PackingOutcome::NotFound {
            reason: alloc::format!(
                "deepest empty ring ratio {} below target; enlarge the packing",
                crate::rational::format_ratio(&ratio)
            ),
        });
    }
    // Emptiness against the truncation and an outer set witness.
    let (inner_sq, outer_sq) = (&inner * &inner, &outer * &outer);
    let mut outer_witnessed = false;
    for c in &set.components {
        let rect = c.bounding_rect();
        let dmin = rect.dist_sq_min(&Pt::origin());
        let dmax = rect.dist_sq_max(&Pt::origin());
        if !(dmax <= inner_sq || dmin >= outer_sq) {
            return Ok(PackingOutcome::NotFound {
                reason: "ring unexpectedly blocked by a component".into(),
            });
        }
        if dmin >= outer_sq && !matches!(c, Component::Point(_)) {
            outer_witnessed = true;
        }
    }
    if !outer_witnessed {
        return Ok(PackingOutcome::NotFound {
            reason: "no set point beyond the ring".into(),
        });
    }
    Ok(PackingOutcome::Found(PackingWitness {
        center: Pt::origin(),
        inner: Radius::rational(inner),
        outer: Radius::rational(outer),
        kind: PackingWitnessKind::OriginRing { ring },
    }))
}

fn component_product_witness(
    set: &PlanarSet,
    component: usize,
    x: &Address,
    y: &Address,
    target_ratio: &Q,
    depth_budget: u64,
) -> Result<PackingOutcome, Error> {
    let Component::Product {
        index_m,
        approx,
        map,
    } = &set.components[component]
    else {
        return Err(Error::InvalidSpec("component is not a product".into()));
    };
    // Deepen a local copy if the stored approximation is too shallow for
    // the target; similarity leaves every ratio unchanged.
    let needed = depth_budget.min(x.depth()).min(y.depth());
    let local;
    let approx = if approx.depth() >= needed {
        approx
    } else {
        local = CantorApprox::new(approx.spec().clone(), needed);
        &local
    };
    let outcome = product_hnup_witness(approx, x, y, target_ratio, depth_budget)?;
    let ProductOutcome::Found(w) = outcome else {
        let ProductOutcome::NotFound { scanned_depth } = outcome else {
            unreachable!()
        };
        return Ok(PackingOutcome::NotFound {
            reason: alloc::format!("no product annulus within depth {scanned_depth}"),
        });
    };
    // Transport to global coordinates and re-verify against the rest.
    let center = map.apply(&w.annulus.center);
    let inner = Radius::sqrt2_times(&map.scale * &w.annulus.inner.scale);
    let outer = Radius::rational(&map.scale * &w.annulus.outer.scale);
    if !ring_clear_of_others(set, component, &center, &inner.sq(), &outer.sq()) {
        return Ok(PackingOutcome::NotFound {
            reason: "scaled annulus collides with another component".into(),
        });
    }
    Ok(PackingOutcome::Found(PackingWitness {
        center,
        inner,
        outer,
        kind: PackingWitnessKind::ProductAnnulus {
            m: *index_m,
            depth: w.depth,
        },
    }))
}

fn component_line_witness(
    set: &PlanarSet,
    component: usize,
    x: &Address,
    target_ratio: &Q,
    depth_budget: u64,
) -> Result<PackingOutcome, Error> {
    let Component::Line {
        index_m,
        approx,
        map,
    } = &set.components[component]
    else {
        return Err(Error::InvalidSpec("component is not a line set".into()));
    };
    let needed = depth_budget.min(x.depth());
    let local;
    let approx = if approx.depth() >= needed {
        approx
    } else {
        local = CantorApprox::new(approx.spec().clone(), needed);
        &local
    };
    let outcome = crate::perfectness::hnup_witness(approx, x, target_ratio, depth_budget)?;
    let crate::perfectness::WitnessOutcome::Found(w) = outcome else {
        return Ok(PackingOutcome::NotFound {
            reason: "no line annulus within the depth budget".into(),
        });
    };
    let center = map.apply(&w.annulus.center);
    let inner = Radius::rational(&map.scale * &w.annulus.inner.scale);
    let outer = Radius::rational(&map.scale * &w.annulus.outer.scale);
    if !ring_clear_of_others(set, component, &center, &inner.sq(), &outer.sq()) {
        return Ok(PackingOutcome::NotFound {
            reason: "scaled annulus collides with another component".into(),
        });
    }
    Ok(PackingOutcome::Found(PackingWitness {
        center,
        inner,
        outer,
        kind: PackingWitnessKind::LineAnnulus {
            m: *index_m,
            depth: w.depth,
        },
    }))
}

/// No *other* component (nor the isolated origin) meets the open ring.
fn ring_clear_of_others(
    set: &PlanarSet,
    component: usize,
    center: &Pt,
    inner_sq: &Q,
    outer_sq: &Q,
) -> bool {
    for (i, c) in set.components.iter().enumerate() {
        if i == component {
            continue;
        }
        match c {
            Component::Point(p) => {
                let d = p.dist_sq(center);
                if &d > inner_sq && &d < outer_sq {
                    return false;
                }
            }
            _ => {
                if c.bounding_rect()
                    .meets_open_annulus(center, inner_sq, outer_sq)
                {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q_ratio;

    fn thirds(depth: u64) -> CantorApprox {
        CantorApprox::new(RatioSpec::constant(2, q_ratio(1, 3)).unwrap(), depth)
    }

    fn sparse(depth: u64) -> CantorApprox {
        CantorApprox::new(RatioSpec::sparse_power(2, q_ratio(1, 3)).unwrap(), depth)
    }

    #[test]
    fn product_annulus_constant_thirds_depth2() {
        // r_2 = 1/18, e_2 = 1/9, R_2 = 1/6: ratio² = 9/2, modulus ≈ 0.752.
        let approx = thirds(2);
        let a = Address::parse("01").unwrap();
        let ann = product_annulus(&approx, &a, &a).unwrap();
        assert_eq!(ann.inner.scale, q_ratio(1, 18));
        assert!(ann.inner.sqrt2);
        assert_eq!(ann.outer.scale, q_ratio(1, 6));
        assert_eq!(ann.ratio_sq(), q_ratio(9, 2));
        assert!((ann.modulus_f64() - 0.752_038_698_388_137).abs() < 1e-13);
    }

    #[test]
    fn product_annulus_sparse_depth4() {
        // Line ratio 15 → product ratio 15/√2: ratio² = 225/2.
        let approx = sparse(4);
        let a = Address::parse("0101").unwrap();
        let ann = product_annulus(&approx, &a, &a).unwrap();
        assert_eq!(ann.ratio_sq(), q_ratio(225, 2));
    }

    #[test]
    fn degenerate_product_annulus() {
        // m = 9, a = 1/10: line ratio 1 + (2/8)(10−9) = 5/4 < √2.
        let spec = RatioSpec::constant(9, q_ratio(1, 10)).unwrap();
        let approx = CantorApprox::new(spec, 1);
        let a = Address::parse("0").unwrap();
        assert!(matches!(
            product_annulus(&approx, &a, &a),
            Err(Error::DegenerateAnnulus)
        ));
    }

    #[test]
    fn product_separation_canonical() {
        let approx = thirds(2);
        for (sx, sy) in [("00", "00"), ("01", "10"), ("11", "01")] {
            let ax = Address::parse(sx).unwrap();
            let ay = Address::parse(sy).unwrap();
            let ann = product_annulus(&approx, &ax, &ay).unwrap();
            let v = product_separation(&ann, &approx, 2).unwrap();
            assert!(v.separates && v.sound, "cell ({sx},{sy})");
            // Bounded witness is a corner at distance exactly √2·r.
            let w = v.inner_witness.unwrap();
            assert_eq!(w.dist_sq(&ann.center), ann.inner.sq());
        }
    }

    #[test]
    fn product_witness_scan() {
        let approx = sparse(8);
        let x = Address::parse("01010101").unwrap();
        let y = Address::parse("10101010").unwrap();
        // target 30: needs line ratio ≥ 30√2 ≈ 42.4 → k = 8 (ratio 51).
        let w = product_hnup_witness(&approx, &x, &y, &q_int(30), 8).unwrap();
        let w = w.found().expect("witness at depth 8");
        assert_eq!(w.depth, 8);
        assert_eq!(w.ratio_sq, q_ratio(51 * 51, 2));
        // Constant schedule never reaches ratio 3: bounded by 3/√2.
        let approx = thirds(6);
        let x = Address::repeated(0, 6);
        let o = product_hnup_witness(&approx, &x, &x, &q_int(3), 6).unwrap();
        assert!(o.found().is_none());
        // Geometric power reaches 10 at k = 2 (line ratio 29 ≥ 10√2).
        let spec = RatioSpec::geometric_power(2, q_ratio(1, 4)).unwrap();
        let approx = CantorApprox::new(spec, 2);
        let z = Address::repeated(0, 2);
        let w = product_hnup_witness(&approx, &z, &z, &q_int(10), 2).unwrap();
        let w = w.found().unwrap();
        assert_eq!(w.depth, 2);
        assert_eq!(w.ratio_sq, q_ratio(29 * 29, 2));
    }

    #[test]
    fn rho_sequence_rules() {
        let rho = RhoSequence;
        assert_eq!(rho.rho(4), q_pow2_inv(16));
        assert_eq!(rho.rho(5), q_pow2_inv(25));
        for n in 1..12 {
            assert!(rho.rho(n + 1) < rho.rho(n));
            assert_eq!(rho.ring_ratio(n), Q::from_integer((1i64 << (2 * n + 1)).into()));
        }
    }

    #[test]
    fn packing_builds_and_contains() {
        let set = build_planar_packing(3, |_| 4, RhoSequence).unwrap();
        assert_eq!(set.components.len(), 3); // m = 2, 3, origin
        // Component m = 2 sits inside Ann(0; 2^{−25}, 2^{−16}).
        let rect = set.components[0].bounding_rect();
        let dmin = rect.dist_sq_min(&Pt::origin());
        let dmax = rect.dist_sq_max(&Pt::origin());
        assert!(dmin > q_pow2_inv(50));
        assert!(dmax < q_pow2_inv(32));
        assert!(verify_packing_separation(&set));
    }

    #[test]
    fn line_packing_stays_in_unit_interval() {
        let set = build_line_packing(4, |_| 4, RhoSequence).unwrap();
        for c in &set.components {
            let rect = c.bounding_rect();
            assert!(!rect.x0.is_negative() && rect.x1 <= Q::one());
            assert!(rect.y0.is_zero() && rect.y1.is_zero());
        }
        assert!(verify_packing_separation(&set));
    }

    #[test]
    fn origin_witness_uses_deepest_ring() {
        let set = build_planar_packing(4, |_| 4, RhoSequence).unwrap();
        let w = additional_property_witness(&set, &PackingPoint::Origin, &q_int(100), 8)
            .unwrap();
        let w = w.found().expect("origin ring witness");
        // m = 3 ring: B_7 = (ρ_8, ρ_7) with ratio 2^15.
        assert_eq!(w.kind, PackingWitnessKind::OriginRing { ring: 7 });
        assert_eq!(w.inner.scale, q_pow2_inv(64));
        assert_eq!(w.outer.scale, q_pow2_inv(49));
        assert_eq!(w.ratio_sq(), Q::from_integer((1i64 << 30).into()));
        // Hopeless target on a small packing: budget exhaustion.
        let o = additional_property_witness(
            &set,
            &PackingPoint::Origin,
            &Q::from_integer((1i64 << 40).into()),
            8,
        )
        .unwrap();
        assert!(o.found().is_none());
        // M = 1 violates the precondition.
        assert!(additional_property_witness(&set, &PackingPoint::Origin, &q_int(1), 8).is_err());
    }

    #[test]
    fn component_witness_scales_exactly() {
        let set = build_planar_packing(3, |_| 8, RhoSequence).unwrap();
        let p = PackingPoint::Product {
            component: 0,
            x: Address::parse("01010101").unwrap(),
            y: Address::parse("00110011").unwrap(),
        };
        let w = additional_property_witness(&set, &p, &q_int(30), 8).unwrap();
        let w = w.found().expect("component witness");
        // Similarity preserves the ratio: (51/√2)² = 1300.5 ≥ 900.
        assert_eq!(w.ratio_sq(), q_ratio(51 * 51, 2));
        assert_eq!(
            w.kind,
            PackingWitnessKind::ProductAnnulus { m: 2, depth: 8 }
        );
    }

    #[test]
    fn component_witness_deepens_beyond_stored_depth() {
        let set = build_planar_packing(3, |_| 8, RhoSequence).unwrap();
        let p = PackingPoint::Product {
            component: 0,
            x: Address::repeated(0, 20),
            y: Address::repeated(1, 20),
        };
        // target 100: needs line ratio ≥ 100√2 ≈ 141.4 → k = 16 (ratio 159).
        let w = additional_property_witness(&set, &p, &q_int(100), 20).unwrap();
        let w = w.found().expect("deepened witness");
        assert_eq!(
            w.kind,
            PackingWitnessKind::ProductAnnulus { m: 2, depth: 16 }
        );
        assert_eq!(w.ratio_sq(), q_ratio(159 * 159, 2));
    }

    #[test]
    fn line_packing_dimension_sup() {
        // sup over components of log m / log(m+1): log 9 / log 10 at m = 9.
        let set = build_line_packing(9, |_| 2, RhoSequence).unwrap();
        let sup = set
            .component_reports()
            .iter()
            .map(|r| r.dim_lower)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((sup - 0.954_242_509_439_324_9).abs() < 1e-12);
    }

    #[test]
    fn line_component_witness() {
        let set = build_line_packing(3, |_| 8, RhoSequence).unwrap();
        let p = PackingPoint::Line {
            component: 0,
            x: Address::parse("01010101").unwrap(),
        };
        // Line ratio 51 at k = 8 survives the similarity exactly.
        let w = additional_property_witness(&set, &p, &q_int(40), 8).unwrap();
        let w = w.found().expect("line witness");
        assert_eq!(w.kind, PackingWitnessKind::LineAnnulus { m: 2, depth: 8 });
        assert_eq!(w.ratio_sq(), q_int(51 * 51));
        // Mismatched point kinds are config errors.
        let bad = PackingPoint::Product {
            component: 0,
            x: Address::parse("0").unwrap(),
            y: Address::parse("0").unwrap(),
        };
        assert!(additional_property_witness(&set, &bad, &q_int(2), 8).is_err());
    }

    #[test]
    fn component_reports_dimension_bounds() {
        let set = build_planar_packing(5, |_| 4, RhoSequence).unwrap();
        let reports = set.component_reports();
        assert_eq!(reports.len(), 4);
        let sup = reports
            .iter()
            .map(|r| r.dim_lower)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((sup - 1.796_488_803_407_854_3).abs() < 1e-12);
        for r in &reports {
            assert!(r.dim_upper < 2.0);
            assert!(r.dim_lower < r.dim_upper);
        }
    }

    #[test]
    fn unit_square_box_count() {
        let approx = CantorApprox::new(RatioSpec::constant(2, q_ratio(1, 3)).unwrap(), 0);
        let square = PlanarSet::product_of(approx, SimilarityMap::identity());
        assert_eq!(square.box_count(&q_ratio(1, 2)).unwrap().count, 4);
        assert_eq!(square.box_count(&q_int(1)).unwrap().count, 1);
    }

    #[test]
    fn product_box_count_thirds() {
        let approx = thirds(2);
        let set = PlanarSet::product_of(approx, SimilarityMap::identity());
        // Depth-2 product on the 1/9 grid: 4 × 4 cells.
        assert_eq!(set.box_count(&q_ratio(1, 9)).unwrap().count, 16);
        assert_eq!(set.box_count(&q_ratio(1, 3)).unwrap().count, 4);
    }

    #[test]
    fn similarity_map_geometry() {
        let map = SimilarityMap::new(q_ratio(1, 2), Pt::new(q_int(3), q_int(1))).unwrap();
        let p = map.apply(&Pt::new(q_int(1), q_int(1)));
        assert_eq!(p, Pt::new(q_ratio(7, 2), q_ratio(3, 2)));
        assert!(SimilarityMap::new(q_int(0), Pt::origin()).is_err());
        // Distance ratios are preserved exactly.
        let a = Pt::new(q_int(0), q_int(0));
        let b = Pt::new(q_int(2), q_int(0));
        let c = Pt::new(q_int(5), q_int(0));
        let r1 = a.dist_sq(&b) / a.dist_sq(&c);
        let r2 = map.apply(&a).dist_sq(&map.apply(&b)) / map.apply(&a).dist_sq(&map.apply(&c));
        assert_eq!(r1, r2);
    }
}
