//! Exact planar primitives.
//!
//! All comparisons against circles go through squared distances, so nothing
//! here ever needs an irrational value: a radius carrying a `√2` factor
//! stores the factor symbolically and squares it away.

use num_traits::{Signed, Zero};

use crate::rational::{q_int, Q};

/// Point with exact rational coordinates; the real line embeds as `y = 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pt {
    pub x: Q,
    pub y: Q,
}

impl Pt {
    pub fn new(x: Q, y: Q) -> Pt {
        Pt { x, y }
    }

    pub fn on_line(x: Q) -> Pt {
        Pt { x, y: Q::zero() }
    }

    pub fn origin() -> Pt {
        Pt {
            x: Q::zero(),
            y: Q::zero(),
        }
    }

    pub fn dist_sq(&self, other: &Pt) -> Q {
        let dx = &self.x - &other.x;
        let dy = &self.y - &other.y;
        &dx * &dx + &dy * &dy
    }

    pub fn norm_sq(&self) -> Q {
        &self.x * &self.x + &self.y * &self.y
    }
}

/// Radius value `scale · √2^{sqrt2}`; squaring removes the surd.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Radius {
    pub scale: Q,
    pub sqrt2: bool,
}

impl Radius {
    pub fn rational(scale: Q) -> Radius {
        Radius {
            scale,
            sqrt2: false,
        }
    }

    pub fn sqrt2_times(scale: Q) -> Radius {
        Radius { scale, sqrt2: true }
    }

    pub fn sq(&self) -> Q {
        let s = &self.scale * &self.scale;
        if self.sqrt2 {
            s * q_int(2)
        } else {
            s
        }
    }

    pub fn is_positive(&self) -> bool {
        self.scale.is_positive()
    }

    /// Rational upper bound on the radius value (`3/2 > √2`).
    pub fn upper(&self) -> Q {
        if self.sqrt2 {
            &self.scale * q_int(3) / q_int(2)
        } else {
            self.scale.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        let v = crate::rational::to_f64_approx(&self.scale);
        if self.sqrt2 {
            v * core::f64::consts::SQRT_2
        } else {
            v
        }
    }
}

/// Closed axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rect {
    pub x0: Q,
    pub x1: Q,
    pub y0: Q,
    pub y1: Q,
}

impl Rect {
    pub fn new(x0: Q, x1: Q, y0: Q, y1: Q) -> Rect {
        debug_assert!(x0 <= x1 && y0 <= y1);
        Rect { x0, x1, y0, y1 }
    }

    /// Degenerate rectangle for a segment `[x0, x1]` on the real line.
    pub fn segment(x0: Q, x1: Q) -> Rect {
        Rect {
            x0,
            x1,
            y0: Q::zero(),
            y1: Q::zero(),
        }
    }

    pub fn corners(&self) -> [Pt; 4] {
        [
            Pt::new(self.x0.clone(), self.y0.clone()),
            Pt::new(self.x0.clone(), self.y1.clone()),
            Pt::new(self.x1.clone(), self.y0.clone()),
            Pt::new(self.x1.clone(), self.y1.clone()),
        ]
    }

    fn axis_dist_min(lo: &Q, hi: &Q, c: &Q) -> Q {
        if c < lo {
            lo - c
        } else if c > hi {
            c - hi
        } else {
            Q::zero()
        }
    }

    fn axis_dist_max(lo: &Q, hi: &Q, c: &Q) -> Q {
        let a = (c - lo).abs();
        let b = (c - hi).abs();
        a.max(b)
    }

    /// Squared distance from `p` to the nearest point of the rectangle.
    pub fn dist_sq_min(&self, p: &Pt) -> Q {
        let dx = Self::axis_dist_min(&self.x0, &self.x1, &p.x);
        let dy = Self::axis_dist_min(&self.y0, &self.y1, &p.y);
        &dx * &dx + &dy * &dy
    }

    /// Squared distance from `p` to the farthest point of the rectangle.
    pub fn dist_sq_max(&self, p: &Pt) -> Q {
        let dx = Self::axis_dist_max(&self.x0, &self.x1, &p.x);
        let dy = Self::axis_dist_max(&self.y0, &self.y1, &p.y);
        &dx * &dx + &dy * &dy
    }

    /// Whether the rectangle meets the open annulus `{r < |z−c| < R}`.
    ///
    /// The distance function to `c` is continuous on the connected rectangle,
    /// so its range is exactly `[dmin, dmax]` and the rectangle meets the
    /// ring iff `dmin < R` and `dmax > r`. Tangency (an extreme exactly on a
    /// circle) is not intersection.
    pub fn meets_open_annulus(&self, center: &Pt, r_sq: &Q, bigr_sq: &Q) -> bool {
        self.dist_sq_min(center) < *bigr_sq && self.dist_sq_max(center) > *r_sq
    }
}
