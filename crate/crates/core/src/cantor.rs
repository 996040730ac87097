//! Finite-depth approximations `I_k` of the Cantor-like set and their exact
//! interval geometry.
//!
//! Depth `k` consists of `m^k` closed basic intervals of common length
//! `A_k = a_1⋯a_k`. Each parent holds `m` equally spaced children separated
//! by the depth's gap `e_k`, fixed by `(m−1)·e_k = A_{k−1} − m·A_k`, and the
//! outermost children share the parent's endpoints. The identity
//! `(m−1)·(A_k + e_k) + A_k = A_{k−1}` makes the child stride
//! `step_k = A_k + e_k` exact, so every endpoint is an exact rational.
//!
//! Lengths and gaps are carried both as exact rationals (until the bit-size
//! budget is exceeded) and as [`Fx128`] natural logs (always).

use alloc::vec;
use alloc::vec::Vec;

use alloc::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::fix128::{ln_rational, Fx128};
use crate::ratio::RatioSpec;
use crate::rational::{bit_size, floor_int, q_int, Q};
use crate::{DEFAULT_BUDGET_BITS, ENUMERATION_LIMIT};

/// Word over `{0, …, m−1}` naming one basic interval per depth; the digit at
/// position `i` selects the child inside the depth-`i` parent.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Address {
    digits: Vec<u32>,
}

impl Address {
    pub fn root() -> Address {
        Address { digits: Vec::new() }
    }

    pub fn from_digits(digits: Vec<u32>) -> Address {
        Address { digits }
    }

    /// `len` copies of a single digit (e.g. the leftmost branch `0…0`).
    pub fn repeated(digit: u32, len: usize) -> Address {
        Address {
            digits: vec![digit; len],
        }
    }

    /// Parse a compact digit string like `"011"`; only sensible for m ≤ 10.
    pub fn parse(s: &str) -> Option<Address> {
        let mut digits = Vec::with_capacity(s.len());
        for c in s.chars() {
            digits.push(c.to_digit(10)?);
        }
        Some(Address { digits })
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn depth(&self) -> u64 {
        self.digits.len() as u64
    }

    pub fn is_root(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn child(&self, digit: u32) -> Address {
        let mut digits = self.digits.clone();
        digits.push(digit);
        Address { digits }
    }

    pub fn prefix(&self, depth: u64) -> Address {
        Address {
            digits: self.digits[..depth as usize].to_vec(),
        }
    }

    /// Longest common prefix length with another address.
    pub fn common_prefix_len(&self, other: &Address) -> u64 {
        self.digits
            .iter()
            .zip(other.digits.iter())
            .take_while(|(a, b)| a == b)
            .count() as u64
    }
}

impl core::fmt::Display for Address {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.digits.is_empty() {
            return write!(f, "ε");
        }
        let compact = self.digits.iter().all(|&d| d < 10);
        for (i, d) in self.digits.iter().enumerate() {
            if compact {
                write!(f, "{d}")?;
            } else {
                if i > 0 {
                    write!(f, ".")?;
                }
                write!(f, "{d}")?;
            }
        }
        Ok(())
    }
}

/// Exact and log-space geometry of one depth.
#[derive(Clone, Debug)]
pub struct DepthState {
    pub depth: u64,
    /// `ln A_k`, exact-sum fixed point; never dropped.
    pub log_len: Fx128,
    /// `A_k` while the bit budget allows.
    pub len_exact: Option<Q>,
    /// `ln e_k` (absent at depth 0, which has no gaps).
    pub log_gap: Option<Fx128>,
    /// `e_k` while the bit budget allows.
    pub gap_exact: Option<Q>,
}

impl DepthState {
    pub fn initial() -> DepthState {
        DepthState {
            depth: 0,
            log_len: Fx128::ZERO,
            len_exact: Some(Q::one()),
            log_gap: None,
            gap_exact: None,
        }
    }

    /// True when exact rationals were dropped for this depth.
    pub fn degraded(&self) -> bool {
        self.len_exact.is_none()
    }
}

/// One step of the construction: `A_{k+1} = a_{k+1}·A_k` and
/// `(m−1)·e_{k+1} = A_k − m·A_{k+1}`. Exact values are dropped (never
/// recovered) once their bit size passes `budget_bits`.
pub fn refine(state: &DepthState, m: u32, a_next: &Q, budget_bits: u64) -> DepthState {
    refine_with_log(state, m, a_next, ln_rational(a_next), budget_bits)
}

/// [`refine`] with the ratio's log precomputed (callers cache per value).
pub(crate) fn refine_with_log(
    state: &DepthState,
    m: u32,
    a_next: &Q,
    log_a_next: Fx128,
    budget_bits: u64,
) -> DepthState {
    let depth = state.depth + 1;
    let log_len = state.log_len + log_a_next;
    // ln e_{k+1} = ln A_k + ln((1 − m·a_{k+1}) / (m−1)).
    let gap_scale = (q_int(1) - q_int(m as i64) * a_next) / q_int(m as i64 - 1);
    let log_gap = Some(state.log_len + ln_rational(&gap_scale));

    let (len_exact, gap_exact) = match &state.len_exact {
        Some(prev) => {
            let len = prev * a_next;
            let gap = prev * &gap_scale;
            if bit_size(&len) > budget_bits || bit_size(&gap) > budget_bits {
                (None, None)
            } else {
                (Some(len), Some(gap))
            }
        }
        None => (None, None),
    };

    DepthState {
        depth,
        log_len,
        len_exact,
        log_gap,
        gap_exact,
    }
}

/// Closed basic interval `[left, left + length]` at depth `address.depth()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicInterval {
    pub address: Address,
    pub left: Q,
    pub length: Q,
}

impl BasicInterval {
    pub fn right(&self) -> Q {
        &self.left + &self.length
    }

    pub fn midpoint(&self) -> Q {
        &self.left + &self.length / q_int(2)
    }

    pub fn contains(&self, x: &Q) -> bool {
        x >= &self.left && x <= &self.right()
    }
}

/// All `2·m^k` endpoints of the depth-`k` intervals, ascending. Endpoints
/// persist to every deeper approximation, so they belong to the limit set.
#[derive(Clone, Debug)]
pub struct EndpointSet {
    pub depth: u64,
    pub points: Vec<Q>,
}

impl EndpointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the interval owning endpoint `i` (two endpoints each, in
    /// positional = address-lexicographic order).
    pub fn interval_index(&self, i: usize) -> u64 {
        (i / 2) as u64
    }

    /// Whether endpoint `i` is the right endpoint of its interval.
    pub fn is_right(&self, i: usize) -> bool {
        i % 2 == 1
    }
}

/// Membership verdict for a point probed against `I_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Location {
    /// The depth-`k` interval containing the point.
    Inside(Address),
    /// The point first falls strictly inside a gap at this depth.
    Outside { gap_depth: u64 },
}

/// Finite-depth approximation: ratio spec plus per-depth states.
#[derive(Clone, Debug)]
pub struct CantorApprox {
    spec: RatioSpec,
    budget_bits: u64,
    ratios: Vec<Q>,
    states: Vec<DepthState>,
    log_cache: BTreeMap<Q, Fx128>,
    /// Depths where the gap failed to shrink. Impossible under the standard
    /// bound `a ≤ 1/(m+1)`; relaxed specs record rather than reject it.
    gap_warnings: Vec<u64>,
}

impl CantorApprox {
    pub fn new(spec: RatioSpec, depth: u64) -> CantorApprox {
        Self::with_budget(spec, depth, DEFAULT_BUDGET_BITS)
    }

    pub fn with_budget(spec: RatioSpec, depth: u64, budget_bits: u64) -> CantorApprox {
        let mut approx = CantorApprox {
            spec,
            budget_bits,
            ratios: Vec::new(),
            states: vec![DepthState::initial()],
            log_cache: BTreeMap::new(),
            gap_warnings: Vec::new(),
        };
        approx.extend_to(depth);
        approx
    }

    /// Deepen in place; existing states are never recomputed.
    pub fn extend_to(&mut self, depth: u64) {
        while self.depth() < depth {
            let k = self.depth() + 1;
            let a = self.spec.ratio_at(k);
            let log_a = match self.log_cache.get(&a) {
                Some(l) => *l,
                None => {
                    let l = ln_rational(&a);
                    self.log_cache.insert(a.clone(), l);
                    l
                }
            };
            let prev = self.states.last().unwrap();
            let next = refine_with_log(prev, self.spec.m(), &a, log_a, self.budget_bits);
            let shrank = match (&prev.gap_exact, &next.gap_exact) {
                (Some(pg), Some(ng)) => ng < pg,
                _ => match (prev.log_gap, next.log_gap) {
                    (Some(pl), Some(nl)) => nl < pl,
                    _ => true, // depth 1 has no predecessor gap
                },
            };
            if !shrank {
                debug_assert!(self.spec.is_relaxed(), "gap growth under the standard bound");
                self.gap_warnings.push(next.depth);
            }
            self.states.push(next);
            self.ratios.push(a);
        }
    }

    pub fn spec(&self) -> &RatioSpec {
        &self.spec
    }

    pub fn m(&self) -> u32 {
        self.spec.m()
    }

    pub fn depth(&self) -> u64 {
        (self.states.len() - 1) as u64
    }

    /// Depths at which the gap failed to shrink; nonempty only for
    /// relaxed-bound specs.
    pub fn gap_monotonicity_warnings(&self) -> &[u64] {
        &self.gap_warnings
    }

    /// Deepest depth still carrying exact rationals.
    pub fn exact_depth(&self) -> u64 {
        self.states.iter().take_while(|s| !s.degraded()).count() as u64 - 1
    }

    pub fn state(&self, k: u64) -> &DepthState {
        &self.states[k as usize]
    }

    pub fn states(&self) -> &[DepthState] {
        &self.states
    }

    /// `a_k` as used at step `k ∈ 1..=depth`.
    pub fn ratio(&self, k: u64) -> &Q {
        &self.ratios[k as usize - 1]
    }

    fn check_depth(&self, k: u64) -> Result<(), Error> {
        if k > self.depth() {
            return Err(Error::InsufficientDepth {
                needed: k,
                have: self.depth(),
            });
        }
        Ok(())
    }

    /// Exact length `A_k`.
    pub fn length(&self, k: u64) -> Result<&Q, Error> {
        self.check_depth(k)?;
        self.states[k as usize]
            .len_exact
            .as_ref()
            .ok_or(Error::ExactBudgetExceeded { depth: k })
    }

    /// Exact gap `e_k` (`k ≥ 1`).
    pub fn gap(&self, k: u64) -> Result<&Q, Error> {
        assert!(k >= 1, "gaps exist from depth 1");
        self.check_depth(k)?;
        self.states[k as usize]
            .gap_exact
            .as_ref()
            .ok_or(Error::ExactBudgetExceeded { depth: k })
    }

    pub fn log_length(&self, k: u64) -> Fx128 {
        self.states[k as usize].log_len
    }

    /// Child stride at depth `k`: `A_k + e_k`; the identity
    /// `(m−1)·step_k + A_k = A_{k−1}` holds exactly.
    pub fn child_step(&self, k: u64) -> Result<Q, Error> {
        Ok(self.length(k)? + self.gap(k)?)
    }

    /// Number of intervals at depth `k`, refused above the enumeration limit.
    fn count_at(&self, k: u64) -> Result<u64, Error> {
        (self.spec.m() as u64)
            .checked_pow(k as u32)
            .filter(|&c| c <= ENUMERATION_LIMIT)
            .ok_or(Error::EnumerationBudget {
                requested: (self.spec.m() as u128).saturating_pow(k as u32),
                limit: ENUMERATION_LIMIT as u128,
            })
    }

    /// The basic interval named by an address (exact arithmetic required).
    pub fn interval_of(&self, address: &Address) -> Result<BasicInterval, Error> {
        let k = address.depth();
        self.check_depth(k)?;
        let mut left = Q::zero();
        for (i, &digit) in address.digits().iter().enumerate() {
            let depth = i as u64 + 1;
            assert!(digit < self.spec.m(), "digit {digit} out of range");
            let step = self.child_step(depth)?;
            left += q_int(digit as i64) * step;
        }
        Ok(BasicInterval {
            address: address.clone(),
            left,
            length: self.length(k)?.clone(),
        })
    }

    /// All depth-`k` intervals in address (= positional) order.
    pub fn intervals(&self, k: u64) -> Result<Vec<BasicInterval>, Error> {
        self.check_depth(k)?;
        let count = self.count_at(k)?;
        let steps: Vec<Q> = (1..=k)
            .map(|d| self.child_step(d))
            .collect::<Result<_, _>>()?;
        let m = self.spec.m() as u64;
        let length = self.length(k)?;
        let mut out = Vec::with_capacity(count as usize);
        let mut digits = vec![0u32; k as usize];
        let mut left = Q::zero();
        loop {
            out.push(BasicInterval {
                address: Address::from_digits(digits.clone()),
                left: left.clone(),
                length: length.clone(),
            });
            // Odometer increment with exact left-endpoint updates.
            let mut pos = k as usize;
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                if (digits[pos] as u64) + 1 < m {
                    digits[pos] += 1;
                    left += &steps[pos];
                    break;
                }
                left -= q_int(digits[pos] as i64) * &steps[pos];
                digits[pos] = 0;
            }
        }
    }

    /// Endpoints of every depth-`k` interval, ascending; size `2·m^k`.
    pub fn endpoints(&self, k: u64) -> Result<EndpointSet, Error> {
        let intervals = self.intervals(k)?;
        let mut points = Vec::with_capacity(intervals.len() * 2);
        for iv in &intervals {
            points.push(iv.left.clone());
            points.push(iv.right());
        }
        debug_assert!(points.windows(2).all(|w| w[0] < w[1]));
        Ok(EndpointSet { depth: k, points })
    }

    /// Locate `x ∈ [0, 1]` against `I_k`: its depth-`k` address, or the
    /// first depth at which it falls strictly inside a gap.
    pub fn locate(&self, x: &Q, k: u64) -> Result<Location, Error> {
        assert!(
            !x.is_negative() && x <= &Q::one(),
            "locate expects x in [0, 1]"
        );
        self.check_depth(k)?;
        let m = self.spec.m() as i64;
        let mut rel = x.clone();
        let mut digits = Vec::with_capacity(k as usize);
        for depth in 1..=k {
            let step = self.child_step(depth)?;
            let mut digit = floor_int(&(&rel / &step));
            if digit >= m.into() {
                digit = (m - 1).into();
            }
            let offset = &rel - Q::from_integer(digit.clone()) * &step;
            if &offset > self.length(depth)? {
                return Ok(Location::Outside { gap_depth: depth });
            }
            digits.push(u32::try_from(digit).expect("digit fits u32"));
            rel = offset;
        }
        Ok(Location::Inside(Address::from_digits(digits)))
    }

    /// Depth-`k` intervals meeting the closed range `[lo, hi]`, by pruned
    /// descent — cost scales with the number of hits, not with `m^k`.
    pub fn intervals_in_range(
        &self,
        lo: &Q,
        hi: &Q,
        k: u64,
    ) -> Result<Vec<BasicInterval>, Error> {
        self.check_depth(k)?;
        let steps: Vec<Q> = (1..=k)
            .map(|d| self.child_step(d))
            .collect::<Result<_, _>>()?;
        let lengths: Vec<Q> = (0..=k)
            .map(|d| self.length(d).cloned())
            .collect::<Result<_, _>>()?;
        let mut out = Vec::new();
        let mut digits: Vec<u32> = Vec::with_capacity(k as usize);
        self.range_walk(&mut digits, Q::zero(), lo, hi, k, &steps, &lengths, &mut out);
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn range_walk(
        &self,
        digits: &mut Vec<u32>,
        left: Q,
        lo: &Q,
        hi: &Q,
        k: u64,
        steps: &[Q],
        lengths: &[Q],
        out: &mut Vec<BasicInterval>,
    ) {
        let depth = digits.len();
        let right = &left + &lengths[depth];
        if &left > hi || &right < lo {
            return;
        }
        if depth as u64 == k {
            out.push(BasicInterval {
                address: Address::from_digits(digits.clone()),
                left,
                length: lengths[k as usize].clone(),
            });
            return;
        }
        let step = &steps[depth];
        for digit in 0..self.spec.m() {
            let child_left = &left + q_int(digit as i64) * step;
            digits.push(digit);
            self.range_walk(digits, child_left, lo, hi, k, steps, lengths, out);
            digits.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{format_ratio, q_ratio, to_f64_approx};
    use alloc::string::ToString;

    fn fmt_interval(iv: &BasicInterval) -> alloc::string::String {
        alloc::format!(
            "{} [{} +{}]",
            iv.address,
            format_ratio(&iv.left),
            format_ratio(&iv.length)
        )
    }

    fn thirds() -> CantorApprox {
        CantorApprox::new(RatioSpec::constant(2, q_ratio(1, 3)).unwrap(), 6)
    }

    fn geo4() -> CantorApprox {
        CantorApprox::new(RatioSpec::geometric_power(2, q_ratio(1, 4)).unwrap(), 6)
    }

    #[test]
    fn refine_middle_thirds() {
        let approx = thirds();
        assert_eq!(approx.length(1).unwrap(), &q_ratio(1, 3));
        assert_eq!(approx.gap(1).unwrap(), &q_ratio(1, 3));
        assert_eq!(approx.length(2).unwrap(), &q_ratio(1, 9));
        assert_eq!(approx.gap(2).unwrap(), &q_ratio(1, 9));
    }

    #[test]
    fn refine_three_branches() {
        // m = 3, a = 1/4: e_1 = (1 − 3/4)/2 = 1/8.
        let approx = CantorApprox::new(RatioSpec::constant(3, q_ratio(1, 4)).unwrap(), 3);
        assert_eq!(approx.length(1).unwrap(), &q_ratio(1, 4));
        assert_eq!(approx.gap(1).unwrap(), &q_ratio(1, 8));
    }

    #[test]
    fn refine_geometric_power() {
        // a_2 = 1/16: A_2 = 1/64, e_2 = (1/4)(1 − 2/16) = 7/32.
        let approx = geo4();
        assert_eq!(approx.length(2).unwrap(), &q_ratio(1, 64));
        assert_eq!(approx.gap(2).unwrap(), &q_ratio(7, 32));
        // Depth 3 under the all-zero branch: left 0, length 4^{-6}.
        let iv = approx.interval_of(&Address::repeated(0, 3)).unwrap();
        assert_eq!(iv.left, q_int(0));
        assert_eq!(iv.length, q_ratio(1, 4096));
    }

    #[test]
    fn interval_addressing() {
        // m = 3, a = 1/4: child stride 1/4 + 1/8 = 3/8; address "1" → left 3/8.
        let approx = CantorApprox::new(RatioSpec::constant(3, q_ratio(1, 4)).unwrap(), 2);
        let iv = approx.interval_of(&Address::parse("1").unwrap()).unwrap();
        assert_eq!(iv.left, q_ratio(3, 8));
        assert_eq!(iv.length, q_ratio(1, 4));
        // Middle thirds "11" → [8/9, 1].
        let approx = thirds();
        let iv = approx.interval_of(&Address::parse("11").unwrap()).unwrap();
        assert_eq!(iv.left, q_ratio(8, 9));
        assert_eq!(iv.length, q_ratio(1, 9));
        assert_eq!(iv.right(), q_int(1));
        assert_eq!(fmt_interval(&iv), "11 [8/9 +1/9]");
    }

    #[test]
    fn rightmost_child_shares_parent_right_endpoint() {
        let approx = geo4();
        for k in 1..=4u64 {
            let parent = Address::repeated(1, k as usize - 1);
            let child = parent.child(1);
            let pr = approx.interval_of(&parent).unwrap().right();
            let cr = approx.interval_of(&child).unwrap().right();
            assert_eq!(pr, cr);
        }
    }

    #[test]
    fn endpoints_of_small_depths() {
        let approx = geo4();
        let e1 = approx.endpoints(1).unwrap();
        assert_eq!(
            e1.points,
            alloc::vec![q_int(0), q_ratio(1, 4), q_ratio(3, 4), q_int(1)]
        );
        let approx = thirds();
        let e1 = approx.endpoints(1).unwrap();
        assert_eq!(
            e1.points,
            alloc::vec![q_int(0), q_ratio(1, 3), q_ratio(2, 3), q_int(1)]
        );
        let e0 = approx.endpoints(0).unwrap();
        assert_eq!(e0.points, alloc::vec![q_int(0), q_int(1)]);
        // Nesting: E_k ⊆ E_{k+1}.
        let e2 = approx.endpoints(2).unwrap();
        for p in &e1.points {
            assert!(e2.points.contains(p));
        }
        assert_eq!(e2.len(), 8);
    }

    #[test]
    fn locate_gap_and_endpoint() {
        let approx = thirds();
        assert_eq!(
            approx.locate(&q_ratio(1, 2), 1).unwrap(),
            Location::Outside { gap_depth: 1 }
        );
        assert_eq!(
            approx.locate(&q_int(1), 3).unwrap(),
            Location::Inside(Address::parse("111").unwrap())
        );
        // 7/16 sits in the depth-1 middle gap of the geometric spec.
        let approx = geo4();
        assert_eq!(
            approx.locate(&q_ratio(7, 16), 2).unwrap(),
            Location::Outside { gap_depth: 1 }
        );
        // 15/64 is the left endpoint of the second depth-2 interval.
        assert_eq!(
            approx.locate(&q_ratio(15, 64), 2).unwrap(),
            Location::Inside(Address::parse("01").unwrap())
        );
    }

    #[test]
    fn locate_agrees_with_enumeration() {
        let approx = geo4();
        let k = 3;
        let intervals = approx.intervals(k).unwrap();
        // Probe a grid of rationals across [0,1].
        for i in 0..=160 {
            let x = q_ratio(i, 160);
            let hit = intervals.iter().find(|iv| iv.contains(&x));
            match approx.locate(&x, k).unwrap() {
                Location::Inside(addr) => {
                    assert_eq!(&addr, &hit.expect("locate says inside").address);
                }
                Location::Outside { .. } => assert!(hit.is_none()),
            }
        }
    }

    #[test]
    fn gap_identity_and_monotonicity() {
        for approx in [thirds(), geo4()] {
            let m = q_int(approx.m() as i64);
            for k in 1..=approx.depth() {
                let lhs = q_int(approx.m() as i64 - 1) * approx.gap(k).unwrap();
                let rhs = approx.length(k - 1).unwrap() - &m * approx.length(k).unwrap();
                assert_eq!(lhs, rhs, "gap identity at depth {k}");
                let floor = approx.spec().gap_floor() * approx.length(k - 1).unwrap()
                    / q_int(approx.m() as i64 - 1);
                assert!(approx.gap(k).unwrap() >= &floor);
                if k > 1 {
                    assert!(approx.gap(k).unwrap() < approx.gap(k - 1).unwrap());
                }
            }
        }
    }

    #[test]
    fn separation_between_all_depth_k_intervals() {
        for approx in [thirds(), geo4()] {
            let k = 4;
            let intervals = approx.intervals(k).unwrap();
            let e_k = approx.gap(k).unwrap();
            for pair in intervals.windows(2) {
                let dist = &pair[1].left - pair[0].right();
                assert!(&dist >= e_k, "adjacent intervals closer than e_k");
            }
        }
    }

    #[test]
    fn budget_degrades_to_log_space() {
        // A_k ≈ k(k+1) bits here, so a 1000-bit budget dies near depth 31.
        let spec = RatioSpec::geometric_power(2, q_ratio(1, 4)).unwrap();
        let approx = CantorApprox::with_budget(spec, 40, 1000);
        assert!(approx.exact_depth() < 40);
        assert!(matches!(
            approx.length(40),
            Err(Error::ExactBudgetExceeded { .. })
        ));
        assert!(matches!(
            approx.interval_of(&Address::repeated(0, 40)),
            Err(Error::ExactBudgetExceeded { .. })
        ));
        // Log-space stays available and sane: ln A_40 = -(40·41/2)·ln 4.
        let got = approx.log_length(40).to_f64();
        let want = -820.0 * 4.0f64.ln();
        assert!((got - want).abs() < 1e-9 * want.abs());
    }

    #[test]
    fn dual_representation_coherence() {
        let approx = geo4();
        for k in 0..=approx.depth() {
            let exact = approx.length(k).unwrap();
            let direct = ln_rational(exact).to_f64();
            let tracked = approx.log_length(k).to_f64();
            let denom = direct.abs().max(1.0);
            assert!(((direct - tracked) / denom).abs() < 1e-12);
        }
    }

    #[test]
    fn range_walk_matches_filter() {
        let approx = thirds();
        let k = 5;
        let lo = q_ratio(1, 5);
        let hi = q_ratio(2, 3);
        let expect: Vec<_> = approx
            .intervals(k)
            .unwrap()
            .into_iter()
            .filter(|iv| iv.left <= hi && iv.right() >= lo)
            .collect();
        let got = approx.intervals_in_range(&lo, &hi, k).unwrap();
        assert_eq!(got, expect);
        assert!(!got.is_empty());
    }

    #[test]
    fn enumeration_budget_refusal() {
        let spec = RatioSpec::constant(2, q_ratio(1, 3)).unwrap();
        let approx = CantorApprox::new(spec, 21);
        assert!(approx.intervals(21).is_err());
        let spec = RatioSpec::constant(2, q_ratio(1, 3)).unwrap();
        let approx = CantorApprox::new(spec, 10);
        assert_eq!(approx.intervals(10).unwrap().len(), 1024);
    }

    #[test]
    fn address_formatting() {
        assert_eq!(Address::parse("012").unwrap().to_string(), "012");
        assert_eq!(Address::root().to_string(), "ε");
        assert_eq!(Address::repeated(1, 3), Address::parse("111").unwrap());
        let a = Address::parse("0102").unwrap();
        let b = Address::parse("0110").unwrap();
        assert_eq!(a.common_prefix_len(&b), 2);
        assert_eq!(a.prefix(2), Address::parse("01").unwrap());
    }

    #[test]
    fn stride_identity() {
        // (m−1)·step_k + A_k = A_{k−1}.
        for approx in [thirds(), geo4()] {
            for k in 1..=approx.depth() {
                let lhs = q_int(approx.m() as i64 - 1) * approx.child_step(k).unwrap()
                    + approx.length(k).unwrap();
                assert_eq!(&lhs, approx.length(k - 1).unwrap());
            }
        }
    }

    #[test]
    fn random_spec_depths_are_exact() {
        let spec = RatioSpec::random(2, 7).unwrap();
        let approx = CantorApprox::new(spec, 16);
        assert_eq!(approx.exact_depth(), 16);
        let len = approx.length(16).unwrap();
        assert!(to_f64_approx(len) > 0.0);
        assert!(len.is_positive());
    }
}
