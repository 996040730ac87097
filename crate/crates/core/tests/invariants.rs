//! Property suites over randomized specs, plus brute-force oracles for the
//! pruned geometric searches.

use num_traits::{Signed, Zero};
use proptest::prelude::*;

use thinset_core::capacity::{exact_small_transfinite, greedy_fekete, log_pair_product, MuTable};
use thinset_core::cantor::Location;
use thinset_core::dimension::{box_count_line, dim_estimate_seq, sparse_power_log_len_bounds};
use thinset_core::fix128::ln_rational;
use thinset_core::perfectness::{canonical_annulus, canonical_ratio, is_separating};
use thinset_core::plane::{Pt, Rect};
use thinset_core::rational::{q_int, q_ratio};
use thinset_core::{Address, CantorApprox, Q, RatioSpec, RatioVariant};

fn small_ratio(m: u32) -> impl Strategy<Value = Q> {
    // Rationals p/q ≤ 1/(m+1) with small numerators and denominators.
    (1i64..=6, 2i64..=40).prop_filter_map("within (0, 1/(m+1)]", move |(p, q)| {
        let r = q_ratio(p, q);
        (r <= q_ratio(1, m as i64 + 1)).then_some(r)
    })
}

fn arb_spec() -> impl Strategy<Value = RatioSpec> {
    (2u32..=4).prop_flat_map(|m| {
        prop_oneof![
            small_ratio(m).prop_map(move |a| RatioSpec::constant(m, a).unwrap()),
            small_ratio(m).prop_map(move |a| RatioSpec::sparse_power(m, a).unwrap()),
            small_ratio(m).prop_map(move |a| RatioSpec::geometric_power(m, a).unwrap()),
            proptest::collection::vec(small_ratio(m), 1..6)
                .prop_map(move |rs| RatioSpec::explicit(m, rs).unwrap()),
            any::<u64>().prop_map(move |seed| RatioSpec::random(m, seed).unwrap()),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gap_identity_and_floor(spec in arb_spec(), depth in 1u64..6) {
        let approx = CantorApprox::new(spec, depth);
        let m = q_int(approx.m() as i64);
        let m1 = q_int(approx.m() as i64 - 1);
        for k in 1..=depth {
            // (m−1)·e_k = A_{k−1} − m·A_k, exactly.
            let lhs = &m1 * approx.gap(k).unwrap();
            let rhs = approx.length(k - 1).unwrap() - &m * approx.length(k).unwrap();
            prop_assert_eq!(lhs, rhs);
            // e_k ≥ B·A_{k−1}/(m−1).
            let floor = approx.spec().gap_floor() * approx.length(k - 1).unwrap() / &m1;
            prop_assert!(approx.gap(k).unwrap() >= &floor);
            // Gaps strictly decrease.
            if k > 1 {
                prop_assert!(approx.gap(k).unwrap() < approx.gap(k - 1).unwrap());
            }
        }
    }

    #[test]
    fn endpoints_nest_and_count(spec in arb_spec(), depth in 1u64..5) {
        let approx = CantorApprox::new(spec, depth);
        let m = approx.m() as u64;
        let mut prev: Option<Vec<Q>> = None;
        for k in 0..=depth {
            let set = approx.endpoints(k).unwrap();
            prop_assert_eq!(set.len() as u64, 2 * m.pow(k as u32));
            prop_assert!(set.points.windows(2).all(|w| w[0] < w[1]));
            if let Some(prev_pts) = &prev {
                for p in prev_pts {
                    prop_assert!(set.points.binary_search(p).is_ok());
                }
            }
            prev = Some(set.points);
        }
    }

    #[test]
    fn locate_matches_enumeration(spec in arb_spec(), depth in 1u64..5, num in 0i64..=96) {
        let approx = CantorApprox::new(spec, depth);
        let x = q_ratio(num, 96);
        let intervals = approx.intervals(depth).unwrap();
        let hit = intervals.iter().find(|iv| iv.contains(&x));
        match approx.locate(&x, depth).unwrap() {
            Location::Inside(addr) => {
                prop_assert_eq!(&addr, &hit.expect("inside").address);
            }
            Location::Outside { gap_depth } => {
                prop_assert!(hit.is_none());
                prop_assert!(gap_depth >= 1 && gap_depth <= depth);
                // The point was still inside at the previous depth.
                if gap_depth > 1 {
                    prop_assert!(matches!(
                        approx.locate(&x, gap_depth - 1).unwrap(),
                        Location::Inside(_)
                    ));
                }
            }
        }
    }

    #[test]
    fn dual_representation_coherent(spec in arb_spec(), depth in 1u64..8) {
        let approx = CantorApprox::new(spec, depth);
        for k in 1..=depth {
            let tracked = approx.log_length(k);
            let direct = ln_rational(approx.length(k).unwrap());
            let diff = (tracked - direct).abs().to_f64();
            let denom = direct.to_f64().abs().max(1.0);
            prop_assert!(diff / denom < 1e-12);
        }
    }

    #[test]
    fn canonical_annuli_separate_and_match_formula(spec in arb_spec(), depth in 1u64..4) {
        let approx = CantorApprox::new(spec, depth);
        for iv in approx.intervals(depth).unwrap() {
            let ann = canonical_annulus(&approx, &iv.address).unwrap();
            // Ratio identity (A_k/2 + e_k)/(A_k/2) = 1 + 2(1/a_k − m)/(m−1).
            prop_assert_eq!(ann.ratio().unwrap(), canonical_ratio(&approx, depth));
            let verdict = is_separating(&ann, &approx, depth).unwrap();
            prop_assert!(verdict.separates && verdict.sound);
        }
    }

    #[test]
    fn separation_agrees_with_full_enumeration(
        spec in arb_spec(),
        depth in 1u64..4,
        cx_num in -4i64..=12,
        r_num in 1i64..=6,
        w_num in 1i64..=8,
    ) {
        // Arbitrary annuli on the line versus a brute-force check.
        let approx = CantorApprox::new(spec, depth);
        let c = q_ratio(cx_num, 8);
        let r = q_ratio(r_num, 12);
        let big_r = &r + q_ratio(w_num, 12);
        let ann = thinset_core::perfectness::Annulus::on_line(c.clone(), r.clone(), big_r.clone())
            .unwrap();
        let verdict = is_separating(&ann, &approx, depth).unwrap();

        // Oracle: enumerate intervals and endpoints.
        let intervals = approx.intervals(depth).unwrap();
        let endpoints = approx.endpoints(depth).unwrap();
        let center = Pt::on_line(c);
        let (r_sq, big_r_sq) = (&r * &r, &big_r * &big_r);
        let meets = intervals.iter().any(|iv| {
            Rect::segment(iv.left.clone(), iv.right()).meets_open_annulus(
                &center, &r_sq, &big_r_sq,
            )
        });
        let inner = endpoints
            .points
            .iter()
            .any(|p| Pt::on_line(p.clone()).dist_sq(&center) <= r_sq);
        let outer = endpoints
            .points
            .iter()
            .any(|p| Pt::on_line(p.clone()).dist_sq(&center) >= big_r_sq);
        prop_assert_eq!(verdict.separates, !meets && inner && outer);
    }

    #[test]
    fn mu_bracket_on_random_pairs(spec in arb_spec(), depth in 1u64..4, i in 0usize..32, j in 0usize..32) {
        let approx = CantorApprox::new(spec, depth + 1);
        let set = approx.endpoints(depth).unwrap();
        let (i, j) = (i % set.len(), j % set.len());
        if i != j {
            let table = MuTable::new(depth, approx.m());
            let l = table.pair(i, j);
            let d = (&set.points[i] - &set.points[j]).abs();
            prop_assert!(&d <= approx.length(l).unwrap());
            prop_assert!(&d >= approx.gap(l + 1).unwrap());
        }
    }

    #[test]
    fn box_counts_monotone_along_nested_scales(depth in 1u64..6, den in 2i64..=4) {
        // δ halving along a nested dyadic family never decreases the count.
        let spec = RatioSpec::constant(2, q_ratio(1, 3 * den)).unwrap();
        let approx = CantorApprox::new(spec, depth);
        let mut prev = 0u64;
        for p in 0..=6u32 {
            let delta = q_ratio(1, 1 << p);
            let c = box_count_line(&approx, depth, &delta).unwrap();
            prop_assert!(c.count >= prev);
            prev = c.count;
        }
    }

    #[test]
    fn greedy_never_beats_exhaustive(seed in 0u64..1000) {
        // Random small candidate sets on a common grid.
        let mut cands: Vec<Q> = Vec::new();
        let mut state = seed;
        while cands.len() < 7 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let v = q_ratio((state >> 33) as i64 % 97, 96);
            if !cands.contains(&v) {
                cands.push(v);
            }
        }
        for n in 2..=5usize {
            let g = greedy_fekete(&cands, n).unwrap();
            let gp = log_pair_product(&g).unwrap();
            let best = exact_small_transfinite(&cands, n).unwrap();
            prop_assert!(gp.log_d <= best.log_d + 1e-12);
        }
    }

    #[test]
    fn transfinite_monotone_on_random_sets(seed in 0u64..1000) {
        let mut cands: Vec<Q> = Vec::new();
        let mut state = seed.wrapping_add(17);
        while cands.len() < 8 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let v = q_ratio((state >> 33) as i64 % 193, 192);
            if !cands.contains(&v) {
                cands.push(v);
            }
        }
        let mut prev = f64::INFINITY;
        for n in 2..=6usize {
            let d = exact_small_transfinite(&cands, n).unwrap();
            prop_assert!(d.log_d <= prev + 1e-12, "D_n rose at n={}", n);
            prev = d.log_d;
        }
    }

    #[test]
    fn address_string_round_trip(digits in proptest::collection::vec(0u32..3, 0..10)) {
        let addr = Address::from_digits(digits.clone());
        if !digits.is_empty() {
            let s = format!("{addr}");
            prop_assert_eq!(Address::parse(&s).unwrap(), addr);
        } else {
            prop_assert!(addr.is_root());
        }
    }

    #[test]
    fn ratio_string_round_trip(p in -1000i64..1000, q in 1i64..1000) {
        let x = q_ratio(p, q);
        let s = thinset_core::rational::format_ratio(&x);
        prop_assert_eq!(thinset_core::rational::parse_ratio(&s).unwrap(), x);
    }
}

#[test]
fn sparse_power_bounds_bracket_through_4096() {
    let a = q_ratio(1, 3);
    let spec = RatioSpec::sparse_power(2, a.clone()).unwrap();
    let logs = thinset_core::dimension::log_length_sequence(&spec, 4096);
    for k in 2..=4096u64 {
        let (lo, hi) = sparse_power_log_len_bounds(&a, 2, k);
        let truth = logs[k as usize];
        assert!(lo < truth, "lower bound fails at k={k}");
        assert!(truth < hi, "upper bound fails at k={k}");
    }
    // Relative bound width shrinks at powers of two.
    let mut prev_width = f64::INFINITY;
    for n in [4u64, 6, 8, 10, 12] {
        let k = 1 << n;
        let (lo, hi) = sparse_power_log_len_bounds(&a, 2, k);
        let width = (hi - lo).to_f64().abs() / logs[k as usize].to_f64().abs();
        assert!(width < prev_width);
        prev_width = width;
    }
}

#[test]
fn sparse_witness_ratios_grow_along_powers_of_two() {
    let spec = RatioSpec::sparse_power(2, q_ratio(1, 3)).unwrap();
    let approx = CantorApprox::new(spec, 64);
    let mut prev = Q::zero();
    for n in 1..=6u32 {
        let k = 1u64 << n;
        let ratio = canonical_ratio(&approx, k);
        assert!(ratio > prev, "canonical ratio not increasing at k=2^{n}");
        prev = ratio;
    }
    assert_eq!(prev, q_int(1) + q_int(2) * (q_int(729) - q_int(2)));
}

#[test]
fn random_spec_strong_law_quick_check() {
    // Small version of the strong-law check: 12 seeds at depth 800.
    let mut means = Vec::new();
    for seed in 0..12u64 {
        let spec = RatioSpec::random(2, seed).unwrap();
        means.push(thinset_core::dimension::mean_log_ratio(&spec, 800));
    }
    let expect = -(3.0f64.ln() + 1.0);
    let mean: f64 = means.iter().sum::<f64>() / means.len() as f64;
    // Per-seed SD is about 1/√800 ≈ 0.035; twelve seeds tighten to ~0.01.
    assert!(
        (mean - expect).abs() < 0.05,
        "sample mean {mean} far from {expect}"
    );
}

#[test]
fn explicit_spec_geometry_matches_hand_rolled() {
    // Mixed explicit ratios: check interval geometry against direct algebra.
    let ratios = vec![q_ratio(1, 4), q_ratio(1, 5), q_ratio(1, 8)];
    let spec = RatioSpec::explicit(3, ratios).unwrap();
    let approx = CantorApprox::new(spec, 3);
    assert_eq!(approx.length(3).unwrap(), &q_ratio(1, 160));
    // e_1 = (1 − 3/4)/2 = 1/8; e_2 = (1/4)(1 − 3/5)/2 = 1/20.
    assert_eq!(approx.gap(1).unwrap(), &q_ratio(1, 8));
    assert_eq!(approx.gap(2).unwrap(), &q_ratio(1, 20));
    let est = dim_estimate_seq(approx.spec(), 3);
    assert!(est.closed_form.is_none());
}

#[test]
fn relaxed_spec_constructs_but_flags() {
    let spec = RatioSpec::new_relaxed(2, q_ratio(2, 5), RatioVariant::Constant).unwrap();
    assert!(spec.is_relaxed());
    let approx = CantorApprox::new(spec, 3);
    // Gap floor B = 1 − 2·(2/5) = 1/5 still positive; geometry stays exact,
    // and this particular relaxed schedule keeps its gaps shrinking.
    assert_eq!(approx.spec().gap_floor(), q_ratio(1, 5));
    for k in 1..=3 {
        assert!(approx.gap(k).unwrap().is_positive());
    }
    assert!(approx.gap_monotonicity_warnings().is_empty());

    // A relaxed schedule that actually grows a gap gets flagged, not
    // rejected: e_1 = 1 − 9/10 = 1/10, e_2 = (9/20)(1 − 1/10) = 81/200.
    let spec = RatioSpec::new_relaxed(
        2,
        q_ratio(9, 20),
        RatioVariant::Explicit(vec![q_ratio(9, 20), q_ratio(1, 20)]),
    )
    .unwrap();
    let approx = CantorApprox::new(spec, 2);
    assert!(approx.gap(2).unwrap() > approx.gap(1).unwrap());
    assert_eq!(approx.gap_monotonicity_warnings(), &[2]);
}
