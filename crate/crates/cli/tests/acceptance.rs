//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! Correctness assertions always run. Wall-clock limits are asserted in
//! optimized builds (`cargo test --release -p thinset-cli --test acceptance`)
//! and reported as advisory in debug builds, where interpreter-grade
//! big-integer arithmetic can be an order of magnitude slower.

use std::time::{Duration, Instant};

use num_traits::Signed;
use rand_core::{RngCore, SeedableRng};

use thinset_core::assembly::{
    additional_property_witness, build_planar_packing, product_hnup_witness,
    verify_packing_separation, PackingOutcome, PackingPoint, PackingWitnessKind, RhoSequence,
};
use thinset_core::capacity::{endpoint_diameter_seq, series_capacity_bound, MuTable};
use thinset_core::dimension::{dim_estimate_seq, log_length_sequence};
use thinset_core::fix128::ln_ratio;
use thinset_core::perfectness::{hnup_witness, max_separating_ratio_bruteforce};
use thinset_core::rational::{q_int, q_ratio, Q};
use thinset_core::{Address, CantorApprox, RatioSpec};

const LOG2_OVER_LOG3: f64 = 0.630_929_753_571_457_4;
const RANDOM_LIMIT: f64 = 0.330_288_345_447_482_9; // log 2 / (log 3 + 1)
const EXPECTED_MEAN_LOG: f64 = -2.098_612_288_668_109_7; // −(log 3 + 1)
const MINUS_FIVE_LOG2: f64 = -3.465_735_902_799_726_5;
const LOG_P2_DEPTH1: f64 = -8.082_200_095_406_577; // 2·ln(9/512)
const RHS_DEPTH1: f64 = -11.624_480_459_457_215; // 4·(2 ln(1/2) + ln(7/32))
const SUP_DIM_LOWER_M5: f64 = 1.796_488_803_407_854_3; // 2·log 5 / log 6

fn enforce_runtime(name: &str, elapsed: Duration, limit: Duration) {
    println!("  [{name}] elapsed {elapsed:?} (limit {limit:?})");
    if cfg!(debug_assertions) {
        if elapsed > limit {
            eprintln!("  [{name}] over budget in debug build; limit asserted in release");
        }
    } else {
        assert!(
            elapsed <= limit,
            "{name}: {elapsed:?} exceeds the {limit:?} budget"
        );
    }
}

fn random_addresses(count: usize, depth: usize, m: u32, seed: u64) -> Vec<Address> {
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            Address::from_digits(
                (0..depth)
                    .map(|_| rng.next_u32() % m)
                    .collect::<Vec<_>>(),
            )
        })
        .collect()
}

#[test]
fn criterion_01_dimension_closed_forms() {
    let start = Instant::now();
    let sparse = RatioSpec::sparse_power(2, q_ratio(1, 3)).unwrap();
    let est = dim_estimate_seq(&sparse, 4096);
    let rel = ((est.liminf_estimate - LOG2_OVER_LOG3) / LOG2_OVER_LOG3).abs();
    assert!(
        rel < 0.02,
        "sparse liminf {} is {rel:.4} from log2/log3",
        est.liminf_estimate
    );

    let constant = RatioSpec::constant(2, q_ratio(1, 3)).unwrap();
    let est_c = dim_estimate_seq(&constant, 4096);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in &est_c.samples {
        lo = lo.min(s.value);
        hi = hi.max(s.value);
    }
    assert!(
        (hi - lo) / lo.abs() < 1e-12,
        "constant-spec estimator drifts: [{lo}, {hi}]"
    );
    assert!(((lo - LOG2_OVER_LOG3) / LOG2_OVER_LOG3).abs() < 1e-12);

    enforce_runtime("criterion 1", start.elapsed(), Duration::from_secs(1));
    println!(
        "criterion 1: PASS — sparse liminf {:.6} within 2% of {LOG2_OVER_LOG3:.6}; constant flat to 1e-12",
        est.liminf_estimate
    );
}

#[test]
fn criterion_02_dimension_zero_example() {
    let start = Instant::now();
    let spec = RatioSpec::geometric_power(2, q_ratio(1, 4)).unwrap();
    let est_200 = dim_estimate_seq(&spec, 200).liminf_estimate;
    let est_400 = dim_estimate_seq(&spec, 400).liminf_estimate;
    assert!(est_200 <= 0.01, "estimate at 200 is {est_200}");
    assert!(est_400 <= 0.005, "estimate at 400 is {est_400}");
    enforce_runtime("criterion 2", start.elapsed(), Duration::from_secs(1));
    println!("criterion 2: PASS — estimates {est_200:.6} ≤ 0.01 at k=200, {est_400:.6} ≤ 0.005 at k=400");
}

#[test]
fn criterion_03_capacity_series() {
    let start = Instant::now();
    let spec = RatioSpec::geometric_power(2, q_ratio(1, 4)).unwrap();
    let bound = series_capacity_bound(&spec, 1e-12).unwrap();
    assert!(bound.converged && bound.terms_used <= 60);
    let last = bound.partial_sums.last().unwrap().1;
    assert!(
        (last - MINUS_FIVE_LOG2).abs() < 1e-9,
        "partial sum {last} vs −5·log 2"
    );
    assert!((bound.limit.to_f64() - MINUS_FIVE_LOG2).abs() < 1e-12);
    assert_eq!(bound.cap_lower_bound, q_ratio(1, 32));
    enforce_runtime("criterion 3", start.elapsed(), Duration::from_millis(100));
    println!(
        "criterion 3: PASS — series at −5·log2 within 1e-9 by ℓ={}, Cap ≥ 1/32",
        bound.terms_used
    );
}

#[test]
fn criterion_04_structural_inequality() {
    let start = Instant::now();
    let spec = RatioSpec::geometric_power(2, q_ratio(1, 4)).unwrap();
    let approx = CantorApprox::new(spec, 9);
    let seq = endpoint_diameter_seq(&approx, 8).unwrap();
    for d in &seq {
        assert_eq!(
            d.structural_holds,
            Some(true),
            "inequality fails at depth {}",
            d.depth
        );
    }
    let k1 = &seq[1];
    let log_p2 = k1.config.log_p.to_f64() * 2.0;
    let rhs = k1.structural_rhs.unwrap().to_f64();
    assert!((log_p2 - LOG_P2_DEPTH1).abs() < 1e-9, "log P² at k=1: {log_p2}");
    assert!((rhs - RHS_DEPTH1).abs() < 1e-9, "RHS at k=1: {rhs}");
    assert!(log_p2 >= rhs);
    enforce_runtime("criterion 4", start.elapsed(), Duration::from_secs(5));
    println!(
        "criterion 4: PASS — log P² ≥ ring-gap bound at every k ≤ 8 (k=1: {log_p2:.4} ≥ {rhs:.4})"
    );
}

#[test]
fn criterion_05_up_bound_attainment() {
    let start = Instant::now();
    let spec = RatioSpec::constant(2, q_ratio(1, 3)).unwrap();
    let approx = CantorApprox::new(spec, 10);
    for k in 3..=10u64 {
        let best = max_separating_ratio_bruteforce(&approx, k).unwrap();
        assert_eq!(
            best.ratio,
            q_int(3),
            "max verified ratio at depth {k} is {}",
            best.ratio
        );
    }
    enforce_runtime("criterion 5", start.elapsed(), Duration::from_secs(10));
    println!("criterion 5: PASS — brute-force max separating ratio is exactly 3 at depths 3–10");
}

#[test]
fn criterion_06_hnup_witnesses() {
    let start = Instant::now();
    let spec = RatioSpec::sparse_power(2, q_ratio(1, 3)).unwrap();
    let approx = CantorApprox::new(spec, 8);
    for point in random_addresses(10, 8, 2, 0xA11CE) {
        let w15 = hnup_witness(&approx, &point, &q_int(15), 8).unwrap();
        let w15 = w15.found().expect("ratio-15 witness");
        assert_eq!((w15.depth, w15.achieved_ratio.clone()), (4, q_int(15)));
        let w51 = hnup_witness(&approx, &point, &q_int(51), 8).unwrap();
        let w51 = w51.found().expect("ratio-51 witness");
        assert_eq!((w51.depth, w51.achieved_ratio.clone()), (8, q_int(51)));

        // Planar product witness: ratio 51/√2 ≥ 30.
        let w = product_hnup_witness(&approx, &point, &point, &q_int(30), 8).unwrap();
        let w = w.found().expect("product witness");
        assert_eq!(w.ratio_sq, q_ratio(51 * 51, 2));
        assert!(w.ratio_sq >= q_int(30 * 30));
    }
    enforce_runtime("criterion 6", start.elapsed(), Duration::from_secs(5));
    println!(
        "criterion 6: PASS — verified annuli of ratio 15 (k=4) and 51 (k=8) at 10 sampled points; products reach 51/√2"
    );
}

#[test]
fn criterion_07_random_sequence_theorem() {
    let start = Instant::now();
    let depth = 5000u64;
    let mut means = Vec::new();
    let mut estimates = Vec::new();
    let ln2 = ln_ratio(&2u32.into(), &1u32.into()).to_f64();
    for seed in 1..=100u64 {
        let spec = RatioSpec::random(2, seed).unwrap();
        let logs = log_length_sequence(&spec, depth);
        means.push(logs[depth as usize].to_f64() / depth as f64);
        // Tail-window (quarter) minimum of s_k, straight off the log sums.
        let mut liminf = f64::INFINITY;
        for k in (depth - depth / 4 + 1)..=depth {
            let s = (k as f64) * ln2 / -logs[k as usize].to_f64();
            liminf = liminf.min(s);
        }
        estimates.push(liminf);
    }
    let n = means.len() as f64;
    let mean: f64 = means.iter().sum::<f64>() / n;
    let var: f64 = means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (n - 1.0);
    let se = (var / n).sqrt();
    assert!(
        (mean - EXPECTED_MEAN_LOG).abs() <= 3.0 * se,
        "mean {mean} vs {EXPECTED_MEAN_LOG} (3·SE = {})",
        3.0 * se
    );
    for (i, est) in estimates.iter().enumerate() {
        let rel = ((est - RANDOM_LIMIT) / RANDOM_LIMIT).abs();
        assert!(rel < 0.05, "seed {} estimate {est} off by {rel:.4}", i + 1);
    }
    enforce_runtime("criterion 7", start.elapsed(), Duration::from_secs(10));
    println!(
        "criterion 7: PASS — mean log-ratio {mean:.6} within 3·SE ({:.2e}) of −(log3+1); 100 estimates within 5% of {RANDOM_LIMIT:.4}",
        3.0 * se
    );
}

#[test]
fn criterion_08_mu_census_and_bracket() {
    let spec = RatioSpec::geometric_power(2, q_ratio(1, 4)).unwrap();
    let approx = CantorApprox::new(spec, 9);
    for k in 1..=8u64 {
        let set = approx.endpoints(k).unwrap();
        let table = MuTable::new(k, 2);
        for i in 0..set.len() {
            let counts = table.census(i, set.len());
            for l in 0..=k {
                assert_eq!(
                    counts[l as usize],
                    1u64 << (k - l),
                    "census at endpoint {i}, depth {k}, level {l}"
                );
            }
        }
        for i in 0..set.len() {
            for j in i + 1..set.len() {
                let l = table.pair(i, j);
                let d = (&set.points[i] - &set.points[j]).abs();
                assert!(&d >= approx.gap(l + 1).unwrap());
                assert!(&d <= approx.length(l).unwrap());
            }
        }
    }
    println!("criterion 8: PASS — μ census 2^(k−ℓ) and distance bracket exact for all pairs, k ≤ 8");
}

#[test]
fn criterion_09_assembly() {
    let start = Instant::now();
    let set = build_planar_packing(5, |_| 8, RhoSequence).unwrap();
    assert!(verify_packing_separation(&set), "odd rings must be empty");

    // Dimension bounds per component; sup of the lower bounds at m = 5.
    let reports = set.component_reports();
    assert_eq!(reports.len(), 4);
    let sup = reports
        .iter()
        .map(|r| r.dim_lower)
        .fold(f64::NEG_INFINITY, f64::max);
    assert!((sup - SUP_DIM_LOWER_M5).abs() < 1e-9, "sup {sup}");
    for r in &reports {
        assert!(r.dim_upper < 2.0);
    }

    let target = q_int(100);
    let origin = additional_property_witness(&set, &PackingPoint::Origin, &target, 64).unwrap();
    let origin = origin.found().expect("origin ring witness");
    assert_eq!(origin.kind, PackingWitnessKind::OriginRing { ring: 9 });
    assert!(origin.ratio_sq() >= q_int(100 * 100));

    // Ten component points across m = 2..5.
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(0xB0B);
    for i in 0..10usize {
        let component = i % 4;
        let m = set.components[component].index_m().unwrap();
        let digits = |rng: &mut rand_chacha::ChaCha12Rng| {
            Address::from_digits((0..64).map(|_| rng.next_u32() % m).collect::<Vec<_>>())
        };
        let point = PackingPoint::Product {
            component,
            x: digits(&mut rng),
            y: digits(&mut rng),
        };
        let w = additional_property_witness(&set, &point, &target, 64).unwrap();
        match w {
            PackingOutcome::Found(w) => {
                assert!(
                    w.ratio_sq() >= q_int(100 * 100),
                    "component {component}: ratio² {} too small",
                    w.ratio_sq()
                );
            }
            PackingOutcome::NotFound { reason } => {
                panic!("component {component} point {i}: {reason}")
            }
        }
    }
    enforce_runtime("criterion 9", start.elapsed(), Duration::from_secs(30));
    println!(
        "criterion 9: PASS — packing exact-contained and separated; witnesses at M=100 for origin and 10 points; sup dim lower {sup:.4}"
    );
}

#[test]
fn criterion_10_table1_suite() {
    let out = tempfile::tempdir().unwrap();
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_thinset"))
        .args(["table1", "--out"])
        .arg(out.path())
        .status()
        .unwrap();
    assert!(status.success(), "table1 exit code {:?}", status.code());

    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.path().join("table1.json")).unwrap()).unwrap();
    let payload = &report["payload"];
    assert_eq!(payload["verified_at_depth"], 13);
    assert_eq!(payload["cited_not_computed"], 6);
    assert_eq!(payload["out_of_scope"], 1);
    assert_eq!(payload["trivial"], 5);
    assert_eq!(payload["all_passed"], true);
    let cells = payload["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 25);
    assert!(cells
        .iter()
        .all(|c| c["passed"].as_bool().unwrap_or(false)));
    println!("criterion 10: PASS — 13 cells verified-at-depth, 6 cited, 1 out-of-scope, diagonal trivial, exit 0");
}

#[test]
fn headline_limit_trends() {
    // The headline properties of the infinite sets are limit statements;
    // check their finite monotone surrogates: dimension lower bounds rise
    // toward 2 with the packing size, and sparse-power witness moduli grow
    // without bound along k = 2^n.
    let mut prev = 0.0;
    for m_max in [2u32, 3, 5, 7] {
        let set = build_planar_packing(m_max, |_| 2, RhoSequence).unwrap();
        let sup = set
            .component_reports()
            .iter()
            .map(|r| r.dim_lower)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(sup > prev, "sup dim lower not increasing at m_max={m_max}");
        prev = sup;
    }
    assert!(prev > 1.85); // 2·log7/log8 ≈ 1.871, marching toward 2

    let spec = RatioSpec::sparse_power(2, q_ratio(1, 3)).unwrap();
    let approx = CantorApprox::new(spec, 64);
    let mut prev_ratio = Q::from_integer(0.into());
    for n in 1..=6u32 {
        let r = thinset_core::perfectness::canonical_ratio(&approx, 1 << n);
        assert!(r > prev_ratio);
        prev_ratio = r;
    }
    assert!(prev_ratio > q_int(1000)); // ratio 1457 at k = 64
    println!("headline trends: PASS — dimension sup grows toward 2; witness moduli unbounded along k = 2^n");
}
