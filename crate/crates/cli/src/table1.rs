//! The implication-table verification suite.
//!
//! Five thinness properties of a compact planar set — Hausdorff dimension
//! zero, logarithmic capacity zero, hereditary non uniform perfectness,
//! planar Lebesgue measure zero, porosity — give a 5×5 matrix of "does X
//! imply Y" cells. Thirteen of the twenty off-diagonal answers rest on
//! constructive counterexamples or direct arguments that a finite-depth
//! computation can witness; those run here and must pass. Six rest purely
//! on classical theorems and are reported as citations; one (positive-area
//! HNUP sets from badly-approximable numbers) is out of scope.

use serde_json::{json, Value};
use thinset_core::capacity::exact_small_transfinite;
use thinset_core::dimension::{closed_form_dim, dim_estimate_windowed, estimator_at};
use num_traits::Signed;
use thinset_core::perfectness::hnup_witness;
use thinset_core::plane::{Pt, Rect};
use thinset_core::porosity::{
    circle_family_ratio, empty_ball_search, line_porosity_constant, CircleFamily,
    DiscreteCircleFamily, LineSetTarget,
};
use thinset_core::rational::{format_ratio, q_int, q_ratio, Q};
use thinset_core::{Address, CantorApprox, RatioSpec};

use crate::commands::probe_json;
use crate::config::RunConfig;
use crate::report::{num_exact, num_log, Report};
use crate::CliError;

const PROPS: [&str; 5] = ["dim_H=0", "Cap=0", "HNUP", "m2=0", "porous"];

/// Desk-scale point count for the discrete-circle cells (recorded per cell).
const TABLE_CIRCLE_POINTS: u32 = 256;

#[derive(Clone, Debug)]
struct Cell {
    id: String,
    x: &'static str,
    y: &'static str,
    answer: &'static str,
    status: &'static str,
    passed: bool,
    detail: Value,
}

impl Cell {
    fn to_json(&self) -> Value {
        json!({
            "cell": self.id,
            "x": self.x,
            "y": self.y,
            "answer": self.answer,
            "status": self.status,
            "passed": self.passed,
            "detail": self.detail,
        })
    }
}

/// Run the whole suite; the boolean is the overall pass flag (every
/// constructive cell verified).
pub fn run_table1(cfg: &RunConfig) -> Result<(Report, bool), CliError> {
    let mut cells: Vec<Cell> = Vec::new();

    for p in PROPS {
        cells.push(Cell {
            id: format!("diag:{p}"),
            x: p,
            y: p,
            answer: "yes",
            status: "trivial",
            passed: true,
            detail: json!("X implies X"),
        });
    }

    let cite = |id: u8, x, y, answer, text: &str| Cell {
        id: id.to_string(),
        x,
        y,
        answer,
        status: "cited-not-computed",
        passed: true,
        detail: json!(text),
    };
    cells.push(cite(
        1,
        PROPS[1],
        PROPS[0],
        "yes",
        "Frostman's theorem: positive H^α-measure forces positive capacity, so zero capacity forces dimension zero",
    ));
    cells.push(cite(
        9,
        PROPS[0],
        PROPS[2],
        "yes",
        "uniformly perfect sets have positive Hausdorff dimension (Järvi–Vuorinen regularity), so dimension-zero sets have no uniformly perfect subset",
    ));
    cells.push(cite(
        10,
        PROPS[1],
        PROPS[2],
        "yes",
        "uniformly perfect sets have positive capacity (Pommerenke), so capacity-zero sets are HNUP",
    ));
    cells.push(cite(
        13,
        PROPS[0],
        PROPS[3],
        "yes",
        "dim < 2 forces m2 = (π/4)·H² = 0",
    ));
    cells.push(cite(
        14,
        PROPS[1],
        PROPS[3],
        "yes",
        "Cap E ≥ sqrt(m2(E)/πe), so zero capacity forces zero area",
    ));
    cells.push(cite(
        16,
        PROPS[4],
        PROPS[3],
        "yes",
        "the Lebesgue density theorem caps the density of a porous set below 1, forcing zero area",
    ));
    cells.push(Cell {
        id: "15".into(),
        x: PROPS[2],
        y: PROPS[3],
        answer: "no",
        status: "out-of-scope",
        passed: true,
        detail: json!(
            "positive-measure HNUP sets come from well-approximable numbers; not computed here"
        ),
    });

    cells.push(cell_2(cfg)?);
    cells.push(cell_3()?);
    cells.push(cell_4(cfg)?);
    cells.push(cell_5()?);
    cells.push(cell_6()?);
    cells.push(cell_7()?);
    cells.push(cell_8(cfg)?);
    cells.push(cell_11()?);
    cells.push(cell_12(cfg)?);
    let (c17, c18, c19) = cells_17_18_19(cfg)?;
    cells.push(c17);
    cells.push(c18);
    cells.push(c19);
    cells.push(cell_20(cfg)?);

    cells.sort_by(|a, b| {
        let key = |c: &Cell| {
            c.id
                .parse::<u8>()
                .map(|n| (0u8, n))
                .unwrap_or((1, 0))
        };
        key(a).cmp(&key(b)).then_with(|| a.id.cmp(&b.id))
    });

    let all_ok = cells.iter().all(|c| c.passed);
    let verified = cells
        .iter()
        .filter(|c| c.status == "verified-at-depth")
        .count();
    let payload = json!({
        "properties": PROPS,
        "cells": cells.iter().map(Cell::to_json).collect::<Vec<_>>(),
        "verified_at_depth": verified,
        "cited_not_computed": cells.iter().filter(|c| c.status == "cited-not-computed").count(),
        "out_of_scope": cells.iter().filter(|c| c.status == "out-of-scope").count(),
        "trivial": cells.iter().filter(|c| c.status == "trivial").count(),
        "all_passed": all_ok,
    });
    Ok((Report::new("table1", cfg, payload), all_ok))
}

fn sparse_thirds(depth: u64) -> CantorApprox {
    CantorApprox::new(
        RatioSpec::sparse_power(2, q_ratio(1, 3)).unwrap(),
        depth,
    )
}

fn geometric_quarter(depth: u64) -> CantorApprox {
    CantorApprox::new(
        RatioSpec::geometric_power(2, q_ratio(1, 4)).unwrap(),
        depth,
    )
}

/// HNUP does not imply dimension zero: the sparse-power set is HNUP with
/// dimension log 2 / log 3.
fn cell_2(_cfg: &RunConfig) -> Result<Cell, CliError> {
    let approx = sparse_thirds(8);
    let point = Address::from_digits((0..8).map(|i| i % 2).collect());
    let witness = hnup_witness(&approx, &point, &q_int(10), 8)?;
    let spec = approx.spec();
    let cf = closed_form_dim(spec).map_err(CliError::from)?.value();
    let est = dim_estimate_windowed(spec, 4096, 1024).liminf_estimate;
    let witness_ok = witness.found().map(|w| w.depth == 4).unwrap_or(false);
    let dim_ok = est > 0.5 && ((est - cf) / cf).abs() < 0.02;
    Ok(Cell {
        id: "2".into(),
        x: PROPS[2],
        y: PROPS[0],
        answer: "no",
        status: "verified-at-depth",
        passed: witness_ok && dim_ok,
        detail: json!({
            "set": "sparse-power a=1/3 m=2",
            "hnup_witness_ratio": witness.found().map(|w| num_exact(&w.achieved_ratio)),
            "dim_estimate": num_log(est),
            "dim_closed_form": num_log(cf),
        }),
    })
}

/// Zero area does not imply dimension zero: the middle-thirds set.
fn cell_3() -> Result<Cell, CliError> {
    let spec = RatioSpec::constant(2, q_ratio(1, 3)).map_err(CliError::from)?;
    let est = dim_estimate_windowed(&spec, 64, 32);
    let cf = closed_form_dim(&spec).map_err(CliError::from)?.value();
    let flat = est
        .samples
        .iter()
        .all(|s| ((s.value - cf) / cf).abs() < 1e-12);
    let in_range = cf > 0.0 && cf < 2.0;
    Ok(Cell {
        id: "3".into(),
        x: PROPS[3],
        y: PROPS[0],
        answer: "no",
        status: "verified-at-depth",
        passed: flat && in_range,
        detail: json!({
            "set": "middle thirds",
            "dim": num_log(cf),
            "note": "0 < dim < 2, so m2 = (π/4)·H² = 0 while dim > 0",
        }),
    })
}

/// Porosity does not imply dimension zero: the middle-thirds set is porous
/// (subset of a line) with positive dimension.
fn cell_4(cfg: &RunConfig) -> Result<Cell, CliError> {
    let approx = CantorApprox::new(RatioSpec::constant(2, q_ratio(1, 3)).unwrap(), 8);
    let target = LineSetTarget::from_approx(&approx, 8)?;
    let res = cfg.resolution.max(8);
    let mut probes = Vec::new();
    let mut all_half = true;
    for iv in approx.intervals(3)?.iter().take(3) {
        let probe = empty_ball_search(
            &target,
            &Pt::on_line(iv.midpoint()),
            &(approx.gap(3)? / q_int(2)),
            res,
        )?;
        all_half &= probe.ratio >= q_ratio(1, 2) - q_ratio(2, res as i64);
        probes.push(probe_json(&probe));
    }
    let est = estimator_at(approx.spec(), 64);
    Ok(Cell {
        id: "4".into(),
        x: PROPS[4],
        y: PROPS[0],
        answer: "no",
        status: "verified-at-depth",
        passed: all_half && est > 0.5,
        detail: json!({
            "set": "middle thirds in the plane",
            "perpendicular_ball_probes": probes,
            "dim_estimate": num_log(est),
        }),
    })
}

/// Dimension zero does not imply capacity zero: the geometric-power set.
fn cell_5() -> Result<Cell, CliError> {
    let spec = RatioSpec::geometric_power(2, q_ratio(1, 4)).map_err(CliError::from)?;
    let est200 = estimator_at(&spec, 200);
    let series =
        thinset_core::capacity::series_capacity_bound(&spec, 1e-12).map_err(CliError::from)?;
    let passed = est200 <= 0.01 && series.cap_lower_bound == q_ratio(1, 32);
    Ok(Cell {
        id: "5".into(),
        x: PROPS[0],
        y: PROPS[1],
        answer: "no",
        status: "verified-at-depth",
        passed,
        detail: json!({
            "set": "geometric-power a=1/4 m=2",
            "dim_estimate_at_200": num_log(est200),
            "cap_lower_bound": num_exact(&series.cap_lower_bound),
        }),
    })
}

/// HNUP does not imply capacity zero: same geometric-power set.
fn cell_6() -> Result<Cell, CliError> {
    let approx = geometric_quarter(3);
    let point = Address::repeated(0, 3);
    let witness = hnup_witness(&approx, &point, &q_int(10), 3)?;
    let series = thinset_core::capacity::series_capacity_bound(approx.spec(), 1e-12)
        .map_err(CliError::from)?;
    let witness_ok = witness
        .found()
        .map(|w| w.achieved_ratio == q_int(29))
        .unwrap_or(false);
    Ok(Cell {
        id: "6".into(),
        x: PROPS[2],
        y: PROPS[1],
        answer: "no",
        status: "verified-at-depth",
        passed: witness_ok && series.cap_lower_bound.is_positive(),
        detail: json!({
            "set": "geometric-power a=1/4 m=2",
            "hnup_witness_depth": witness.found().map(|w| w.depth),
            "cap_lower_bound": num_exact(&series.cap_lower_bound),
        }),
    })
}

/// Zero area does not imply capacity zero: the unit segment. Its capacity
/// dominates the certified bound of the geometric-power subset, and the
/// small-n transfinite diameters stay above the classical value 1/4.
fn cell_7() -> Result<Cell, CliError> {
    let spec = RatioSpec::geometric_power(2, q_ratio(1, 4)).map_err(CliError::from)?;
    let series =
        thinset_core::capacity::series_capacity_bound(&spec, 1e-12).map_err(CliError::from)?;
    let grid: Vec<Q> = (0..=8).map(|i| q_ratio(i, 8)).collect();
    let mut prev = f64::INFINITY;
    let mut dvals = Vec::new();
    let mut ok = true;
    for n in 2..=6usize {
        let d = exact_small_transfinite(&grid, n).map_err(CliError::from)?;
        ok &= d.log_d <= prev + 1e-12 && d.log_d >= 0.25f64.ln() - 1e-12;
        prev = d.log_d;
        dvals.push(json!([n, num_log(d.log_d)]));
    }
    Ok(Cell {
        id: "7".into(),
        x: PROPS[3],
        y: PROPS[1],
        answer: "no",
        status: "verified-at-depth",
        passed: ok && series.cap_lower_bound.is_positive(),
        detail: json!({
            "set": "unit segment [0,1]",
            "cap_lower_bound_via_subset": num_exact(&series.cap_lower_bound),
            "note": "segment contains the geometric-power set; capacity is monotone; classical value is 1/4",
            "grid_log_transfinite": dvals,
        }),
    })
}

/// Porosity does not imply capacity zero: the unit segment again (porous
/// with constant 1/2 as a line subset).
fn cell_8(cfg: &RunConfig) -> Result<Cell, CliError> {
    let target = LineSetTarget::segment(q_int(0), q_int(1));
    let res = cfg.resolution.max(8);
    let mut ok = true;
    let mut probes = Vec::new();
    for (c, r) in [
        (q_ratio(1, 2), q_ratio(1, 2)),
        (q_ratio(1, 3), q_ratio(1, 4)),
        (q_ratio(7, 10), q_ratio(1, 5)),
    ] {
        let probe = empty_ball_search(&target, &Pt::on_line(c), &r, res)?;
        ok &= probe.ratio >= q_ratio(1, 2) - q_ratio(2, res as i64);
        probes.push(probe_json(&probe));
    }
    let spec = RatioSpec::geometric_power(2, q_ratio(1, 4)).map_err(CliError::from)?;
    let series =
        thinset_core::capacity::series_capacity_bound(&spec, 1e-12).map_err(CliError::from)?;
    Ok(Cell {
        id: "8".into(),
        x: PROPS[4],
        y: PROPS[1],
        answer: "no",
        status: "verified-at-depth",
        passed: ok && series.cap_lower_bound.is_positive(),
        detail: json!({
            "set": "unit segment [0,1]",
            "porosity_probes": probes,
            "line_constant": num_exact(&line_porosity_constant()),
            "cap_lower_bound_via_subset": num_exact(&series.cap_lower_bound),
        }),
    })
}

/// No annulus separates the unit segment: every candidate ring either meets
/// the segment or leaves one complement component empty of segment points.
fn segment_admits_no_separator(candidates: &[(Q, Q, Q)]) -> (bool, Vec<Value>) {
    let seg = Rect::segment(q_int(0), q_int(1));
    let mut rows = Vec::new();
    let mut none = true;
    for (c, r, big_r) in candidates {
        let center = Pt::on_line(c.clone());
        let (r_sq, big_r_sq) = (r * r, big_r * big_r);
        let meets = seg.meets_open_annulus(&center, &r_sq, &big_r_sq);
        // Segment distance range from the center.
        let dmin = seg.dist_sq_min(&center);
        let dmax = seg.dist_sq_max(&center);
        let inner = dmin <= r_sq;
        let outer = dmax >= big_r_sq;
        let separates = !meets && inner && outer;
        none &= !separates;
        rows.push(json!({
            "center": format_ratio(c),
            "r": format_ratio(r),
            "R": format_ratio(big_r),
            "separates": separates,
        }));
    }
    (none, rows)
}

fn separation_candidates() -> Vec<(Q, Q, Q)> {
    let mut out = Vec::new();
    for i in 0..=8i64 {
        out.push((q_ratio(i, 8), q_ratio(1, 16), q_ratio(1, 8)));
        out.push((q_ratio(i, 8), q_ratio(1, 8), q_ratio(3, 8)));
        out.push((q_ratio(i, 8), q_ratio(1, 100), q_ratio(1, 10)));
    }
    out
}

/// Zero area does not imply HNUP: the segment is uniformly perfect
/// (connected), with zero area.
fn cell_11() -> Result<Cell, CliError> {
    let (none, rows) = segment_admits_no_separator(&separation_candidates());
    Ok(Cell {
        id: "11".into(),
        x: PROPS[3],
        y: PROPS[2],
        answer: "no",
        status: "verified-at-depth",
        passed: none,
        detail: json!({
            "set": "unit segment [0,1]",
            "note": "connected sets admit no separating annulus; every candidate fails",
            "candidates": rows,
        }),
    })
}

/// Porosity does not imply HNUP: the segment is porous yet uniformly
/// perfect.
fn cell_12(cfg: &RunConfig) -> Result<Cell, CliError> {
    let (none, _) = segment_admits_no_separator(&separation_candidates());
    let target = LineSetTarget::segment(q_int(0), q_int(1));
    let probe = empty_ball_search(
        &target,
        &Pt::on_line(q_ratio(1, 2)),
        &q_ratio(1, 2),
        cfg.resolution.max(8),
    )?;
    Ok(Cell {
        id: "12".into(),
        x: PROPS[4],
        y: PROPS[2],
        answer: "no",
        status: "verified-at-depth",
        passed: none && probe.ratio == q_ratio(1, 2),
        detail: json!({
            "set": "unit segment [0,1]",
            "porosity_constant": num_exact(&line_porosity_constant()),
            "probe": probe_json(&probe),
        }),
    })
}

/// The discrete-circle set: countable (dimension zero, capacity zero, and
/// HNUP — uniformly perfect sets are uncountable) yet not porous at the
/// origin, witnessed by the decaying empty-ball ratios.
fn cells_17_18_19(cfg: &RunConfig) -> Result<(Cell, Cell, Cell), CliError> {
    let fam = DiscreteCircleFamily::new(6, TABLE_CIRCLE_POINTS);
    let res = cfg.resolution.clamp(8, 16);
    let mut probes = Vec::new();
    let mut decay_ok = true;
    let mut prev = q_int(2);
    for n in 1..=2u64 {
        let probe = empty_ball_search(&fam, &Pt::origin(), &q_ratio(1, n as i64), res)?;
        let want = circle_family_ratio(n);
        let chord = q_ratio(8, TABLE_CIRCLE_POINTS as i64);
        decay_ok &= probe.ratio <= &want + &chord;
        decay_ok &= probe.ratio >= &want - q_ratio(2, res as i64);
        decay_ok &= probe.ratio < prev;
        prev = probe.ratio.clone();
        probes.push(probe_json(&probe));
    }
    let detail = |x_fact: &str| {
        json!({
            "set": format!("discrete circles, {TABLE_CIRCLE_POINTS} points per circle, radii 1/n for n ≤ 6"),
            "x_side": x_fact,
            "empty_ball_probes": probes,
            "expected_decay": (1..=3u64).map(|n| num_exact(&circle_family_ratio(n))).collect::<Vec<_>>(),
        })
    };
    let mk = |id: u8, x_idx: usize, fact: &str| Cell {
        id: id.to_string(),
        x: PROPS[x_idx],
        y: PROPS[4],
        answer: "no",
        status: "verified-at-depth",
        passed: decay_ok,
        detail: detail(fact),
    };
    Ok((
        mk(17, 0, "finite truncation of a countable set: dimension zero"),
        mk(18, 1, "countable sets have capacity zero"),
        mk(
            19,
            2,
            "countable compact sets are HNUP (uniformly perfect sets are uncountable)",
        ),
    ))
}

/// Zero area does not imply porosity: the full circle family fails porosity
/// at the origin with exactly the closed-form ratio decay.
fn cell_20(cfg: &RunConfig) -> Result<Cell, CliError> {
    let fam = CircleFamily::new(12);
    let res = cfg.resolution.max(8);
    let probe = empty_ball_search(&fam, &Pt::origin(), &q_int(1), res)?;
    let exact_ok = probe.ratio == q_ratio(1, 4);
    let mut decay = Vec::new();
    let mut decreasing = true;
    let mut prev = q_int(1);
    for n in 1..=4u64 {
        let r = circle_family_ratio(n);
        decreasing &= r < prev;
        prev = r.clone();
        decay.push(json!([n, format_ratio(&r)]));
    }
    Ok(Cell {
        id: "20".into(),
        x: PROPS[3],
        y: PROPS[4],
        answer: "no",
        status: "verified-at-depth",
        passed: exact_ok && decreasing,
        detail: json!({
            "set": "circles of radius 1/n plus the origin",
            "probe_at_unit": probe_json(&probe),
            "ratio_decay": decay,
            "note": "circles have zero area; the ratio 1/(2(n+1)) → 0 kills porosity at 0",
        }),
    })
}
