//! `build` and `analyze` command implementations.

use std::path::PathBuf;

use serde_json::{json, Value};
use thinset_core::assembly::{
    additional_property_witness, build_planar_packing, verify_packing_separation, PackingOutcome,
    PackingPoint, PackingWitness, RhoSequence,
};
use thinset_core::capacity::{endpoint_diameter_seq, series_capacity_bound};
use thinset_core::dimension::{closed_form_dim, dim_estimate_windowed};
use thinset_core::perfectness::{
    canonical_ratio, hnup_witness, up_modulus_bound, Annulus, WitnessOutcome,
};
use thinset_core::plane::{Pt, Radius};
use thinset_core::porosity::{
    circle_family_ratio, empty_ball_search, line_porosity_constant, CircleFamily,
    DiscreteCircleFamily, LineSetTarget, PorosityProbe,
};
use thinset_core::rational::{format_ratio, q_int, q_ratio, Q};
use thinset_core::{Address, CantorApprox, RatioVariant};

use crate::config::RunConfig;
use crate::report::{num_exact, num_log, num_monte_carlo, write_atomic, write_report, Report};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnalysisKind {
    Dim,
    Cap,
    Up,
    Porosity,
    Assembly,
}

impl AnalysisKind {
    pub fn name(&self) -> &'static str {
        match self {
            AnalysisKind::Dim => "dim",
            AnalysisKind::Cap => "cap",
            AnalysisKind::Up => "up",
            AnalysisKind::Porosity => "porosity",
            AnalysisKind::Assembly => "assembly",
        }
    }

    pub fn parse(s: &str) -> Option<AnalysisKind> {
        match s {
            "dim" => Some(AnalysisKind::Dim),
            "cap" => Some(AnalysisKind::Cap),
            "up" => Some(AnalysisKind::Up),
            "porosity" => Some(AnalysisKind::Porosity),
            "assembly" => Some(AnalysisKind::Assembly),
            _ => None,
        }
    }
}

/// Serialize an approximation: intervals/endpoints CSV plus JSON metadata.
/// Depths past the exact budget degrade to address + log-length rows with
/// the exact columns left empty and a warning flag in the metadata.
pub fn cmd_build(cfg: &RunConfig) -> Result<(Report, Vec<PathBuf>), CliError> {
    let spec = cfg.spec()?;
    let depth = cfg.depth;
    let approx = CantorApprox::with_budget(spec, depth, cfg.budget_bits);
    let m = approx.m() as u64;
    let count = m
        .checked_pow(depth as u32)
        .filter(|&c| c <= thinset_core::ENUMERATION_LIMIT)
        .ok_or_else(|| CliError::Budget(format!("{m}^{depth} intervals")))?;
    let exact = approx.exact_depth() >= depth;
    let log_len = approx.log_length(depth).to_f64();

    let mut intervals_csv = String::from("address,left_num,left_den,len_num,len_den,log_len\n");
    let mut rows: Vec<Value> = Vec::new();
    let embed = count <= 4096;
    if exact {
        for iv in approx.intervals(depth)? {
            intervals_csv.push_str(&format!(
                "{},{},{},{},{},{:.16e}\n",
                iv.address,
                iv.left.numer(),
                iv.left.denom(),
                iv.length.numer(),
                iv.length.denom(),
                log_len,
            ));
            if embed {
                rows.push(json!({
                    "address": iv.address.to_string(),
                    "left": format_ratio(&iv.left),
                    "length": format_ratio(&iv.length),
                }));
            }
        }
    } else {
        // Log-space only: addresses still enumerate without geometry.
        let mut digits = vec![0u32; depth as usize];
        loop {
            let addr = Address::from_digits(digits.clone());
            intervals_csv.push_str(&format!("{addr},,,,,{log_len:.16e}\n"));
            if embed {
                rows.push(json!({"address": addr.to_string()}));
            }
            let mut pos = depth as usize;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                if (digits[pos] as u64) + 1 < m {
                    digits[pos] += 1;
                    break;
                }
                digits[pos] = 0;
            }
            if digits.iter().all(|&d| d == 0) {
                break;
            }
        }
    }

    let dir = cfg.out_dir();
    let mut files = Vec::new();
    let intervals_path = dir.join("intervals.csv");
    write_atomic(&intervals_path, intervals_csv.as_bytes())?;
    files.push(intervals_path);

    if exact {
        let mut endpoints_csv = String::from("value_num,value_den\n");
        for p in approx.endpoints(depth)?.points {
            endpoints_csv.push_str(&format!("{},{}\n", p.numer(), p.denom()));
        }
        let endpoints_path = dir.join("endpoints.csv");
        write_atomic(&endpoints_path, endpoints_csv.as_bytes())?;
        files.push(endpoints_path);
    }

    let length = approx
        .state(depth)
        .len_exact
        .as_ref()
        .map(num_exact)
        .unwrap_or_else(|| num_log(log_len));
    let gap = if depth >= 1 {
        approx
            .state(depth)
            .gap_exact
            .as_ref()
            .map(num_exact)
            .unwrap_or_else(|| {
                num_log(approx.state(depth).log_gap.map(|g| g.to_f64()).unwrap_or(0.0))
            })
    } else {
        Value::Null
    };

    let payload = json!({
        "depth": depth,
        "interval_count": count,
        "exact": exact,
        "warning": if exact { Value::Null } else {
            json!("exact rationals dropped: bit budget exceeded; log-space only")
        },
        "length": length,
        "gap": gap,
        "intervals": if embed { Value::Array(rows) } else { Value::Null },
        "files": files.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect::<Vec<_>>(),
    });
    let report = Report::new("build", cfg, payload);
    let path = write_report(&dir, "build", &report)?;
    files.push(path);
    Ok((report, files))
}

pub fn cmd_analyze(cfg: &RunConfig, which: AnalysisKind) -> Result<Report, CliError> {
    let payload = match which {
        AnalysisKind::Dim => analyze_dim(cfg)?,
        AnalysisKind::Cap => analyze_cap(cfg)?,
        AnalysisKind::Up => analyze_up(cfg)?,
        AnalysisKind::Porosity => analyze_porosity(cfg)?,
        AnalysisKind::Assembly => analyze_assembly(cfg)?,
    };
    Ok(Report::new(which.name(), cfg, payload))
}

fn analyze_dim(cfg: &RunConfig) -> Result<Value, CliError> {
    let spec = cfg.spec()?;
    let window = cfg.window.unwrap_or(cfg.depth / 4).max(1);
    let est = dim_estimate_windowed(&spec, cfg.depth, window);
    let monte_carlo = matches!(spec.variant(), RatioVariant::Random { .. });
    let liminf = if monte_carlo {
        num_monte_carlo(est.liminf_estimate, 0.05)
    } else {
        num_log(est.liminf_estimate)
    };
    let closed = closed_form_dim(&spec).ok().map(|cf| {
        json!({"expression": cf.describe(), "value": num_log(cf.value())})
    });
    let samples: Vec<Value> = est
        .samples
        .iter()
        .map(|s| json!([s.depth, s.value]))
        .collect();
    Ok(json!({
        "max_depth": cfg.depth,
        "window_len": est.window_len,
        "liminf_estimate": liminf,
        "closed_form": closed,
        "samples": samples,
        "samples_schema": {
            "columns": ["depth", "estimate"],
            "mode": if monte_carlo { "monte-carlo" } else { "log-space" },
            "tol": crate::report::LOG_SPACE_TOL,
        },
    }))
}

fn analyze_cap(cfg: &RunConfig) -> Result<Value, CliError> {
    let spec = cfg.spec()?;
    let series = series_capacity_bound(&spec, cfg.tol)?;
    let partial: Vec<Value> = series
        .partial_sums
        .iter()
        .map(|(l, s)| json!([l, s]))
        .collect();

    let struct_depth = cfg.depth.min(8);
    let approx = CantorApprox::with_budget(spec, struct_depth + 1, cfg.budget_bits);
    let seq = endpoint_diameter_seq(&approx, struct_depth)?;
    let structural: Vec<Value> = seq
        .iter()
        .map(|d| {
            json!({
                "depth": d.depth,
                "n": d.config.n,
                "log_p2": num_log(d.config.log_p.to_f64() * 2.0),
                "rhs": d.structural_rhs.map(|r| num_log(r.to_f64())),
                "holds": d.structural_holds,
                "log_d": num_log(d.config.log_d),
                "p_exact": d.config.exact_p.as_ref().map(format_ratio),
            })
        })
        .collect();

    Ok(json!({
        "series": {
            "partial_sums": partial,
            "partial_sums_schema": {
                "columns": ["l", "partial_sum"],
                "mode": "log-space",
                "tol": crate::report::LOG_SPACE_TOL,
            },
            "limit": num_log(series.limit.to_f64()),
            "cap_lower_bound": num_exact(&series.cap_lower_bound),
            "terms_used": series.terms_used,
            "converged": series.converged,
        },
        "structural": structural,
    }))
}

fn radius_json(r: &Radius) -> Value {
    json!({"scale": format_ratio(&r.scale), "sqrt2": r.sqrt2})
}

pub fn annulus_json(a: &Annulus) -> Value {
    json!({
        "center": [format_ratio(&a.center.x), format_ratio(&a.center.y)],
        "inner": radius_json(&a.inner),
        "outer": radius_json(&a.outer),
        "ratio_sq": num_exact(&a.ratio_sq()),
        "modulus": num_log(a.modulus_f64()),
    })
}

fn analyze_up(cfg: &RunConfig) -> Result<Value, CliError> {
    let spec = cfg.spec()?;
    let target = cfg.target_ratio_q()?;
    let approx = CantorApprox::with_budget(spec, cfg.depth, cfg.budget_bits);

    // The theorem-backed ceiling exists when inf a_k is positive and known:
    // the constant schedule (δ = a) and explicit lists (δ = min entry).
    let inf_ratio: Option<Q> = match approx.spec().variant() {
        RatioVariant::Constant => Some(approx.spec().a().clone()),
        RatioVariant::Explicit(list) => list.iter().min().cloned(),
        _ => None,
    };
    let bound = match &inf_ratio {
        Some(delta) => Some(up_modulus_bound(approx.spec().m(), delta).map_err(CliError::from)?),
        None => None,
    };

    let mut ratios: Vec<Value> = Vec::new();
    for k in 1..=cfg.depth {
        let r = canonical_ratio(&approx, k);
        let modulus = thinset_core::fix128::ln_rational(&r).to_f64();
        ratios.push(json!([k, format_ratio(&r), modulus]));
    }

    // Probe point: alternating digits, a generic interior point.
    let point = Address::from_digits(
        (0..cfg.depth).map(|i| (i % 2) as u32 % approx.m()).collect(),
    );
    let outcome = hnup_witness(&approx, &point, &target, cfg.depth)?;
    let outcome_json = match &outcome {
        WitnessOutcome::Found(w) => json!({
            "found": {
                "depth": w.depth,
                "ratio": num_exact(&w.achieved_ratio),
                "modulus": num_log(w.achieved_modulus()),
                "annulus": annulus_json(&w.annulus),
            }
        }),
        WitnessOutcome::NotFound { scanned_depth } => {
            let explanation = match &bound {
                Some(b) if &target > b => format!(
                    "no separating annulus can exceed the uniform-perfectness bound M = {}",
                    format_ratio(b)
                ),
                _ => format!(
                    "no canonical annulus of ratio ≥ {} within depth {scanned_depth}; \
                     inconclusive for non-constant schedules",
                    format_ratio(&target)
                ),
            };
            json!({"not_found": {"scanned_depth": scanned_depth, "explanation": explanation}})
        }
    };

    Ok(json!({
        "target_ratio": num_exact(&target),
        "uniform_bound": bound.as_ref().map(num_exact),
        "probe_point": point.to_string(),
        "canonical_ratios": ratios,
        "canonical_ratios_schema": {
            "columns": ["depth", "ratio", "modulus"],
            "modes": ["index", "exact", "log-space"],
            "tol": crate::report::LOG_SPACE_TOL,
        },
        "outcome": outcome_json,
    }))
}

pub fn probe_json(p: &PorosityProbe) -> Value {
    json!({
        "center": [format_ratio(&p.probe_center.x), format_ratio(&p.probe_center.y)],
        "radius": format_ratio(&p.probe_radius),
        "ball_center": [format_ratio(&p.ball_center.x), format_ratio(&p.ball_center.y)],
        "ball_radius": format_ratio(&p.ball_radius),
        "ratio": num_exact(&p.ratio),
    })
}

fn analyze_porosity(cfg: &RunConfig) -> Result<Value, CliError> {
    let res = cfg.resolution.max(8);

    // Perpendicular-ball probes on line sets.
    let segment = LineSetTarget::segment(q_int(0), q_int(1));
    let seg_probe = empty_ball_search(
        &segment,
        &Pt::on_line(q_ratio(1, 2)),
        &q_ratio(1, 2),
        res,
    )?;

    let spec = cfg.spec()?;
    let approx = CantorApprox::with_budget(spec, cfg.depth.min(8), cfg.budget_bits);
    let k = approx.depth();
    let target = LineSetTarget::from_approx(&approx, k)?;
    let mid = approx.intervals(1)?[0].midpoint();
    let gap_probe = empty_ball_search(
        &target,
        &Pt::on_line(mid),
        &(approx.gap(k)? / q_int(2)),
        res,
    )?;

    // Circle family: exact failure-of-porosity ratios at the origin.
    let family = CircleFamily::new(12);
    let circles_unit = empty_ball_search(&family, &Pt::origin(), &q_int(1), res)?;
    let mut scale_probes = Vec::new();
    for n in 1..=2u64 {
        let p = empty_ball_search(&family, &Pt::origin(), &q_ratio(1, n as i64), res)?;
        scale_probes.push(probe_json(&p));
    }
    let ratios: Vec<Value> = (1..=8u64)
        .map(|n| json!([n, format_ratio(&circle_family_ratio(n))]))
        .collect();

    // Discrete circles: same decay, point count recorded.
    let discrete = DiscreteCircleFamily::new(6, cfg.circle_points.max(8));
    let mut discrete_probes = Vec::new();
    let mut last = Q::from_integer(2.into());
    let mut decreasing = true;
    for n in 1..=2u64 {
        let p = empty_ball_search(&discrete, &Pt::origin(), &q_ratio(1, n as i64), res)?;
        decreasing &= p.ratio < last;
        last = p.ratio.clone();
        discrete_probes.push(probe_json(&p));
    }

    Ok(json!({
        "line_constant": num_exact(&line_porosity_constant()),
        "circle_ratios": ratios,
        "probes": {
            "segment_mid": probe_json(&seg_probe),
            "cantor_gap": probe_json(&gap_probe),
            "circles_unit": probe_json(&circles_unit),
            "circle_scales": scale_probes,
        },
        "discrete": {
            "points_per_circle": discrete.points_per_circle,
            "probes": discrete_probes,
            "ratios_decreasing": decreasing,
        },
        "resolution": res,
    }))
}

pub fn packing_witness_json(w: &PackingWitness) -> Value {
    let kind = match &w.kind {
        thinset_core::assembly::PackingWitnessKind::OriginRing { ring } => {
            json!({"origin_ring": ring})
        }
        thinset_core::assembly::PackingWitnessKind::ProductAnnulus { m, depth } => {
            json!({"product_annulus": {"m": m, "depth": depth}})
        }
        thinset_core::assembly::PackingWitnessKind::LineAnnulus { m, depth } => {
            json!({"line_annulus": {"m": m, "depth": depth}})
        }
    };
    json!({
        "center": [format_ratio(&w.center.x), format_ratio(&w.center.y)],
        "inner": radius_json(&w.inner),
        "outer": radius_json(&w.outer),
        "ratio_sq": num_exact(&w.ratio_sq()),
        "kind": kind,
    })
}

fn analyze_assembly(cfg: &RunConfig) -> Result<Value, CliError> {
    let depth = cfg.depth.clamp(1, 8);
    let set = build_planar_packing(cfg.m_max, |_| depth, RhoSequence)?;
    let separation = verify_packing_separation(&set);

    let mut components = Vec::new();
    let mut sup_lower = f64::NEG_INFINITY;
    for (idx, report) in set.component_reports().iter().enumerate() {
        sup_lower = sup_lower.max(report.dim_lower);
        let rect = set.components[idx].bounding_rect();
        let (inner, outer) = set.rho.ring(2 * report.m);
        components.push(json!({
            "m": report.m,
            "depth": report.depth,
            "ring_index": 2 * report.m,
            "ring": [format_ratio(&inner), format_ratio(&outer)],
            "bounds": {
                "x0": format_ratio(&rect.x0), "x1": format_ratio(&rect.x1),
                "y0": format_ratio(&rect.y0), "y1": format_ratio(&rect.y1),
            },
            "dim_lower": num_log(report.dim_lower),
            "dim_upper": num_log(report.dim_upper),
        }));
    }

    let target = cfg.target_ratio_q()?;
    let origin = additional_property_witness(&set, &PackingPoint::Origin, &target, depth)?;
    let origin_json = match &origin {
        PackingOutcome::Found(w) => json!({"found": packing_witness_json(w)}),
        PackingOutcome::NotFound { reason } => json!({"not_found": reason}),
    };

    // Two sample points in the first component.
    let mut witnesses = Vec::new();
    let budget = 64;
    for digits in [
        Address::from_digits((0..budget).map(|i| (i % 2) as u32).collect::<Vec<_>>()),
        Address::repeated(0, budget as usize),
    ] {
        let point = PackingPoint::Product {
            component: 0,
            x: digits.clone(),
            y: digits,
        };
        let w = additional_property_witness(&set, &point, &target, budget)?;
        witnesses.push(match &w {
            PackingOutcome::Found(w) => json!({"found": packing_witness_json(w)}),
            PackingOutcome::NotFound { reason } => json!({"not_found": reason}),
        });
    }

    Ok(json!({
        "m_max": cfg.m_max,
        "component_depth": depth,
        "rho_rule": "2^(-n^2)",
        "components": components,
        "packing_separation": separation,
        "sup_dim_lower": num_log(sup_lower),
        "origin_witness": origin_json,
        "component_witnesses": witnesses,
        "target_ratio": num_exact(&target),
    }))
}
