//! Deterministic CSV/SVG artifacts derived from report files.
//!
//! Rendering is a pure function of the report bytes: floats print with
//! fixed precision and nothing time- or platform-dependent enters the
//! output, so identical reports yield byte-identical artifacts.

use std::path::{Path, PathBuf};

use serde_json::Value;
use thinset_core::rational::{parse_ratio, to_f64_approx};

use crate::report::write_atomic;
use crate::CliError;

/// Render the artifacts appropriate to the report's analysis kind; returns
/// the written paths.
pub fn cmd_render(report_path: &Path, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let bytes = std::fs::read(report_path)?;
    let report: Value = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Config(format!("{}: {e}", report_path.display())))?;
    let analysis = report["analysis"]
        .as_str()
        .ok_or_else(|| CliError::Config("report lacks an analysis field".into()))?;
    let payload = &report["payload"];
    let mut written = Vec::new();
    match analysis {
        "build" => {
            written.push(render_intervals_svg(payload, out_dir)?);
        }
        "dim" => {
            written.push(render_dim_csv(payload, out_dir)?);
        }
        "up" => {
            written.push(render_modulus_csv(payload, out_dir)?);
        }
        "cap" => {
            written.push(render_capacity_csv(payload, out_dir)?);
        }
        "porosity" => {
            written.push(render_porosity_csv(payload, out_dir)?);
        }
        "assembly" => {
            written.push(render_assembly_svg(payload, out_dir)?);
            written.push(render_component_dims_csv(payload, out_dir)?);
        }
        "table1" => {
            written.push(render_table1_csv(payload, out_dir)?);
        }
        other => {
            return Err(CliError::Config(format!(
                "no renderer for analysis {other:?}"
            )))
        }
    }
    Ok(written)
}

fn ratio_f64(s: &Value) -> Result<f64, CliError> {
    let text = s
        .as_str()
        .ok_or_else(|| CliError::Config("expected a p/q string".into()))?;
    parse_ratio(text)
        .map(|q| to_f64_approx(&q))
        .ok_or_else(|| CliError::Config(format!("bad ratio {text:?}")))
}

fn render_intervals_svg(payload: &Value, out_dir: &Path) -> Result<PathBuf, CliError> {
    let rows = payload["intervals"].as_array().ok_or_else(|| {
        CliError::Config("build report has no embedded intervals (too many rows?)".into())
    })?;
    if !payload["exact"].as_bool().unwrap_or(false) {
        return Err(CliError::Config(
            "cannot draw a log-space-only build (no endpoints)".into(),
        ));
    }
    let mut svg = String::from(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 48\">\n\
         <rect x=\"0\" y=\"0\" width=\"1000\" height=\"48\" fill=\"#ffffff\"/>\n",
    );
    for row in rows {
        let left = ratio_f64(&row["left"])?;
        let len = ratio_f64(&row["length"])?;
        svg.push_str(&format!(
            "<rect x=\"{:.6}\" y=\"12\" width=\"{:.6}\" height=\"24\" fill=\"#2b5d8a\"/>\n",
            left * 1000.0,
            (len * 1000.0).max(0.05),
        ));
    }
    svg.push_str("</svg>\n");
    let path = out_dir.join("intervals.svg");
    write_atomic(&path, svg.as_bytes())?;
    Ok(path)
}

fn render_dim_csv(payload: &Value, out_dir: &Path) -> Result<PathBuf, CliError> {
    let samples = payload["samples"]
        .as_array()
        .ok_or_else(|| CliError::Config("dim report lacks samples".into()))?;
    let mut csv = String::from("depth,estimate\n");
    for s in samples {
        let k = s[0].as_u64().unwrap_or(0);
        let v = s[1].as_f64().unwrap_or(f64::NAN);
        csv.push_str(&format!("{k},{v:.16e}\n"));
    }
    let path = out_dir.join("dimension_samples.csv");
    write_atomic(&path, csv.as_bytes())?;
    Ok(path)
}

fn render_modulus_csv(payload: &Value, out_dir: &Path) -> Result<PathBuf, CliError> {
    let ratios = payload["canonical_ratios"]
        .as_array()
        .ok_or_else(|| CliError::Config("up report lacks canonical ratios".into()))?;
    let mut csv = String::from("depth,ratio,modulus\n");
    for r in ratios {
        let k = r[0].as_u64().unwrap_or(0);
        let ratio = r[1].as_str().unwrap_or("");
        let modulus = r[2].as_f64().unwrap_or(f64::NAN);
        csv.push_str(&format!("{k},{ratio},{modulus:.16e}\n"));
    }
    let path = out_dir.join("modulus_growth.csv");
    write_atomic(&path, csv.as_bytes())?;
    Ok(path)
}

fn render_capacity_csv(payload: &Value, out_dir: &Path) -> Result<PathBuf, CliError> {
    let sums = payload["series"]["partial_sums"]
        .as_array()
        .ok_or_else(|| CliError::Config("cap report lacks partial sums".into()))?;
    let mut csv = String::from("l,partial_sum\n");
    for s in sums {
        csv.push_str(&format!(
            "{},{:.16e}\n",
            s[0].as_u64().unwrap_or(0),
            s[1].as_f64().unwrap_or(f64::NAN)
        ));
    }
    let path = out_dir.join("capacity_partial_sums.csv");
    write_atomic(&path, csv.as_bytes())?;
    Ok(path)
}

fn render_porosity_csv(payload: &Value, out_dir: &Path) -> Result<PathBuf, CliError> {
    let mut csv = String::from("probe,center_x,center_y,radius,ball_radius,ratio\n");
    let mut emit = |name: &str, p: &Value| {
        csv.push_str(&format!(
            "{name},{},{},{},{},{}\n",
            p["center"][0].as_str().unwrap_or(""),
            p["center"][1].as_str().unwrap_or(""),
            p["radius"].as_str().unwrap_or(""),
            p["ball_radius"].as_str().unwrap_or(""),
            p["ratio"]["value"].as_str().unwrap_or(""),
        ));
    };
    let probes = &payload["probes"];
    emit("segment_mid", &probes["segment_mid"]);
    emit("cantor_gap", &probes["cantor_gap"]);
    emit("circles_unit", &probes["circles_unit"]);
    if let Some(list) = probes["circle_scales"].as_array() {
        for (i, p) in list.iter().enumerate() {
            emit(&format!("circle_scale_{}", i + 1), p);
        }
    }
    if let Some(list) = payload["discrete"]["probes"].as_array() {
        for (i, p) in list.iter().enumerate() {
            emit(&format!("discrete_{}", i + 1), p);
        }
    }
    let path = out_dir.join("porosity_probes.csv");
    write_atomic(&path, csv.as_bytes())?;
    Ok(path)
}

/// The ring radii span hundreds of orders of magnitude, so the drawing is
/// index-scaled: ring `B_n` maps to display radius `460 − 36·(n − 4)`.
fn render_assembly_svg(payload: &Value, out_dir: &Path) -> Result<PathBuf, CliError> {
    let comps = payload["components"]
        .as_array()
        .ok_or_else(|| CliError::Config("assembly report lacks components".into()))?;
    let display = |n: f64| 460.0 - 36.0 * (n - 4.0);
    let mut svg = String::from(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\">\n\
         <rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"#ffffff\"/>\n\
         <circle cx=\"500\" cy=\"500\" r=\"2.5\" fill=\"#000000\"/>\n",
    );
    for c in comps {
        let ring = c["ring_index"].as_u64().unwrap_or(0) as f64;
        let outer = display(ring);
        let inner = display(ring + 1.0);
        svg.push_str(&format!(
            "<circle cx=\"500\" cy=\"500\" r=\"{outer:.6}\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1\"/>\n"
        ));
        svg.push_str(&format!(
            "<circle cx=\"500\" cy=\"500\" r=\"{inner:.6}\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1\"/>\n"
        ));
        let mid = (outer + inner) / 2.0;
        let half = ((outer - inner) / 2.0 - 2.0).max(4.0);
        svg.push_str(&format!(
            "<rect x=\"{:.6}\" y=\"{:.6}\" width=\"{:.6}\" height=\"{:.6}\" fill=\"#2b5d8a\"/>\n",
            500.0 + mid - half,
            500.0 - half,
            2.0 * half,
            2.0 * half,
        ));
        let m = c["m"].as_u64().unwrap_or(0);
        svg.push_str(&format!(
            "<text x=\"{:.6}\" y=\"496\" font-size=\"14\" text-anchor=\"middle\">m={m}</text>\n",
            500.0 + mid,
        ));
    }
    svg.push_str("</svg>\n");
    let path = out_dir.join("assembly.svg");
    write_atomic(&path, svg.as_bytes())?;
    Ok(path)
}

fn render_component_dims_csv(payload: &Value, out_dir: &Path) -> Result<PathBuf, CliError> {
    let comps = payload["components"]
        .as_array()
        .ok_or_else(|| CliError::Config("assembly report lacks components".into()))?;
    let mut csv = String::from("m,depth,ring_inner,ring_outer,dim_lower,dim_upper\n");
    for c in comps {
        csv.push_str(&format!(
            "{},{},{},{},{:.16e},{:.16e}\n",
            c["m"].as_u64().unwrap_or(0),
            c["depth"].as_u64().unwrap_or(0),
            c["ring"][0].as_str().unwrap_or(""),
            c["ring"][1].as_str().unwrap_or(""),
            c["dim_lower"]["value"].as_f64().unwrap_or(f64::NAN),
            c["dim_upper"]["value"].as_f64().unwrap_or(f64::NAN),
        ));
    }
    let path = out_dir.join("component_dims.csv");
    write_atomic(&path, csv.as_bytes())?;
    Ok(path)
}

fn render_table1_csv(payload: &Value, out_dir: &Path) -> Result<PathBuf, CliError> {
    let cells = payload["cells"]
        .as_array()
        .ok_or_else(|| CliError::Config("table1 report lacks cells".into()))?;
    let mut csv = String::from("cell,x,y,answer,status,passed\n");
    for c in cells {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            c["cell"].as_str().unwrap_or(""),
            c["x"].as_str().unwrap_or(""),
            c["y"].as_str().unwrap_or(""),
            c["answer"].as_str().unwrap_or(""),
            c["status"].as_str().unwrap_or(""),
            c["passed"].as_bool().unwrap_or(false),
        ));
    }
    let path = out_dir.join("table1.csv");
    write_atomic(&path, csv.as_bytes())?;
    Ok(path)
}
