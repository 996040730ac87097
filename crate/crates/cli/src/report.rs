//! Report envelope, value provenance wrappers, and deterministic writers.
//!
//! Exact rationals serialize as decimal-free `p/q` strings; log-space and
//! Monte Carlo values as decimals with 17 significant digits (lossless for
//! `f64`). JSON object keys are emitted in sorted order and floats with a
//! fixed format, so identical configs produce byte-identical reports.
//! Wall-clock timestamps live in a separate `.sidecar.json`.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use thinset_core::rational::format_ratio;
use thinset_core::Q;

use crate::config::RunConfig;
use crate::CliError;

/// Declared tolerance of decimals derived from the 128-bit log layer and
/// reported through `f64` (conversion and accumulation slack).
pub const LOG_SPACE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool_version: String,
    pub analysis: String,
    pub config: RunConfig,
    pub payload: Value,
}

impl Report {
    pub fn new(analysis: &str, config: &RunConfig, payload: Value) -> Report {
        Report {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            analysis: analysis.into(),
            config: config.clone(),
            payload,
        }
    }
}

/// Exact rational payload value.
pub fn num_exact(q: &Q) -> Value {
    json!({"value": format_ratio(q), "mode": "exact", "tol": 0.0})
}

/// Decimal derived through the log-space layer.
pub fn num_log(v: f64) -> Value {
    json!({"value": v, "mode": "log-space", "tol": LOG_SPACE_TOL})
}

/// Decimal with sampling error (seeded runs).
pub fn num_monte_carlo(v: f64, tol: f64) -> Value {
    json!({"value": v, "mode": "monte-carlo", "tol": tol})
}

/// Write any JSON value deterministically: sorted keys (serde_json maps are
/// ordered), two-space indent, floats as `d.dddddddddddddddde±x`.
pub fn to_deterministic_json(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                let f = n.as_f64().expect("finite float");
                out.push_str(&format!("{f:.16e}"));
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("string encodes"));
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent + 1));
                write_value(out, item, indent + 1);
            }
            out.push('\n');
            out.push_str(&"  ".repeat(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (i, (k, val)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent + 1));
                out.push_str(&serde_json::to_string(k).expect("key encodes"));
                out.push_str(": ");
                write_value(out, val, indent + 1);
            }
            out.push('\n');
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
    }
}

/// Atomic write: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp~");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Write `<name>.json` plus its timestamp sidecar; returns the report path.
pub fn write_report(dir: &Path, name: &str, report: &Report) -> Result<PathBuf, CliError> {
    let value = serde_json::to_value(report)
        .map_err(|e| CliError::Invariant(format!("report serialization: {e}")))?;
    let path = dir.join(format!("{name}.json"));
    write_atomic(&path, to_deterministic_json(&value).as_bytes())?;
    let millis = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0);
    let sidecar = json!({ "written_unix_ms": millis });
    write_atomic(
        &dir.join(format!("{name}.sidecar.json")),
        to_deterministic_json(&sidecar).as_bytes(),
    )?;
    Ok(path)
}
