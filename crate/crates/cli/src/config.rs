//! Run configuration: defaults, JSON config files, and flag overlays.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thinset_core::rational::parse_ratio;
use thinset_core::{RatioSpec, RatioVariant};

use crate::CliError;

/// Environment variable carrying the default output directory.
pub const OUT_DIR_ENV: &str = "THINSET_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Svg,
}

/// Everything a run needs; the JSON config file mirrors this struct
/// field-for-field and explicit CLI flags override file values.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Branching count `m ≥ 2`.
    pub m: u32,
    /// `constant | sparse-power | geometric-power | explicit | random`.
    pub variant: String,
    /// Base ratio as a `p/q` string.
    pub a: String,
    /// Ratio list for the explicit variant, `p/q` strings.
    pub ratios: Vec<String>,
    pub seed: u64,
    pub precision_bits: u32,
    pub depth: u64,
    /// Tail-window length for the liminf estimate (default: half).
    pub window: Option<u64>,
    pub budget_bits: u64,
    pub tol: f64,
    /// Target annulus ratio for witness searches, `p/q`.
    pub target_ratio: String,
    /// Largest component index for assemblies.
    pub m_max: u32,
    /// Porosity grid resolution.
    pub resolution: u32,
    /// Discrete-circle point count (recorded in reports).
    pub circle_points: u32,
    /// Output directory. Accepted from config files but never serialized
    /// into reports: bytes must not depend on where they land.
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            m: 2,
            variant: "constant".into(),
            a: "1/3".into(),
            ratios: Vec::new(),
            seed: 0,
            precision_bits: 64,
            depth: 8,
            window: None,
            budget_bits: thinset_core::DEFAULT_BUDGET_BITS,
            tol: 1e-12,
            target_ratio: "4".into(),
            m_max: 5,
            resolution: 16,
            circle_points: 1000,
            out: None,
            format: OutputFormat::Json,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<RunConfig, CliError> {
        let bytes = std::fs::read(path)?;
        serde_json::from_slice(&bytes)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Output directory: flag/config value, else `THINSET_OUT_DIR`, else `.`.
    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }

    /// Validated ratio spec for this config.
    pub fn spec(&self) -> Result<RatioSpec, CliError> {
        let a = parse_ratio(&self.a)
            .ok_or_else(|| CliError::Config(format!("bad ratio a = {:?}", self.a)))?;
        let spec = match self.variant.as_str() {
            "constant" => RatioSpec::constant(self.m, a),
            "sparse-power" => RatioSpec::sparse_power(self.m, a),
            "geometric-power" => RatioSpec::geometric_power(self.m, a),
            "explicit" => {
                let ratios = self
                    .ratios
                    .iter()
                    .map(|s| {
                        parse_ratio(s)
                            .ok_or_else(|| CliError::Config(format!("bad ratio {s:?}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                RatioSpec::explicit(self.m, ratios)
            }
            "random" => {
                let mut spec = RatioSpec::random(self.m, self.seed);
                if self.precision_bits != 64 {
                    spec = RatioSpec::new(
                        self.m,
                        parse_ratio(&format!("1/{}", self.m + 1)).unwrap(),
                        RatioVariant::Random {
                            seed: self.seed,
                            precision_bits: self.precision_bits,
                        },
                    );
                }
                spec
            }
            other => return Err(CliError::Config(format!("unknown variant {other:?}"))),
        };
        spec.map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn target_ratio_q(&self) -> Result<thinset_core::Q, CliError> {
        parse_ratio(&self.target_ratio)
            .ok_or_else(|| CliError::Config(format!("bad target ratio {:?}", self.target_ratio)))
    }
}
