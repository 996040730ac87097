use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use thinset_cli::commands::{cmd_analyze, cmd_build, AnalysisKind};
use thinset_cli::config::{OutputFormat, RunConfig};
use thinset_cli::render::cmd_render;
use thinset_cli::report::write_report;
use thinset_cli::table1::run_table1;
use thinset_cli::CliError;

/// Build Cantor-like interval constructions and analyze their thinness:
/// dimension estimates, capacity bounds, separating annuli, porosity.
#[derive(Parser)]
#[command(name = "thinset", version, about)]
struct Cli {
    /// JSON config file mirroring the run configuration; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Construct a finite-depth approximation; write interval/endpoint CSVs
    /// and a JSON report.
    Build(SpecArgs),
    /// Run one analysis pipeline and write its JSON report.
    Analyze {
        /// Analysis kind: dim | cap | up | porosity | assembly.
        which: String,
        #[command(flatten)]
        args: SpecArgs,
    },
    /// Run the implication-table verification suite.
    Table1(SpecArgs),
    /// Emit deterministic CSV/SVG artifacts for an existing report.
    Render {
        /// Path to a report JSON produced by build, analyze, or table1.
        #[arg(long)]
        report: PathBuf,
        /// Output directory (default: alongside the report).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SpecArgs {
    /// Branching count m ≥ 2.
    #[arg(long)]
    m: Option<u32>,
    /// Ratio schedule: constant | sparse-power | geometric-power | explicit | random.
    #[arg(long)]
    variant: Option<String>,
    /// Base ratio as p/q, e.g. 1/3.
    #[arg(long)]
    a: Option<String>,
    /// Comma-separated p/q list for --variant explicit.
    #[arg(long)]
    ratios: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fractional bits of each random draw (1..=64).
    #[arg(long)]
    precision_bits: Option<u32>,
    #[arg(long)]
    depth: Option<u64>,
    /// Tail-window length for liminf estimates (default: half the depth).
    #[arg(long)]
    window: Option<u64>,
    /// Bit budget per exact value before dropping to log space.
    #[arg(long)]
    budget_bits: Option<u64>,
    /// Series / convergence tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Target annulus ratio for witness searches, p/q.
    #[arg(long)]
    target_ratio: Option<String>,
    /// Largest component index for assemblies.
    #[arg(long)]
    m_max: Option<u32>,
    /// Porosity grid resolution (≥ 8).
    #[arg(long)]
    resolution: Option<u32>,
    /// Points per discrete circle.
    #[arg(long)]
    circle_points: Option<u32>,
    /// Output directory (default: $THINSET_OUT_DIR or `.`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report artifacts to emit: json | csv | svg.
    #[arg(long)]
    format: Option<String>,
}

impl SpecArgs {
    fn overlay(&self, cfg: &mut RunConfig) -> Result<(), CliError> {
        if let Some(m) = self.m {
            cfg.m = m;
        }
        if let Some(v) = &self.variant {
            cfg.variant = v.clone();
        }
        if let Some(a) = &self.a {
            cfg.a = a.clone();
        }
        if let Some(rs) = &self.ratios {
            cfg.ratios = rs.split(',').map(|s| s.trim().to_string()).collect();
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(p) = self.precision_bits {
            cfg.precision_bits = p;
        }
        if let Some(d) = self.depth {
            cfg.depth = d;
        }
        if self.window.is_some() {
            cfg.window = self.window;
        }
        if let Some(b) = self.budget_bits {
            cfg.budget_bits = b;
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        if let Some(t) = &self.target_ratio {
            cfg.target_ratio = t.clone();
        }
        if let Some(mm) = self.m_max {
            cfg.m_max = mm;
        }
        if let Some(r) = self.resolution {
            cfg.resolution = r;
        }
        if let Some(c) = self.circle_points {
            cfg.circle_points = c;
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        if let Some(f) = &self.format {
            cfg.format = match f.as_str() {
                "json" => OutputFormat::Json,
                "csv" => OutputFormat::Csv,
                "svg" => OutputFormat::Svg,
                other => {
                    return Err(CliError::Config(format!(
                        "unknown format {other:?} (expected json|csv|svg)"
                    )))
                }
            };
        }
        Ok(())
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig, CliError> {
    match path {
        Some(p) => RunConfig::from_file(p),
        None => Ok(RunConfig::default()),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Cmd::Build(args) => {
            let mut cfg = load_config(&cli.config)?;
            args.overlay(&mut cfg)?;
            let (_, files) = cmd_build(&cfg)?;
            for f in &files {
                println!("wrote {}", f.display());
            }
            maybe_render(&cfg, "build")?;
            Ok(())
        }
        Cmd::Analyze { which, args } => {
            let kind = AnalysisKind::parse(&which).ok_or_else(|| {
                CliError::Config(format!(
                    "unknown analysis {which:?} (expected dim|cap|up|porosity|assembly)"
                ))
            })?;
            let mut cfg = load_config(&cli.config)?;
            args.overlay(&mut cfg)?;
            let report = cmd_analyze(&cfg, kind)?;
            let path = write_report(&cfg.out_dir(), kind.name(), &report)?;
            println!("wrote {}", path.display());
            maybe_render(&cfg, kind.name())?;
            Ok(())
        }
        Cmd::Table1(args) => {
            let mut cfg = load_config(&cli.config)?;
            args.overlay(&mut cfg)?;
            let (report, ok) = run_table1(&cfg)?;
            let path = write_report(&cfg.out_dir(), "table1", &report)?;
            for cell in report.payload["cells"].as_array().into_iter().flatten() {
                println!(
                    "cell {:>8}  {:<22} {}",
                    cell["cell"].as_str().unwrap_or("?"),
                    cell["status"].as_str().unwrap_or("?"),
                    if cell["passed"].as_bool().unwrap_or(false) {
                        "ok"
                    } else {
                        "FAILED"
                    }
                );
            }
            println!("wrote {}", path.display());
            maybe_render(&cfg, "table1")?;
            if ok {
                Ok(())
            } else {
                Err(CliError::Invariant("table1 witness check failed".into()))
            }
        }
        Cmd::Render { report, out } => {
            let dir = out
                .or_else(|| report.parent().map(|p| p.to_path_buf()))
                .unwrap_or_else(|| PathBuf::from("."));
            for f in cmd_render(&report, &dir)? {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
    }
}

/// `--format csv|svg` renders the fresh report's artifacts immediately.
fn maybe_render(cfg: &RunConfig, name: &str) -> Result<(), CliError> {
    if cfg.format == OutputFormat::Json {
        return Ok(());
    }
    let dir = cfg.out_dir();
    for f in cmd_render(&dir.join(format!("{name}.json")), &dir)? {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("thinset: {e}");
            e.exit_code()
        }
    }
}
