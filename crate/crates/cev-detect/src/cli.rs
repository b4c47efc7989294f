//! Batch front end: ingest or simulate data, compute marginal diagnostics
//! and CEV statistic traces, run detection, and emit plot-ready CSV.
//!
//! Subcommands: `compute`, `simulate`, `detect`, `limits`, `marginals`.
//! Outputs are data files (CSV/JSON) rather than rendered plots, byte-stable
//! across runs for a fixed configuration.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::detection::{product_verdict, DetectionConfig, DetectionVerdict};
use crate::io::{
    ingest_csv, read_cev_traces, write_cev_traces, write_marginal_traces, write_sample_csv,
    write_verdict_json, ColumnSelector, IngestOptions,
};
use crate::marginals::{default_marginal_grid, marginal_trace, EvEstimateTrace, EvEstimator};
use crate::models::{
    hillish_limit_ex2, kendall_limit_ex2, numeric_i_mustar, numeric_j_mustar,
    pickandsish_limit_ex2, simulate, ModelSpec, MuStarSpec,
};
use crate::statistics::{compute_traces, KGrid};
use crate::BivariateSample;

#[derive(Debug, Parser)]
#[command(
    name = "cev-detect",
    about = "Detect conditional extreme value structure in bivariate data",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute statistic traces, marginal diagnostics and a verdict.
    Compute(ComputeArgs),
    /// Simulate a reference model and write the sample as CSV.
    Simulate(SimulateArgs),
    /// Run detection on a previously computed trace file.
    Detect(DetectArgs),
    /// Print closed-form limit constants next to their quadrature values.
    Limits(LimitsArgs),
    /// Compute marginal extreme-value-index traces for both columns.
    Marginals(MarginalsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelName {
    Example1,
    Example2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// CSV file with the observations.
    #[arg(long)]
    input: Option<PathBuf>,

    /// X column: 1-based index or header name.
    #[arg(long, default_value = "1")]
    col_x: ColumnSelector,

    /// Y column (the conditioning candidate): 1-based index or header name.
    #[arg(long, default_value = "2")]
    col_y: ColumnSelector,

    /// Treat the first row as a header.
    #[arg(long)]
    header: bool,

    /// Replace X by the derived rate X/Y during ingestion.
    #[arg(long)]
    derive_rate: bool,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Simulate a reference model instead of reading a file.
    #[arg(long, value_enum)]
    model: Option<ModelName>,

    /// Pareto split parameter of example2, in (0,1).
    #[arg(long)]
    rho: Option<f64>,

    /// Sample size for simulation.
    #[arg(long)]
    n: Option<usize>,

    /// RNG seed for simulation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ModelArgs {
    fn spec(&self) -> anyhow::Result<ModelSpec> {
        match self.model {
            Some(ModelName::Example1) => Ok(ModelSpec::Example1),
            Some(ModelName::Example2) => {
                let rho = self.rho.context("--model example2 requires --rho")?;
                Ok(ModelSpec::Example2 { rho })
            }
            None => bail!("no model selected"),
        }
    }
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Smallest k in the grid.
    #[arg(long)]
    kmin: Option<usize>,

    /// Largest k in the grid.
    #[arg(long)]
    kmax: Option<usize>,

    /// Number of grid points.
    #[arg(long, default_value_t = 50)]
    kcount: usize,

    /// Grid spacing.
    #[arg(long, value_enum, default_value_t = Spacing::Log)]
    kspacing: Spacing,
}

impl GridArgs {
    fn build(&self, default_min: usize, default_max: usize) -> anyhow::Result<KGrid> {
        let kmin = self.kmin.unwrap_or(default_min);
        let kmax = self.kmax.unwrap_or(default_max);
        let grid = match self.kspacing {
            Spacing::Log => KGrid::log_spaced(kmin, kmax, self.kcount),
            Spacing::Linear => KGrid::linear_spaced(kmin, kmax, self.kcount),
        };
        Ok(grid?)
    }
}

#[derive(Debug, Args)]
struct DetectionArgs {
    /// Product box half-width around 1 for the Hillish levels.
    #[arg(long)]
    eps_hillish: Option<f64>,

    /// Product box half-width around 0 for the Pickandsish levels.
    #[arg(long)]
    eps_pickandsish: Option<f64>,

    /// Sliding-window width as a fraction of the admissible grid points.
    #[arg(long)]
    window_frac: Option<f64>,
}

impl DetectionArgs {
    fn config(&self) -> DetectionConfig {
        let mut cfg = DetectionConfig::default();
        if let Some(e) = self.eps_hillish {
            cfg.eps_hillish = e;
        }
        if let Some(e) = self.eps_pickandsish {
            cfg.eps_pickandsish = e;
        }
        if let Some(w) = self.window_frac {
            cfg.window_width_frac = w;
        }
        cfg
    }
}

#[derive(Debug, Args)]
struct ComputeArgs {
    #[command(flatten)]
    input: InputArgs,

    #[command(flatten)]
    model: ModelArgs,

    #[command(flatten)]
    grid: GridArgs,

    /// Pickandsish probe level; repeat for several (default: 0.3 and 0.6).
    #[arg(long = "p")]
    p: Vec<f64>,

    #[command(flatten)]
    detection: DetectionArgs,

    /// Output directory.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,

    /// Output directory.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct DetectArgs {
    /// Trace CSV produced by `compute` (cev_traces.csv layout).
    #[arg(long)]
    input: PathBuf,

    /// Sample size behind the traces; defaults to 10 × the largest grid k
    /// (the default grid construction uses kmax = n/10).
    #[arg(long)]
    n: Option<usize>,

    #[command(flatten)]
    detection: DetectionArgs,

    /// Output directory.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct LimitsArgs {
    /// Model to evaluate; defaults to example2 when --rho is given.
    #[arg(long, value_enum)]
    model: Option<ModelName>,

    /// Pareto split parameter of example2, in (0,1).
    #[arg(long)]
    rho: Option<f64>,

    /// Pickandsish probe level; repeatable (default: 0.5).
    #[arg(long = "p")]
    p: Vec<f64>,
}

#[derive(Debug, Args)]
struct MarginalsArgs {
    #[command(flatten)]
    input: InputArgs,

    #[command(flatten)]
    grid: GridArgs,

    /// Output directory.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

/// Parse the process arguments and run; returns an error for nonzero exit.
pub fn run() -> anyhow::Result<()> {
    run_from(std::env::args_os())
}

/// Entry point taking explicit arguments (testable).
pub fn run_from<I, T>(args: I) -> anyhow::Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::parse_from(args);
    match cli.command {
        Command::Compute(args) => cmd_compute(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Detect(args) => cmd_detect(args),
        Command::Limits(args) => cmd_limits(args),
        Command::Marginals(args) => cmd_marginals(args),
    }
}

fn load_sample(input: &InputArgs, model: &ModelArgs) -> anyhow::Result<BivariateSample> {
    match (&input.input, model.model) {
        (Some(path), None) => {
            let opts = IngestOptions {
                col_x: input.col_x.clone(),
                col_y: input.col_y.clone(),
                header: input.header,
                derive_rate: input.derive_rate,
            };
            let report = ingest_csv(path, &opts)
                .with_context(|| format!("ingesting '{}'", path.display()))?;
            println!(
                "ingested {} rows from {} ({} rejected)",
                report.sample.n(),
                path.display(),
                report.rejected_rows
            );
            Ok(report.sample)
        }
        (None, Some(_)) => {
            let spec = model.spec()?;
            let n = model.n.context("--model requires --n")?;
            let sample = simulate(&spec, n, model.seed)?;
            println!(
                "simulated {n} observations (model={:?}, seed={})",
                model.model.expect("model present"),
                model.seed
            );
            Ok(sample)
        }
        (Some(_), Some(_)) => bail!("exactly one of --input and --model must be given, got both"),
        (None, None) => bail!("exactly one of --input and --model must be given, got neither"),
    }
}

fn marginal_triple(z: &[f64], grid: &KGrid) -> anyhow::Result<[EvEstimateTrace; 3]> {
    Ok([
        marginal_trace(z, grid, EvEstimator::Hill)?,
        marginal_trace(z, grid, EvEstimator::Pickands)?,
        marginal_trace(z, grid, EvEstimator::Moment)?,
    ])
}

fn print_verdict(verdict: &DetectionVerdict) {
    println!("verdict: {}", verdict.verdict);
    for r in &verdict.evidence {
        let level = r.level.map(|l| l.to_string()).unwrap_or_else(|| "-".into());
        let disp = r
            .dispersion
            .map(|d| d.to_string())
            .unwrap_or_else(|| "-".into());
        println!(
            "  {:<18} window k=[{}, {}]  level={}  iqr={}  stable={}",
            r.statistic.to_string(),
            r.window.0,
            r.window.1,
            level,
            disp,
            r.stable
        );
    }
}

fn cmd_compute(args: ComputeArgs) -> anyhow::Result<()> {
    let sample = load_sample(&args.input, &args.model)?;
    let n = sample.n();
    let grid = args.grid.build(10.min(n / 10).max(2), n / 10)?;
    if grid.max() > n {
        bail!("grid max k = {} exceeds sample size n = {n}", grid.max());
    }
    let ps = if args.p.is_empty() {
        vec![0.3, 0.6]
    } else {
        args.p.clone()
    };

    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating '{}'", args.out_dir.display()))?;

    let bundle = compute_traces(&sample, &grid, &ps)?;
    let traces_path = args.out_dir.join("cev_traces.csv");
    write_cev_traces(&traces_path, &bundle)?;
    println!("wrote {}", traces_path.display());

    let mgrid = default_marginal_grid(n)?;
    let tx = marginal_triple(sample.xs(), &mgrid)?;
    let ty = marginal_triple(sample.ys(), &mgrid)?;
    let marg_path = args.out_dir.join("marginal_traces.csv");
    write_marginal_traces(&marg_path, &mgrid, &tx, &ty)?;
    println!("wrote {}", marg_path.display());

    let config = args.detection.config();
    let verdict = product_verdict(&bundle, n, &config)?;
    let verdict_path = args.out_dir.join("verdict.json");
    write_verdict_json(&verdict_path, &verdict)?;
    println!("wrote {}", verdict_path.display());
    print_verdict(&verdict);
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> anyhow::Result<()> {
    let spec = args.model.spec().context("simulate requires --model")?;
    let n = args.model.n.context("simulate requires --n")?;
    let sample = simulate(&spec, n, args.model.seed)?;
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating '{}'", args.out_dir.display()))?;
    let path = args.out_dir.join("sample.csv");
    write_sample_csv(&path, &sample)?;
    println!("wrote {} (n={n}, seed={})", path.display(), args.model.seed);
    Ok(())
}

fn cmd_detect(args: DetectArgs) -> anyhow::Result<()> {
    let bundle = read_cev_traces(&args.input)
        .with_context(|| format!("reading traces from '{}'", args.input.display()))?;
    let n = args.n.unwrap_or(10 * bundle.kgrid.max());
    let config = args.detection.config();
    let verdict = product_verdict(&bundle, n, &config)?;
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating '{}'", args.out_dir.display()))?;
    let verdict_path = args.out_dir.join("verdict.json");
    write_verdict_json(&verdict_path, &verdict)?;
    println!("wrote {}", verdict_path.display());
    print_verdict(&verdict);
    Ok(())
}

const LIMITS_TOL: f64 = 1e-6;

fn limits_row(name: &str, closed: f64, quad: Option<f64>) {
    match quad {
        Some(q) => println!(
            "{:<24} {:<24} {:<24} {:e}",
            name,
            closed,
            q,
            (closed - q).abs()
        ),
        None => println!("{:<24} {:<24} {:<24} -", name, closed, "-"),
    }
}

fn cmd_limits(args: LimitsArgs) -> anyhow::Result<()> {
    let model = match (args.model, args.rho) {
        (Some(m), _) => m,
        (None, Some(_)) => ModelName::Example2,
        (None, None) => bail!("limits requires --model or --rho"),
    };
    let ps = if args.p.is_empty() {
        vec![0.5]
    } else {
        args.p.clone()
    };
    println!(
        "{:<24} {:<24} {:<24} abs_diff",
        "quantity", "closed_form", "quadrature"
    );
    match model {
        ModelName::Example1 => {
            let spec = MuStarSpec::product();
            limits_row("I_mustar", 1.0, Some(numeric_i_mustar(&spec, LIMITS_TOL)?));
            limits_row("J_mustar", 0.0, Some(numeric_j_mustar(&spec, LIMITS_TOL)?));
            for p in ps {
                limits_row(&format!("pickandsish(p={p})"), 0.0, None);
            }
        }
        ModelName::Example2 => {
            let rho = args.rho.context("--model example2 requires --rho")?;
            let spec = MuStarSpec::example2(rho)?;
            limits_row(
                "I_mustar",
                hillish_limit_ex2(rho)?,
                Some(numeric_i_mustar(&spec, LIMITS_TOL)?),
            );
            limits_row(
                "J_mustar",
                kendall_limit_ex2(rho)?,
                Some(numeric_j_mustar(&spec, LIMITS_TOL)?),
            );
            for p in ps {
                limits_row(
                    &format!("pickandsish(p={p})"),
                    pickandsish_limit_ex2(rho, p)?,
                    None,
                );
            }
        }
    }
    Ok(())
}

fn cmd_marginals(args: MarginalsArgs) -> anyhow::Result<()> {
    if args.input.input.is_none() {
        bail!("marginals requires --input");
    }
    let model_args = ModelArgs {
        model: None,
        rho: None,
        n: None,
        seed: 0,
    };
    let sample = load_sample(&args.input, &model_args)?;
    let n = sample.n();
    let grid = args.grid.build(2, (n / 4).max(2))?;
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating '{}'", args.out_dir.display()))?;
    let tx = marginal_triple(sample.xs(), &grid)?;
    let ty = marginal_triple(sample.ys(), &grid)?;
    let path = args.out_dir.join("marginal_traces.csv");
    write_marginal_traces(&path, &grid, &tx, &ty)?;
    println!("wrote {}", path.display());
    Ok(())
}
