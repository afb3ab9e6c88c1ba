//! Command-line front end: single experiments, benchmark suites, plot data and kernel
//! inspection.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use pao::harness::{
    aggregate_convergence, emit_plot_data, read_records, run_suite, write_summary_csv,
    BenchmarkSuite, ExperimentConfig, SuiteSummary, SummaryRow,
};
use pao::{
    build_kernel, AttractorSpec, BenchmarkKind, BoundsPolicy, Hyperparams, NoiseModel, OptimizerId,
    Registry, VelocityInit,
};

#[derive(Debug, Parser)]
#[command(
    name = "pao",
    version,
    about = "Particle attractor optimisation and baseline benchmarking"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one optimiser on one problem for a number of seeded repetitions.
    Run(RunArgs),
    /// Run a preset suite of every optimiser on every problem.
    Bench(BenchArgs),
    /// Turn run records into per-problem convergence CSV files.
    PlotData(PlotDataArgs),
    /// Print the discretised transition kernel for a set of hyperparameters.
    KernelInfo(KernelInfoArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Flat JSON config; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    optimizer: Option<OptimizerId>,
    #[arg(long)]
    problem: Option<BenchmarkKind>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    pop: Option<usize>,
    #[arg(long)]
    gens: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// JSONL output file; a directory receives `records.jsonl`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    pao: PaoArgs,
    #[arg(long)]
    griewangk_denominator: Option<f64>,
    /// Write `duration_ms` as 0 so repeated runs compare byte for byte.
    #[arg(long)]
    no_timing: bool,
}

/// PAO-specific settings shared by `run`.
#[derive(Debug, Args)]
struct PaoArgs {
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    zeta: Option<f64>,
    /// Per-attractor stiffnesses, comma separated.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<f64>>,
    #[arg(long)]
    q0: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Attractor specs, comma separated (e.g. `localbest,globalbest`).
    #[arg(long, value_delimiter = ',')]
    attractors: Option<Vec<AttractorSpec>>,
    #[arg(long)]
    bounds_policy: Option<BoundsPolicy>,
    #[arg(long)]
    velocity_init: Option<VelocityInit>,
    #[arg(long)]
    noise_model: Option<NoiseModel>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// `2d`, `8d` or `all`.
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 20)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory receiving `records.jsonl` and `summary.csv`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    pop: Option<usize>,
    #[arg(long)]
    gens: Option<usize>,
    #[arg(long)]
    no_timing: bool,
}

#[derive(Debug, Args)]
struct PlotDataArgs {
    /// JSONL file, or directory of `*.jsonl` files.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct KernelInfoArgs {
    #[arg(long, default_value_t = 1.0)]
    m: f64,
    #[arg(long, default_value_t = 0.2)]
    zeta: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.0])]
    k: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    q0: f64,
    #[arg(long, default_value_t = 1.0)]
    dt: f64,
    /// Print a JSON object instead of the text report.
    #[arg(long)]
    json: bool,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Bench(args) => bench(args),
        Command::PlotData(args) => plot_data(args),
        Command::KernelInfo(args) => kernel_info(args),
    }
}

fn experiment_config(args: RunArgs) -> Result<ExperimentConfig> {
    let mut c = match &args.config {
        Some(path) => {
            ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?
        }
        None => ExperimentConfig::default(),
    };
    macro_rules! set {
        ($($field:ident <- $value:expr),* $(,)?) => {
            $(if let Some(v) = $value { c.$field = v; })*
        };
    }
    let p = args.pao;
    set!(
        optimizer <- args.optimizer,
        problem <- args.problem,
        dim <- args.dim,
        pop <- args.pop,
        gens <- args.gens,
        reps <- args.reps,
        seed <- args.seed,
        m <- p.m,
        zeta <- p.zeta,
        k <- p.k,
        q0 <- p.q0,
        dt <- p.dt,
        attractors <- p.attractors,
        bounds_policy <- p.bounds_policy,
        velocity_init <- p.velocity_init,
        noise_model <- p.noise_model,
        griewangk_denominator <- args.griewangk_denominator,
    );
    if args.out.is_some() {
        c.out = args.out;
    }
    if args.no_timing {
        c.record_timing = false;
    }
    c.validate()?;
    Ok(c)
}

/// A directory (existing, or spelled with a trailing separator) gets `records.jsonl`.
fn records_path(out: &Path) -> PathBuf {
    let as_dir = out.is_dir()
        || out
            .as_os_str()
            .to_string_lossy()
            .ends_with(std::path::MAIN_SEPARATOR);
    if as_dir {
        out.join("records.jsonl")
    } else {
        out.to_path_buf()
    }
}

fn run(args: RunArgs) -> Result<()> {
    let c = experiment_config(args)?;
    let out = c
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("records.jsonl"));
    let registry = Registry::with_pao(c.pao_config());
    let summary = run_suite(&c.suite(), &registry, &records_path(&out))?;
    print_summary(&summary);
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let mut suite = BenchmarkSuite::preset(&args.suite, args.reps, args.seed)?;
    if let Some(pop) = args.pop {
        suite.pop = pop;
    }
    if let Some(gens) = args.gens {
        suite.gens = gens;
    }
    suite.record_timing = !args.no_timing;
    std::fs::create_dir_all(&args.out)?;
    let summary = run_suite(
        &suite,
        &Registry::with_defaults(),
        &args.out.join("records.jsonl"),
    )?;
    let csv = args.out.join("summary.csv");
    write_summary_csv(&csv, &summary.rows)?;
    print_summary(&summary);
    println!("summary: {}", csv.display());
    Ok(())
}

fn print_summary(summary: &SuiteSummary) {
    println!(
        "{} run(s) written to {}",
        summary.records,
        summary.records_path.display()
    );
    println!(
        "{:<10} {:<22} {:>4} {:>5} {:>12} {:>12} {:>12}",
        "optimizer", "problem", "dim", "runs", "median", "mean", "stddev"
    );
    for SummaryRow {
        optimizer,
        problem,
        dim,
        runs,
        median,
        mean,
        stddev,
    } in &summary.rows
    {
        let optimizer = optimizer.name();
        println!("{optimizer:<10} {problem:<22} {dim:>4} {runs:>5} {median:>12.4e} {mean:>12.4e} {stddev:>12.4e}");
    }
}

fn plot_data(args: PlotDataArgs) -> Result<()> {
    let records =
        read_records(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    if records.is_empty() {
        bail!("no run records found in {}", args.input.display());
    }
    let curves = aggregate_convergence(&records)?;
    for path in emit_plot_data(&curves, &args.out)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn rows<M: std::ops::Index<(usize, usize), Output = f64>>(m: &M) -> [[f64; 2]; 2] {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

fn kernel_info(args: KernelInfoArgs) -> Result<()> {
    let hp = Hyperparams {
        m: args.m,
        zeta: args.zeta,
        k: args.k,
        q0: args.q0,
        dt: args.dt,
    };
    hp.validate()?;
    let kernel = build_kernel(&hp)?;
    let sigma = kernel.sigma_unit * hp.q0;
    let h = kernel.h * hp.q0.sqrt();
    let moduli = kernel.eigen_moduli();
    if args.json {
        let v = serde_json::json!({
            "k_total": hp.total_stiffness(),
            "F": rows(kernel.drift.matrix()),
            "A": rows(&kernel.a),
            "Sigma": rows(&sigma),
            "H": rows(&h),
            "eigen_moduli": moduli,
        });
        println!("{}", serde_json::to_string_pretty(&v)?);
        return Ok(());
    }
    println!(
        "m = {}, zeta = {}, k' = {}, q0 = {}, dt = {}",
        hp.m,
        hp.zeta,
        hp.total_stiffness(),
        hp.q0,
        hp.dt
    );
    for (name, m) in [
        ("F (drift)", *kernel.drift.matrix()),
        ("A (transition)", kernel.a),
        ("Sigma (covariance at q0, unit spread)", sigma),
        ("H (Cholesky factor of Sigma)", h),
    ] {
        println!("{name}:");
        for r in rows(&m) {
            println!("  [{:>15.8e} {:>15.8e}]", r[0], r[1]);
        }
    }
    println!("eigenvalue moduli of A: {:.8} {:.8}", moduli[0], moduli[1]);
    let verdict = if moduli[0] < 1.0 {
        "contracting"
    } else {
        "not contracting"
    };
    println!("spectral radius {:.8} ({verdict})", moduli[0]);
    Ok(())
}
