//! `varbound`: evaluate, sweep, verify and optimize variance bounds.
//!
//! Exit status: 0 on success, 1 when a bound inequality is violated, 2 on
//! usage or configuration errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use varbound::harness::emit::render;
use varbound::harness::single::{compute_options, OptimizeTarget};
use varbound::harness::sweep::optimizer_from_config;
use varbound::harness::verify::parse_dims;
use varbound::harness::{
    parse_bound_list, run_compute, run_optimize, run_sweep, run_verification, Config, Format,
    Instance, Report, SweepSpec, VerifySpec,
};
use varbound::OptimizerConfig;

/// Default output directory when `--out` is not given. Without it, output
/// goes to stdout.
const OUT_DIR_ENV: &str = "VARBOUND_OUT_DIR";

#[derive(Parser)]
#[command(name = "varbound", version, about = "State-dependent variance bounds for pairs of observables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Every bound for one state and observable pair.
    Compute(ComputeArgs),
    /// A figure preset or custom one-parameter sweep.
    Sweep(SweepArgs),
    /// Random-ensemble check of every bound inequality.
    Verify(VerifyArgs),
    /// Basis optimization for one instance, with the restart trace.
    Optimize(OptimizeArgs),
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_parser = clap::value_parser!(Format))]
    format: Option<Format>,
    /// Output file; defaults to stdout, or to a file under $VARBOUND_OUT_DIR.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Default)]
struct OptimizerArgs {
    /// Random restarts on top of the seed starts.
    #[arg(long)]
    restarts: Option<usize>,
    /// Optimizer RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Objective evaluations per restart.
    #[arg(long)]
    max_evals: Option<usize>,
    #[arg(long)]
    step_init: Option<f64>,
    #[arg(long)]
    step_min: Option<f64>,
    /// Minimum accepted improvement.
    #[arg(long)]
    tol: Option<f64>,
}

impl OptimizerArgs {
    fn any(&self) -> bool {
        self.restarts.is_some()
            || self.seed.is_some()
            || self.max_evals.is_some()
            || self.step_init.is_some()
            || self.step_min.is_some()
            || self.tol.is_some()
    }

    fn apply(&self, mut cfg: OptimizerConfig) -> OptimizerConfig {
        if let Some(v) = self.restarts {
            cfg.restarts = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.max_evals {
            cfg.max_evals = v;
        }
        if let Some(v) = self.step_init {
            cfg.step_init = v;
        }
        if let Some(v) = self.step_min {
            cfg.step_min = v;
        }
        if let Some(v) = self.tol {
            cfg.tol = v;
        }
        cfg
    }
}

#[derive(Args)]
struct InstanceArgs {
    /// Config file with an [instance] section (flags override it).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Observable A: lx, ly, lz, sx, sy, sz or a matrix literal.
    #[arg(long = "a")]
    a: Option<String>,
    /// Observable B.
    #[arg(long = "b")]
    b: Option<String>,
    /// Pure state vector literal, normalized on read, e.g. "[1, 1i]".
    #[arg(long, group = "state_input")]
    state: Option<String>,
    /// Density matrix literal.
    #[arg(long, group = "state_input")]
    rho: Option<String>,
    /// Qubit Bloch vector "x,y,z".
    #[arg(long, group = "state_input")]
    bloch: Option<String>,
    /// Basis for the basis_* bounds; columns are the basis vectors.
    #[arg(long)]
    basis: Option<String>,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Comma-separated bound ids; all bounds by default.
    #[arg(long)]
    bounds: Option<String>,
    #[command(flatten)]
    optimizer: OptimizerArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// fig1, fig2, fig3, fig4 or custom (custom needs --config).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    theta_start: Option<f64>,
    #[arg(long)]
    theta_stop: Option<f64>,
    #[arg(long)]
    theta_count: Option<usize>,
    /// Comma-separated bound ids, replacing the preset's list.
    #[arg(long)]
    bounds: Option<String>,
    #[command(flatten)]
    optimizer: OptimizerArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Instances per dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated dimensions.
    #[arg(long)]
    dims: Option<String>,
    /// Ensemble RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// product, sum or reverse_product.
    #[arg(long, default_value = "product", value_parser = clap::value_parser!(OptimizeTarget))]
    target: OptimizeTarget,
    #[command(flatten)]
    optimizer: OptimizerArgs,
    #[command(flatten)]
    output: OutputArgs,
}

fn load_config(path: Option<&Path>) -> Result<Config> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.parse().with_context(|| format!("parsing {}", path.display()))
}

/// The config file's `[instance]` section with command-line flags on top.
fn instance(args: &InstanceArgs, cfg: &Config) -> Result<Instance> {
    let mut cfg = cfg.clone();
    let states = [("state", &args.state), ("rho", &args.rho), ("bloch", &args.bloch)];
    if states.iter().any(|(_, v)| v.is_some()) {
        for (key, _) in states {
            cfg.remove("instance", key);
        }
    }
    let flags = [("observable_a", &args.a), ("observable_b", &args.b), ("basis", &args.basis)];
    for (key, value) in states.into_iter().chain(flags) {
        if let Some(v) = value {
            cfg.set("instance", key, v);
        }
    }
    Ok(Instance::from_config(&cfg)?)
}

/// Writes `text` to `--out`, `$VARBOUND_OUT_DIR/<default_name>`, or stdout.
fn write_output(out: &OutputArgs, default_name: &str, text: &str) -> Result<()> {
    let path = out.out.clone().or_else(|| std::env::var_os(OUT_DIR_ENV).map(|d| PathBuf::from(d).join(default_name)));
    match path {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
            }
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn compute(args: ComputeArgs) -> Result<bool> {
    let cfg = load_config(args.instance.config.as_deref())?;
    let inst = instance(&args.instance, &cfg)?;
    let (mut bounds, opt) = compute_options(&cfg)?;
    if let Some(list) = &args.bounds {
        bounds = parse_bound_list(list)?;
    }
    let report = run_compute(&inst, &bounds, &args.optimizer.apply(opt))?;
    let format = args.output.format.unwrap_or(Format::Json);
    write_output(&args.output, &format!("compute.{format}"), &render(Report::Compute(&report), format)?)?;
    let violations = report.violations();
    for (id, excess) in &violations {
        eprintln!("violation: {id} off by {excess:.3e}");
    }
    Ok(violations.is_empty())
}

fn sweep(args: SweepArgs) -> Result<bool> {
    let mut cfg = load_config(args.config.as_deref())?;
    match &args.preset {
        Some(p) => cfg.set("sweep", "preset", p),
        None if args.config.is_none() => anyhow::bail!("give --preset or --config"),
        None => {}
    }
    let mut spec = SweepSpec::from_config(&cfg)?;
    if let Some(v) = args.theta_start {
        spec.grid.start = v;
    }
    if let Some(v) = args.theta_stop {
        spec.grid.stop = v;
    }
    if let Some(v) = args.theta_count {
        spec.grid.count = v;
    }
    if let Some(list) = &args.bounds {
        spec.bounds = parse_bound_list(list)?;
    }
    if args.optimizer.any() {
        spec.optimizer = Some(args.optimizer.apply(spec.optimizer.clone().unwrap_or_default()));
    }
    spec.validate()?;
    let table = run_sweep(&spec)?;
    let format = args.output.format.unwrap_or(Format::Csv);
    let name = format!("sweep-{}.{format}", spec.preset);
    write_output(&args.output, &name, &render(Report::Sweep(&table), format)?)?;
    let mut ok = true;
    for row in &table.rows {
        for (id, excess) in row.violations() {
            eprintln!("violation: theta = {} {id} off by {excess:.3e}", row.theta);
            ok = false;
        }
    }
    Ok(ok)
}

fn verify(args: VerifyArgs) -> Result<bool> {
    let cfg = load_config(args.config.as_deref())?;
    let mut spec = VerifySpec::from_config(&cfg)?;
    if let Some(n) = args.n {
        spec.n = n;
    }
    if let Some(dims) = &args.dims {
        spec.dims = parse_dims(dims)?;
    }
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let report = run_verification(&spec)?;
    let format = args.output.format.unwrap_or(Format::Json);
    let name = format!("verify-seed{}.{format}", spec.seed);
    write_output(&args.output, &name, &render(Report::Verification(&report), format)?)?;
    for v in &report.violations {
        eprintln!("violation: {} d={} #{} ({}) off by {:.3e}", v.check, v.dim, v.index, v.instance, v.slack);
    }
    Ok(report.passed())
}

fn optimize(args: OptimizeArgs) -> Result<bool> {
    let cfg = load_config(args.instance.config.as_deref())?;
    let inst = instance(&args.instance, &cfg)?;
    let opt = args.optimizer.apply(optimizer_from_config(&cfg)?);
    let out = run_optimize(&inst, args.target, &opt)?;
    let format = args.output.format.unwrap_or(Format::Json);
    write_output(&args.output, &format!("optimize.{format}"), &render(Report::Optimize(&out), format)?)?;
    if let Some(excess) = out.violation() {
        eprintln!("violation: optimized value off by {excess:.3e}");
        return Ok(false);
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Compute(a) => compute(a),
        Command::Sweep(a) => sweep(a),
        Command::Verify(a) => verify(a),
        Command::Optimize(a) => optimize(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
