//! The `bri` command line. Subcommands parse flags, call into `bri-core`,
//! and write CSV artifacts plus a manifest.

use std::ffi::OsString;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use bri_core::analysis::{mse_table, ErrorReport};
use bri_core::codec::{NodeScheme, Scheme, Threshold};
use bri_core::interp::theorem1_bound;
use bri_core::lr::{
    apply_results, lr_setup, synthetic_regression, theorem2_bound, theorem2_check, train, LearningRate, LogRow,
    LrConfig, SyntheticDesign, TrainScheme,
};
use bri_core::rng::stream_rng;
use bri_core::sim::{mean_waiting_time, relative_improvement, sample_arrivals, DelayModel, Simulator};
use bri_core::tasks::{apply_task, TaskSpec};
use bri_core::Block;
use clap::{Args, Parser, Subcommand};

use crate::{config, dataset, manifest::RunManifest, output, wallclock};

/// Environment variable that overrides configured seeds.
pub const SEED_ENV: &str = "BRI_SEED";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Config(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }
}

impl From<bri_core::Error> for CliError {
    fn from(e: bri_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "bri", version, about = "Barycentric rational coded computing experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Interpolate sin and tabulate MSE and max error over (n, d).
    Interp(InterpArgs),
    /// Run straggler simulations from a scenario file.
    Simulate(SimulateArgs),
    /// Train linear regression with coded gradients.
    Lr(LrArgs),
    /// Evaluate the interpolation or coded-gradient error bounds.
    Bounds(BoundsArgs),
}

#[derive(Debug, Args)]
pub struct InterpArgs {
    /// Node counts: comma list and/or inclusive ranges, e.g. `10,15,20,25` or `5..9`.
    #[arg(long, default_value = "10,15,20,25")]
    pub n: String,
    /// Blending degrees, same syntax as --n. Each must be below every n.
    #[arg(long, default_value = "0..9")]
    pub d: String,
    /// Interval `a,b`.
    #[arg(long, default_value = "-8,8", allow_hyphen_values = true)]
    pub interval: String,
    /// Uniform test points, endpoints included.
    #[arg(long, default_value_t = 2000)]
    pub grid: usize,
    /// `equispaced` or `chebyshev2`.
    #[arg(long, default_value = "equispaced")]
    pub nodes: String,
    /// Recorded in the manifest; the experiment itself is deterministic.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "out/interp")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario TOML file.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the scenario's trial count.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Overrides the scenario seed and BRI_SEED.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "out/simulate")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct LrArgs {
    /// Headerless CSV, label in the last column.
    #[arg(long, conflicts_with = "synthetic")]
    pub data: Option<PathBuf>,
    /// Synthetic data shape `ROWSxCOLS`.
    #[arg(long)]
    pub synthetic: Option<String>,
    /// Synthetic design: `iid` or `replicated`.
    #[arg(long, default_value = "iid")]
    pub design: String,
    /// Per-block noise of the replicated design.
    #[arg(long, default_value_t = 0.1)]
    pub perturbation: f64,
    /// Label noise of the synthetic data.
    #[arg(long, default_value_t = 1.0)]
    pub noise: f64,
    /// `bri`, `lcc`, `ep`, `uncoded` or `centralized`.
    #[arg(long, default_value = "bri")]
    pub scheme: String,
    /// Row blocks m + 1.
    #[arg(long, default_value_t = 10)]
    pub parts: usize,
    #[arg(long, default_value_t = 20)]
    pub workers: usize,
    #[arg(long, default_value_t = 0)]
    pub stragglers: usize,
    /// Encoder blending degree.
    #[arg(long, default_value_t = 0)]
    pub d: usize,
    /// Decoder blending degree (defaults to --d).
    #[arg(long)]
    pub d_decode: Option<usize>,
    /// Fixed learning rate; otherwise --eta-scale / λ_max(AᵀA).
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub eta_scale: f64,
    #[arg(long, default_value_t = 100)]
    pub iters: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Recovery threshold for the EP time model (default (m+1)²).
    #[arg(long)]
    pub ep_threshold: Option<usize>,
    /// Obtain Aᵀy from a coded round.
    #[arg(long)]
    pub coded_aty: bool,
    /// `chebyshev2` or `equispaced` worker nodes.
    #[arg(long, default_value = "chebyshev2")]
    pub nodes: String,
    /// Run workers as threads that really sleep (bri scheme only).
    #[arg(long)]
    pub wall_clock: bool,
    /// Multiplier from virtual delay seconds to real sleep seconds.
    #[arg(long, default_value_t = 1.0)]
    pub time_scale: f64,
    #[arg(long, default_value = "out/lr")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Workers N (coded-gradient bound).
    #[arg(long = "N", default_value_t = 20)]
    pub workers: usize,
    /// Stragglers S (coded-gradient bound).
    #[arg(long = "S", default_value_t = 3)]
    pub stragglers: usize,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Derivative norms `‖f^(d+1)‖,‖f^(d+2)‖`.
    #[arg(long, default_value = "1,1")]
    pub norms: String,
    /// Interpolation bound instead: number of nodes n + 1.
    #[arg(long)]
    pub points: Option<usize>,
    /// Interval `a,b` for the interpolation bound.
    #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
    pub interval: String,
    /// Largest node spacing for the interpolation bound (default equispaced).
    #[arg(long)]
    pub spacing: Option<f64>,
    /// Also compare the coded-gradient bound against decoding errors.
    #[arg(long)]
    pub check: bool,
    #[arg(long, default_value_t = 100)]
    pub draws: usize,
    /// Source blocks m + 1 = this + 1 in the check.
    #[arg(long, default_value_t = 9)]
    pub m: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("bri: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Interp(a) => cmd_interp(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Lr(a) => cmd_lr(&a),
        Command::Bounds(a) => cmd_bounds(&a),
    }
}

fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{SEED_ENV} must be an unsigned integer, got '{v}'"))),
        Err(_) => Ok(None),
    }
}

/// Flag, then `BRI_SEED`, then the fallback.
fn resolve_seed(flag: Option<u64>, fallback: u64) -> Result<u64, CliError> {
    Ok(match flag {
        Some(s) => s,
        None => env_seed()?.unwrap_or(fallback),
    })
}

/// Comma-separated integers and inclusive `a..b` ranges.
pub fn parse_int_list(text: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| format!("bad range start in '{part}'"))?;
            let b: usize = b
                .trim()
                .trim_start_matches('=')
                .parse()
                .map_err(|_| format!("bad range end in '{part}'"))?;
            if b < a {
                return Err(format!("empty range '{part}'"));
            }
            out.extend(a..=b);
        } else {
            out.push(
                part.parse()
                    .map_err(|_| format!("'{part}' is not a non-negative integer"))?,
            );
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

pub fn parse_pair(text: &str) -> Result<(f64, f64), String> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| format!("expected 'a,b', got '{text}'"))?;
    let a: f64 = a.trim().parse().map_err(|_| format!("bad number '{a}'"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("bad number '{b}'"))?;
    Ok((a, b))
}

fn parse_node_scheme(text: &str) -> Result<NodeScheme, CliError> {
    match text.parse() {
        Ok(NodeScheme::Custom) | Err(_) => Err(CliError::Usage(format!(
            "node scheme must be equispaced or chebyshev2, got '{text}'"
        ))),
        Ok(s) => Ok(s),
    }
}

fn create_out(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    std::fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

/// The reports `interp` would write, without touching the filesystem.
pub fn interp_reports(args: &InterpArgs) -> Result<Vec<ErrorReport>, CliError> {
    let ns = parse_int_list(&args.n).map_err(|e| CliError::Usage(format!("--n: {e}")))?;
    let ds = parse_int_list(&args.d).map_err(|e| CliError::Usage(format!("--d: {e}")))?;
    let interval = parse_pair(&args.interval).map_err(|e| CliError::Usage(format!("--interval: {e}")))?;
    if interval.0.partial_cmp(&interval.1) != Some(std::cmp::Ordering::Less) {
        return Err(CliError::Usage("--interval: need a < b".into()));
    }
    if args.grid < 100 {
        return Err(CliError::Usage("--grid must be at least 100".into()));
    }
    let scheme = parse_node_scheme(&args.nodes)?;
    if let Some(&n) = ns.iter().find(|&&n| n < 2) {
        return Err(CliError::Usage(format!("--n: need at least 2 nodes, got {n}")));
    }
    let n_min = *ns.iter().min().expect("non-empty");
    if let Some(&d) = ds.iter().find(|&&d| d >= n_min) {
        return Err(CliError::Usage(format!("--d: degree {d} must be below n = {n_min}")));
    }
    Ok(mse_table(&ns, &ds, interval, args.grid, scheme)?)
}

fn cmd_interp(args: &InterpArgs) -> Result<(), CliError> {
    let reports = interp_reports(args)?;
    let seed = resolve_seed(args.seed, 0)?;
    output::write_mse_table(create_out(&args.out, "mse_table.csv")?, &reports)?;
    let mut m = RunManifest::new("interp", None, seed, &args.out);
    m.add_artifact("mse_table.csv")?;
    m.write()?;
    print!("{}", output::format_mse_grid(&reports));
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let mut scenario = config::load_scenario(&args.config).map_err(|e| CliError::Config(e.to_string()))?;
    scenario.seed = resolve_seed(args.seed, scenario.seed)?;
    if let Some(t) = args.trials {
        if t == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        scenario.trials = t;
    }
    if !scenario.in_bound_regime() {
        eprintln!(
            "bri: warning: S = {} is outside S < N - 2 = {}; the coded-gradient error bound does not apply",
            scenario.stragglers,
            scenario.workers.saturating_sub(2)
        );
    }
    let schemes: Vec<Scheme> = scenario.schemes.iter().map(|s| s.scheme).collect();
    let fixed: Vec<(Scheme, usize)> = scenario
        .schemes
        .iter()
        .filter_map(|s| match s.threshold(scenario.m, scenario.task.degree) {
            Threshold::Fixed(k) => Some((s.scheme, k)),
            Threshold::All => Some((s.scheme, scenario.workers)),
            Threshold::Flexible => None,
        })
        .collect();
    for (s, k) in &fixed {
        if *k > scenario.workers {
            eprintln!(
                "bri: warning: {s} threshold {k} exceeds N = {}; every trial fails",
                scenario.workers
            );
        }
    }
    let seed = scenario.seed;
    let sim = Simulator::new(scenario)?;
    let records = sim.run_all()?;
    output::write_trials(create_out(&args.out, "trials.csv")?, &records)?;
    output::write_cdf(create_out(&args.out, "cdf.csv")?, &records, &schemes)?;
    let mut m = RunManifest::new("simulate", Some(&args.config), seed, &args.out);
    m.add_artifact("trials.csv")?;
    m.add_artifact("cdf.csv")?;
    m.write()?;

    println!("{:<8} {:>14} {:>8}", "scheme", "mean_wait_s", "failed");
    for &s in &schemes {
        let failed = records.iter().filter(|r| r.scheme == s && r.failed).count();
        println!(
            "{:<8} {:>14.6e} {:>8}",
            s.name(),
            mean_waiting_time(&records, s)?,
            failed
        );
    }
    if schemes.contains(&Scheme::Bri) {
        for (s, _) in &fixed {
            for q in [0.8, 1.0] {
                if let Ok(v) = relative_improvement(&records, Scheme::Bri, *s, q) {
                    println!("BRI vs {s} at CDF={q}: {:.2}% lower", 100.0 * v);
                }
            }
        }
    }
    Ok(())
}

fn parse_shape(text: &str) -> Result<(usize, usize), String> {
    let (r, c) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected ROWSxCOLS, got '{text}'"))?;
    let r: usize = r.trim().parse().map_err(|_| format!("bad row count '{r}'"))?;
    let c: usize = c.trim().parse().map_err(|_| format!("bad column count '{c}'"))?;
    if r == 0 || c == 0 {
        return Err("shape must be positive".into());
    }
    Ok((r, c))
}

/// Builds the config and data for `lr` without running it.
pub fn lr_inputs(args: &LrArgs) -> Result<(LrConfig, Block, Vec<f64>, TrainScheme), CliError> {
    let scheme: TrainScheme = args
        .scheme
        .parse()
        .map_err(|e: bri_core::Error| CliError::Usage(e.to_string()))?;
    let seed = resolve_seed(args.seed, 0)?;
    let (a, y) = match (&args.data, &args.synthetic) {
        (Some(path), None) => {
            let ds = dataset::load(path).map_err(|e| match e {
                dataset::DatasetError::Io(io) => CliError::Runtime(format!("{}: {io}", path.display())),
                other => CliError::Config(format!("{}: {other}", path.display())),
            })?;
            (ds.features, ds.labels)
        }
        (None, Some(shape)) => {
            let (rows, cols) = parse_shape(shape).map_err(|e| CliError::Usage(format!("--synthetic: {e}")))?;
            let design = match args.design.as_str() {
                "iid" => SyntheticDesign::Iid,
                "replicated" => SyntheticDesign::Replicated {
                    parts: args.parts,
                    perturbation: args.perturbation,
                },
                other => return Err(CliError::Usage(format!("--design: unknown design '{other}'"))),
            };
            synthetic_regression(rows, cols, args.noise, design, seed)?
        }
        _ => return Err(CliError::Usage("give exactly one of --data or --synthetic".into())),
    };
    if args.parts == 0 || args.parts > a.rows() {
        return Err(CliError::Usage(format!(
            "--parts must be between 1 and the row count {}",
            a.rows()
        )));
    }
    if args.d >= args.parts {
        return Err(CliError::Usage(format!("--d must be below --parts = {}", args.parts)));
    }
    if args.stragglers > args.workers || args.workers == 0 {
        return Err(CliError::Usage("--stragglers must not exceed --workers".into()));
    }
    if args.iters == 0 {
        return Err(CliError::Usage("--iters must be at least 1".into()));
    }
    let mut cfg = LrConfig::new(args.parts, args.workers, args.stragglers, args.d);
    cfg.d_decode = args.d_decode;
    cfg.learning_rate = match args.eta {
        Some(v) if v.is_finite() && v >= 0.0 => LearningRate::Fixed(v),
        Some(_) => return Err(CliError::Usage("--eta must be finite and non-negative".into())),
        None => LearningRate::PowerIteration { scale: args.eta_scale },
    };
    cfg.iterations = args.iters;
    cfg.delay = DelayModel::flop_proportional(a.rows().div_ceil(args.parts), a.cols());
    cfg.seed = seed;
    cfg.coded_aty = args.coded_aty;
    cfg.ep_threshold = args.ep_threshold;
    cfg.node_scheme = parse_node_scheme(&args.nodes)?;
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok((cfg, a, y, scheme))
}

fn cmd_lr(args: &LrArgs) -> Result<(), CliError> {
    let (cfg, a, y, scheme) = lr_inputs(args)?;
    let (problem, state) = lr_setup(&a, &y, &cfg)?;
    let rows = if args.wall_clock {
        if scheme != TrainScheme::Bri {
            return Err(CliError::Usage("--wall-clock supports --scheme bri only".into()));
        }
        wall_clock_training(&problem, state, &cfg, args.time_scale)?
    } else {
        train(&problem, &state, &cfg, scheme)?.rows
    };
    output::write_training_log(create_out(&args.out, "training_log.csv")?, &rows)?;
    let mut m = RunManifest::new("lr", args.data.as_deref(), cfg.seed, &args.out);
    m.add_artifact("training_log.csv")?;
    m.write()?;
    let last = rows.last().expect("at least one iteration");
    println!(
        "{scheme}: {} iterations, final loss {:.6e}, time {:.6e} s",
        last.iteration, last.loss, last.time
    );
    Ok(())
}

fn wall_clock_training(
    problem: &bri_core::lr::LrProblem,
    mut state: bri_core::lr::LrState,
    cfg: &LrConfig,
    time_scale: f64,
) -> Result<Vec<LogRow>, CliError> {
    if !(time_scale.is_finite() && time_scale >= 0.0) {
        return Err(CliError::Usage("--time-scale must be finite and non-negative".into()));
    }
    let shares = Arc::new(problem.shares.clone());
    let k = (cfg.workers - cfg.stragglers).max(1);
    let mut rows = Vec::with_capacity(cfg.iterations);
    let mut clock = 0.0;
    for it in 0..cfg.iterations {
        let arrivals = sample_arrivals(
            &cfg.delay,
            cfg.workers,
            cfg.stragglers,
            &mut stream_rng(cfg.seed, it as u64),
        );
        let w = state.w.clone();
        let shares = Arc::clone(&shares);
        let work: wallclock::Work = Arc::new(move |i| {
            let out = apply_task(&TaskSpec::matvec(), &shares[i].block, Some(&w)).expect("share shapes match weights");
            (shares[i].z, out)
        });
        let (results, elapsed) = wallclock::run_round(&arrivals, time_scale, k, work);
        let stats = apply_results(problem, &mut state, cfg.decode_degree(), &results)?;
        clock += elapsed;
        rows.push(LogRow {
            iteration: state.iteration,
            loss: *state.loss_history.last().expect("step appends a loss"),
            grad_error_rel: stats.grad_error_rel,
            k_used: stats.k_used,
            time: clock,
        });
    }
    Ok(rows)
}

fn cmd_bounds(args: &BoundsArgs) -> Result<(), CliError> {
    let (n1, n2) = parse_pair(&args.norms).map_err(|e| CliError::Usage(format!("--norms: {e}")))?;
    if let Some(points) = args.points {
        let (a, b) = parse_pair(&args.interval).map_err(|e| CliError::Usage(format!("--interval: {e}")))?;
        if points < 2 {
            return Err(CliError::Usage("--points must be at least 2".into()));
        }
        let h = args.spacing.unwrap_or((b - a) / (points - 1) as f64);
        let bound = theorem1_bound(args.d, points, a, b, h, n1, n2).map_err(hypothesis_as_usage)?;
        println!("{bound:.6e}");
        return Ok(());
    }
    let bound = theorem2_bound(args.workers, args.stragglers, args.d, n1, n2).map_err(hypothesis_as_usage)?;
    println!("{bound:.5}");
    if args.check {
        let seed = resolve_seed(args.seed, 0)?;
        let check = theorem2_check(args.workers, args.stragglers, args.d, args.m, args.draws, seed)?;
        println!(
            "check: {} draws, {} violations, worst error/bound {:.3e}",
            check.draws, check.violations, check.worst_ratio
        );
        if check.violations > 0 {
            return Err(CliError::Runtime(format!("{} bound violations", check.violations)));
        }
    }
    Ok(())
}

fn hypothesis_as_usage(e: bri_core::Error) -> CliError {
    match e {
        bri_core::Error::Hypothesis(_) | bri_core::Error::InvalidParameter(_) => CliError::Usage(e.to_string()),
        other => other.into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn int_lists() {
        assert_eq!(parse_int_list("0..3").unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(parse_int_list("10,15, 20,25").unwrap(), vec![10, 15, 20, 25]);
        assert_eq!(parse_int_list("1,4..5").unwrap(), vec![1, 4, 5]);
        assert!(parse_int_list("3..1").is_err());
        assert!(parse_int_list("").is_err());
    }

    #[test]
    fn shapes_and_pairs() {
        assert_eq!(parse_shape("2000x20").unwrap(), (2000, 20));
        assert!(parse_shape("20").is_err());
        assert_eq!(parse_pair("-8, 8").unwrap(), (-8.0, 8.0));
    }
}
