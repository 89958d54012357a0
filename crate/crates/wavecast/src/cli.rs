//! Command-line interface. `main` maps [`Status`] and errors to exit codes.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use wavecast_core::broadcast::{calibrate_c1, CalibrationSpec, PhaseRule, ReceptionModel, ScheduleKind};
use wavecast_core::interval_prover::{inequality_suite, prove_inequality, task_by_name, SuiteEntry, Verdict};
use wavecast_core::SignalParams;

use crate::config::{CalibrationProvenance, Defaults};
use crate::experiment::{run_experiment, Constants, DensityRule, ExperimentConfig};
use crate::fieldmap::{emit_fieldmap, FieldmapConfig};
use crate::fit::{fit_scaling, Transform};
use crate::io;

pub const OUT_ENV: &str = "WAVECAST_OUT";
const DEFAULT_OUT: &str = "wavecast-out";

#[derive(Debug, Parser)]
#[command(name = "wavecast", version, about = "Collaborative broadcast simulator and interval prover")]
pub struct Cli {
    /// Output directory; overrides any directory named in a config file.
    #[arg(long, global = true, env = OUT_ENV)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a (model, n, seed) grid and write logs plus an aggregate CSV.
    Simulate(SimulateArgs),
    /// Write per-round field maps of a flooding broadcast.
    Fieldmap(FieldmapArgs),
    /// Run the interval prover on one task or the whole inequality suite.
    Prove(ProveArgs),
    /// Search the largest c1 = 2^-k that passes the trigger test.
    #[command(name = "calibrate-c1")]
    CalibrateC1(CalibrateArgs),
    /// Least-squares fit of a two-column CSV.
    Fit(FitArgs),
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Passed,
    AssertionFailed,
}

fn parse_model(s: &str) -> Result<ReceptionModel, String> {
    match s.to_ascii_lowercase().as_str() {
        "udg" => Ok(ReceptionModel::Udg),
        "snr" => Ok(ReceptionModel::Snr),
        "mimo" => Ok(ReceptionModel::Mimo),
        _ => Err(format!("unknown model `{s}` (expected udg, snr or mimo)")),
    }
}

/// Seeds given as `a..b` (half-open) or a comma-separated list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedList(pub Vec<u64>);

fn parse_seed_list(s: &str) -> Result<SeedList, String> {
    parse_seeds(s).map(SeedList)
}

pub fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|e| format!("bad seed range start: {e}"))?;
        let b: u64 = b.trim().parse().map_err(|e| format!("bad seed range end: {e}"))?;
        if a >= b {
            return Err(format!("empty seed range {s}"));
        }
        return Ok((a..b).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|e| format!("bad seed `{t}`: {e}"))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleArg {
    Flood,
    ExpandingDisk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PhaseArg {
    None,
    Random,
    CenterSync,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON experiment config; flags below override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', value_parser = parse_model)]
    pub models: Option<Vec<ReceptionModel>>,
    #[arg(long = "n", value_delimiter = ',')]
    pub n_grid: Option<Vec<usize>>,
    /// `a..b` or a comma-separated list.
    #[arg(long, value_parser = parse_seed_list)]
    pub seeds: Option<SeedList>,
    /// Fixed density; conflicts with the log-multiple rule.
    #[arg(long, conflicts_with_all = ["density_c", "density_offset"])]
    pub rho: Option<f64>,
    /// Density `c·ln(n + offset)`.
    #[arg(long)]
    pub density_c: Option<f64>,
    #[arg(long)]
    pub density_offset: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, value_enum)]
    pub schedule: Option<ScheduleArg>,
    #[arg(long)]
    pub c1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FieldmapArgs {
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    #[arg(long, default_value_t = 30.0)]
    pub radius: f64,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', value_parser = parse_model, default_value = "udg,snr,mimo")]
    pub models: Vec<ReceptionModel>,
    #[arg(long, default_value_t = 4)]
    pub rounds: usize,
    /// Cells per axis of the square grid over the field.
    #[arg(long, default_value_t = 201)]
    pub resolution: usize,
    #[arg(long, value_enum, default_value_t = PhaseArg::CenterSync)]
    pub phase: PhaseArg,
    #[arg(long, default_value_t = 0)]
    pub phase_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Full,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "selection")]
pub struct ProveSelection {
    #[arg(long, value_enum)]
    pub suite: Option<SuiteArg>,
    #[arg(long)]
    pub task: Option<String>,
}

#[derive(Debug, Args)]
pub struct ProveArgs {
    #[command(flatten)]
    pub selection: ProveSelection,
    #[arg(long, default_value_t = wavecast_core::interval_prover::DEFAULT_MAX_BOXES)]
    pub max_boxes: u64,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long, default_value_t = 10_000)]
    pub n: usize,
    /// Trigger statistics at `r = k·r_1` barely depend on λ, and larger λ is cheaper.
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    #[arg(long, default_value_t = 50)]
    pub seeds: u64,
    #[arg(long, default_value_t = 100)]
    pub receivers: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,4,16")]
    pub radius_multiples: Vec<f64>,
    #[arg(long, default_value_t = 0.99)]
    pub target_rate: f64,
    #[arg(long, default_value_t = 10)]
    pub max_exponent: u32,
    /// Also write a defaults file carrying the calibrated c1.
    #[arg(long)]
    pub write_config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with header `x,y`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Transform::LogLog)]
    pub transform: Transform,
    #[arg(long)]
    pub expect_slope: Option<f64>,
    #[arg(long, default_value_t = 0.15)]
    pub tolerance: f64,
    #[arg(long)]
    pub min_r2: Option<f64>,
}

fn out_dir(cli_out: &Option<PathBuf>) -> PathBuf {
    cli_out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

pub fn run(cli: Cli) -> Result<Status> {
    match &cli.command {
        Command::Simulate(args) => simulate(args, cli.out.as_deref()),
        Command::Fieldmap(args) => fieldmap(args, &out_dir(&cli.out)),
        Command::Prove(args) => prove(args, &out_dir(&cli.out)),
        Command::CalibrateC1(args) => calibrate(args, &out_dir(&cli.out)),
        Command::Fit(args) => fit(args),
    }
}

/// Builds the experiment config: defaults, then the config file, then flags.
pub fn experiment_config(args: &SimulateArgs, out: Option<&Path>) -> Result<ExperimentConfig> {
    let defaults = Defaults::shipped();
    let mut config = match &args.config {
        Some(path) => crate::experiment::load_config(path)?,
        None => ExperimentConfig {
            models: vec![ReceptionModel::Udg, ReceptionModel::Snr, ReceptionModel::Mimo],
            n_grid: vec![1 << 10, 1 << 11, 1 << 12, 1 << 13],
            density: DensityRule::LogMultiple { c: 32.0 / std::f64::consts::PI, offset: 1.0 },
            lambda: defaults.lambda,
            seeds: (0..10).collect(),
            schedule: ScheduleKind::ExpandingDisk,
            output_dir: PathBuf::from(DEFAULT_OUT),
            constants: Constants::default(),
        },
    };
    if let Some(m) = &args.models {
        config.models = m.clone();
    }
    if let Some(n) = &args.n_grid {
        config.n_grid = n.clone();
    }
    if let Some(s) = &args.seeds {
        config.seeds = s.0.clone();
    }
    if let Some(rho) = args.rho {
        config.density = DensityRule::Fixed { rho };
    }
    if args.density_c.is_some() || args.density_offset.is_some() {
        let (c0, o0) = match config.density {
            DensityRule::LogMultiple { c, offset } => (c, offset),
            DensityRule::Fixed { .. } => (32.0 / std::f64::consts::PI, 1.0),
        };
        config.density =
            DensityRule::LogMultiple { c: args.density_c.unwrap_or(c0), offset: args.density_offset.unwrap_or(o0) };
    }
    if let Some(l) = args.lambda {
        config.lambda = l;
    }
    if let Some(s) = args.schedule {
        config.schedule = match s {
            ScheduleArg::Flood => ScheduleKind::Flood,
            ScheduleArg::ExpandingDisk => ScheduleKind::ExpandingDisk,
        };
    }
    if let Some(c1) = args.c1 {
        config.constants.c1 = c1;
    }
    if let Some(c2) = args.c2 {
        config.constants.c2 = c2;
    }
    if let Some(out) = out {
        config.output_dir = out.to_path_buf();
    }
    config.validate()?;
    Ok(config)
}

fn simulate(args: &SimulateArgs, out: Option<&Path>) -> Result<Status> {
    let config = experiment_config(args, out)?;
    let report = run_experiment(&config)?;
    io::write_json(&config.output_dir.join("config.json"), &config)?;
    io::write_json(&config.output_dir.join("report.json"), &report)?;
    println!("model  n        rho      runs  complete  median_rounds");
    for c in crate::experiment::summarize(&report.rows) {
        let median = c.median_rounds.map_or("-".to_string(), |m| format!("{m}"));
        println!("{:<6} {:<8} {:<8.2} {:<5} {:<9} {}", c.model.name(), c.n, c.rho, c.runs, c.completed, median);
    }
    for f in &report.fits {
        println!(
            "fit {}: rounds vs {} slope={:.4} intercept={:.4} r2={:.4}",
            f.model.name(),
            f.x,
            f.fit.slope,
            f.fit.intercept,
            f.fit.r_squared
        );
    }
    for f in &report.failures {
        eprintln!("run failed: {} n={} seed={}: {}", f.model.name(), f.n, f.seed, f.error);
    }
    for v in &report.violations {
        eprintln!("violation: {v}");
    }
    println!("wrote {}", config.aggregate_path().display());
    Ok(if report.violations.is_empty() { Status::Passed } else { Status::AssertionFailed })
}

fn fieldmap(args: &FieldmapArgs, out: &Path) -> Result<Status> {
    let defaults = Defaults::shipped();
    let params = SignalParams { lambda: args.lambda.unwrap_or(defaults.lambda), ..defaults.params() };
    let phase_rule = match args.phase {
        PhaseArg::None => PhaseRule::None,
        PhaseArg::Random => PhaseRule::Random { seed: args.phase_seed },
        PhaseArg::CenterSync => PhaseRule::CenterSync,
    };
    let config = FieldmapConfig {
        n: args.n,
        radius: args.radius,
        seed: args.seed,
        params,
        models: args.models.clone(),
        rounds: args.rounds,
        grid: FieldmapConfig::square_grid(args.radius, args.resolution),
        phase_rule,
        output_dir: out.to_path_buf(),
    };
    let written = emit_fieldmap(&config)?;
    println!("wrote {} files to {}", written.len(), out.display());
    Ok(Status::Passed)
}

fn prove(args: &ProveArgs, out: &Path) -> Result<Status> {
    let entries: Vec<SuiteEntry> = match (&args.selection.suite, &args.selection.task) {
        (Some(SuiteArg::Full), _) => inequality_suite(args.max_boxes),
        (None, Some(name)) => {
            let task = task_by_name(name, args.max_boxes).with_context(|| format!("unknown task `{name}`"))?;
            let result = prove_inequality(&task);
            vec![SuiteEntry { task, result }]
        }
        (None, None) => bail!("pass --suite or --task"),
    };
    let dir = out.join("proofs");
    let mut all = true;
    for e in &entries {
        io::write_json(&dir.join(format!("{}.json", e.task.name)), e)?;
        let r = &e.result;
        println!(
            "{:<32} {:<9} boxes={:<9} depth={}",
            e.task.name,
            format!("{:?}", r.verdict).to_lowercase(),
            r.boxes_processed,
            r.deepest_level
        );
        if let Some(w) = &r.witness {
            println!("    witness x={} z={} enclosure={:?}", w.x, w.z, w.enclosure);
        }
        all &= r.verdict == Verdict::Proved;
    }
    Ok(if all { Status::Passed } else { Status::AssertionFailed })
}

fn calibrate(args: &CalibrateArgs, out: &Path) -> Result<Status> {
    let defaults = Defaults::shipped();
    let params = SignalParams { lambda: args.lambda, ..defaults.params() };
    let spec = CalibrationSpec {
        n: args.n,
        c2: defaults.c2,
        seeds: args.seeds,
        receivers: args.receivers,
        radius_multiples: args.radius_multiples.clone(),
        target_rate: args.target_rate,
        max_exponent: args.max_exponent,
    };
    let report = calibrate_c1(&spec, &params)?;
    io::write_json(&out.join("calibration.json"), &report)?;
    for c in &report.cells {
        println!(
            "c1={:<10} r={:<8} d={:<10.2} rate={:.4}",
            c.c1,
            c.sender_radius,
            c.receiver_distance,
            c.rate()
        );
    }
    let Some(c1) = report.c1 else {
        eprintln!("no candidate c1 reached the target rate");
        return Ok(Status::AssertionFailed);
    };
    println!("calibrated c1 = {c1}");
    if let Some(path) = &args.write_config {
        let updated = Defaults {
            c1,
            calibration: CalibrationProvenance {
                n: args.n,
                lambda: args.lambda,
                seeds: args.seeds,
                receivers: args.receivers,
                radius_multiples: args.radius_multiples.clone(),
                target_rate: args.target_rate,
            },
            ..defaults
        };
        io::write_json(path, &updated)?;
    }
    Ok(Status::Passed)
}

#[derive(serde::Deserialize)]
struct XY {
    x: f64,
    y: f64,
}

fn fit(args: &FitArgs) -> Result<Status> {
    let mut reader =
        csv::Reader::from_path(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let points = reader
        .deserialize::<XY>()
        .map(|r| r.map(|p| (p.x, p.y)))
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("parsing {}", args.input.display()))?;
    let fit = fit_scaling(&points, args.transform)?;
    println!("{}", serde_json::to_string_pretty(&fit)?);
    let mut ok = true;
    if let Some(s) = args.expect_slope {
        ok &= (fit.slope - s).abs() <= args.tolerance;
    }
    if let Some(r2) = args.min_r2 {
        ok &= fit.r_squared >= r2;
    }
    Ok(if ok { Status::Passed } else { Status::AssertionFailed })
}
