//! Grid experiments over `(model, n, seed)` with per-run logs and an
//! aggregate CSV.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use wavecast_core::bounds::{snr_lower_schedule, snr_upper_schedule};
use wavecast_core::broadcast::{
    run_expanding_disk, run_flood, run_miso_broadcast, run_udg_flood, BroadcastConfig, MisoConstants, PhaseRule,
    ReceptionModel, RoundLog, ScheduleKind,
};
use wavecast_core::nodefield::sample_field;
use wavecast_core::{NodeField, SignalParams};

use crate::config::Defaults;
use crate::fit::{fit_scaling, ScalingFit, Transform};
use crate::io;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule")]
pub enum DensityRule {
    /// `ρ = c·ln(n + offset)`.
    LogMultiple {
        c: f64,
        #[serde(default)]
        offset: f64,
    },
    Fixed {
        rho: f64,
    },
}

impl DensityRule {
    pub fn rho(&self, n: usize) -> f64 {
        match *self {
            DensityRule::LogMultiple { c, offset } => c * (n as f64 + offset).ln(),
            DensityRule::Fixed { rho } => rho,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    pub c1: f64,
    pub c2: f64,
    pub c_f: f64,
    pub beta_n0: f64,
}

impl Default for Constants {
    fn default() -> Self {
        let d = Defaults::shipped();
        Self { c1: d.c1, c2: d.c2, c_f: d.c_f, beta_n0: d.beta_n0 }
    }
}

/// Experiment description. `schedule` selects, per model:
///
/// | model | `flood`                  | `expanding_disk`                   |
/// |-------|--------------------------|------------------------------------|
/// | UDG   | BFS flooding             | BFS flooding                       |
/// | SNR   | SNR flooding             | SNR expanding disk, `√(ρ/16)` step |
/// | MIMO  | center-synced flooding   | two-stage MISO broadcast           |
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub models: Vec<ReceptionModel>,
    pub n_grid: Vec<usize>,
    pub density: DensityRule,
    pub lambda: f64,
    pub seeds: Vec<u64>,
    pub schedule: ScheduleKind,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub constants: Constants,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.models.is_empty() || self.n_grid.is_empty() || self.seeds.is_empty() {
            bail!("models, n_grid and seeds must be nonempty");
        }
        if self.n_grid.contains(&0) {
            bail!("n_grid entries must be positive");
        }
        if self.seeds.iter().collect::<HashSet<_>>().len() != self.seeds.len() {
            bail!("seeds must be distinct");
        }
        for &n in &self.n_grid {
            let rho = self.density.rho(n);
            if !(rho > 0.0) || !rho.is_finite() {
                bail!("density rule gives rho = {rho} at n = {n}");
            }
        }
        self.params().validate()?;
        Ok(())
    }

    pub fn params(&self) -> SignalParams {
        SignalParams {
            lambda: self.lambda,
            beta_n0: self.constants.beta_n0,
            c_f: self.constants.c_f,
            amplitude_default: 1.0,
        }
    }

    pub fn field(&self, n: usize, seed: u64) -> Result<NodeField> {
        let radius = NodeField::radius_for_density(n, self.density.rho(n));
        Ok(sample_field(n, radius, seed)?)
    }

    pub fn log_path(&self, model: ReceptionModel, n: usize, seed: u64) -> PathBuf {
        self.output_dir.join("logs").join(format!("{}_n{}_seed{}.json", model.name(), n, seed))
    }

    pub fn aggregate_path(&self) -> PathBuf {
        self.output_dir.join("aggregate.csv")
    }
}

/// Runs one broadcast as selected by `config.schedule`.
pub fn run_single(config: &ExperimentConfig, model: ReceptionModel, field: &NodeField) -> Result<RoundLog> {
    let params = config.params();
    let rho = field.density();
    let log = match (model, config.schedule) {
        (ReceptionModel::Udg, _) => run_udg_flood(field),
        (ReceptionModel::Snr, ScheduleKind::Flood) => run_flood(field, model, &params, PhaseRule::None)?,
        (ReceptionModel::Snr, ScheduleKind::ExpandingDisk) => {
            let radii = snr_upper_schedule(rho, field.radius())?.radii;
            run_expanding_disk(field, &BroadcastConfig::expanding_disk(model, radii, params, PhaseRule::None))?
        }
        (ReceptionModel::Mimo, ScheduleKind::Flood) => run_flood(field, model, &params, PhaseRule::CenterSync)?,
        (ReceptionModel::Mimo, ScheduleKind::ExpandingDisk) => {
            let c = &config.constants;
            run_miso_broadcast(field, &params, MisoConstants { c1: c.c1, c2: c.c2 })?
        }
    };
    Ok(log)
}

/// One row of the aggregate CSV. Failed runs keep their row with empty
/// `rounds` and `propagation_time`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub model: ReceptionModel,
    pub n: usize,
    pub rho: f64,
    pub lambda: f64,
    pub seed: u64,
    pub rounds: Option<usize>,
    pub fully_informed: bool,
    pub propagation_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub model: ReceptionModel,
    pub n: usize,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<AggregateRow>,
    pub failures: Vec<RunFailure>,
    /// Violations of checked properties, one message each.
    pub violations: Vec<String>,
    pub fits: Vec<ModelFit>,
}

/// SNR sandwich: lower-bound rounds ≤ simulated ≤ upper prediction + 1.
pub fn snr_sandwich(rho: f64, field_radius: f64, rounds: usize) -> Option<(usize, usize, bool)> {
    let upper = snr_upper_schedule(rho, field_radius).ok()?.predicted_rounds?;
    let lower = snr_lower_schedule(rho, field_radius, None).ok()?.predicted_rounds?;
    Some((lower, upper, lower <= rounds && rounds <= upper + 1))
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let jobs: Vec<(ReceptionModel, usize, u64)> = config
        .models
        .iter()
        .flat_map(|&m| config.n_grid.iter().flat_map(move |&n| config.seeds.iter().map(move |&s| (m, n, s))))
        .collect();
    type Outcome = (AggregateRow, Option<RunFailure>, Option<String>);
    let outcomes: Vec<Result<Outcome>> = jobs
        .par_iter()
        .map(|&(model, n, seed)| -> Result<Outcome> {
            let rho = config.density.rho(n);
            let mut row = AggregateRow {
                model,
                n,
                rho,
                lambda: config.lambda,
                seed,
                rounds: None,
                fully_informed: false,
                propagation_time: None,
            };
            let field = config.field(n, seed)?;
            match run_single(config, model, &field) {
                Ok(log) => {
                    io::write_json(&config.log_path(model, n, seed), &log)?;
                    row.rounds = Some(log.total_rounds);
                    row.fully_informed = log.fully_informed;
                    row.propagation_time = Some(log.propagation_time);
                    let mut violation = None;
                    if model == ReceptionModel::Snr && config.schedule == ScheduleKind::ExpandingDisk && rho > 16.0 {
                        if let Some((lo, hi, ok)) = snr_sandwich(rho, field.radius(), log.total_rounds) {
                            if !ok {
                                violation = Some(format!(
                                    "snr n={n} seed={seed}: {} rounds outside [{lo}, {}]",
                                    log.total_rounds,
                                    hi + 1
                                ));
                            }
                        }
                    }
                    Ok((row, None, violation))
                }
                Err(e) => {
                    let failure = RunFailure { model, n, seed, error: e.to_string() };
                    Ok((row, Some(failure), None))
                }
            }
        })
        .collect();
    let mut report = ExperimentReport { rows: Vec::new(), failures: Vec::new(), violations: Vec::new(), fits: Vec::new() };
    for outcome in outcomes {
        let (row, failure, violation) = outcome?;
        report.rows.push(row);
        report.failures.extend(failure);
        report.violations.extend(violation);
    }
    io::write_atomic(&config.aggregate_path(), &io::csv_bytes(&report.rows)?)
        .with_context(|| "writing aggregate CSV")?;
    if !report.failures.is_empty() {
        io::write_json(&config.output_dir.join("failures.json"), &report.failures)?;
    }
    report.fits = model_fits(&report.rows);
    Ok(report)
}

/// Median rounds of the fully informed runs in each `(model, n)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub model: ReceptionModel,
    pub n: usize,
    pub rho: f64,
    pub runs: usize,
    pub completed: usize,
    pub median_rounds: Option<f64>,
}

pub fn summarize(rows: &[AggregateRow]) -> Vec<CellSummary> {
    let mut keys: Vec<(ReceptionModel, usize)> = Vec::new();
    for r in rows {
        if !keys.contains(&(r.model, r.n)) {
            keys.push((r.model, r.n));
        }
    }
    keys.into_iter()
        .map(|(model, n)| {
            let cell: Vec<&AggregateRow> = rows.iter().filter(|r| r.model == model && r.n == n).collect();
            let mut rounds: Vec<usize> = cell.iter().filter(|r| r.fully_informed).filter_map(|r| r.rounds).collect();
            rounds.sort_unstable();
            CellSummary {
                model,
                n,
                rho: cell[0].rho,
                runs: cell.len(),
                completed: rounds.len(),
                median_rounds: median(&rounds),
            }
        })
        .collect()
}

pub fn median(sorted: &[usize]) -> Option<f64> {
    match sorted.len() {
        0 => None,
        k if k % 2 == 1 => Some(sorted[k / 2] as f64),
        k => Some((sorted[k / 2 - 1] + sorted[k / 2]) as f64 / 2.0),
    }
}

/// Median rounds against the model's predicted growth variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub model: ReceptionModel,
    /// Which x the fit uses.
    pub x: String,
    pub fit: ScalingFit,
}

/// UDG: log-log against `√(n/ρ)`. SNR: linear against `ln n / ln ρ`. MIMO:
/// linear against `ln ln n − ln ln ρ`. Models with fewer than four usable
/// cells are skipped.
pub fn model_fits(rows: &[AggregateRow]) -> Vec<ModelFit> {
    let cells = summarize(rows);
    [ReceptionModel::Udg, ReceptionModel::Snr, ReceptionModel::Mimo]
        .into_iter()
        .filter_map(|model| {
            let pts: Vec<(f64, f64)> = cells
                .iter()
                .filter(|c| c.model == model)
                .filter_map(|c| c.median_rounds.map(|m| (growth_variable(model, c.n, c.rho), m)))
                .collect();
            let transform = if model == ReceptionModel::Udg { Transform::LogLog } else { Transform::Linear };
            let fit = fit_scaling(&pts, transform).ok()?;
            Some(ModelFit { model, x: growth_variable_name(model).to_string(), fit })
        })
        .collect()
}

pub fn growth_variable(model: ReceptionModel, n: usize, rho: f64) -> f64 {
    let n = n as f64;
    match model {
        ReceptionModel::Udg => (n / rho).sqrt(),
        ReceptionModel::Snr => n.ln() / rho.ln(),
        ReceptionModel::Mimo => n.ln().ln() - rho.ln().ln(),
    }
}

pub fn growth_variable_name(model: ReceptionModel) -> &'static str {
    match model {
        ReceptionModel::Udg => "sqrt(n/rho)",
        ReceptionModel::Snr => "ln(n)/ln(rho)",
        ReceptionModel::Mimo => "ln(ln(n)) - ln(ln(rho))",
    }
}

/// Reads a config file; a missing path gives an error with file context.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    io::read_json(path)
}
