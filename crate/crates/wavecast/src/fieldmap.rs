//! Per-round field maps of a flooding broadcast, as PGM and CSV files.

use std::path::PathBuf;

use anyhow::Result;
use serde::{Deserialize, Serialize};
use wavecast_core::broadcast::{run_flood, PhaseRule, ReceptionModel, RoundLog};
use wavecast_core::nodefield::sample_field;
use wavecast_core::signal::{field_map, field_value, FieldMap, FieldModel, GridSpec, Sender, SenderSet};
use wavecast_core::{NodeField, Point2, SignalParams};

use crate::io;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldmapConfig {
    pub n: usize,
    pub radius: f64,
    pub seed: u64,
    pub params: SignalParams,
    pub models: Vec<ReceptionModel>,
    /// Maps for rounds `1..=rounds`.
    pub rounds: usize,
    pub grid: GridSpec,
    /// Phases of the MIMO senders.
    pub phase_rule: PhaseRule,
    pub output_dir: PathBuf,
}

impl FieldmapConfig {
    /// Square grid of `resolution²` cells covering the field disk.
    pub fn square_grid(radius: f64, resolution: usize) -> GridSpec {
        GridSpec { xmin: -radius, xmax: radius, ymin: -radius, ymax: radius, nx: resolution, ny: resolution }
    }
}

pub fn field_model(model: ReceptionModel) -> FieldModel {
    match model {
        ReceptionModel::Udg => FieldModel::Udg,
        ReceptionModel::Snr => FieldModel::Snr,
        ReceptionModel::Mimo => FieldModel::Mimo,
    }
}

/// Flooding run behind the maps: BFS for UDG, plain SNR flooding, and MIMO
/// flooding with the configured phases.
pub fn flood_for_maps(field: &NodeField, model: ReceptionModel, params: &SignalParams, rule: PhaseRule) -> Result<RoundLog> {
    let rule = if model == ReceptionModel::Mimo { rule } else { PhaseRule::None };
    Ok(run_flood(field, model, params, rule)?)
}

/// Transmitters of round `round` (1-based): every node informed before it.
/// Once the log is exhausted, all informed nodes transmit.
pub fn round_senders(
    field: &NodeField,
    log: &RoundLog,
    round: usize,
    params: &SignalParams,
    rule: PhaseRule,
) -> SenderSet {
    let pts = field.positions();
    let mut ids = vec![0];
    for r in log.rounds.iter().take(round.saturating_sub(1)) {
        ids.extend_from_slice(&r.newly_informed);
    }
    ids.sort_unstable();
    let senders =
        ids.iter().map(|&i| Sender::new(pts[i], params.amplitude_default, rule.phase(pts[i], i, round, params.lambda)));
    SenderSet::new(senders.collect()).expect("field positions are finite")
}

/// Writes `round_<j>_<model>.pgm` and `.csv` for every model and round and
/// returns the written paths.
pub fn emit_fieldmap(config: &FieldmapConfig) -> Result<Vec<PathBuf>> {
    config.params.validate()?;
    config.grid.validate()?;
    let field = sample_field(config.n, config.radius, config.seed)?;
    let mut written = Vec::new();
    for &model in &config.models {
        let rule = if model == ReceptionModel::Mimo { config.phase_rule } else { PhaseRule::None };
        let log = flood_for_maps(&field, model, &config.params, rule)?;
        for j in 1..=config.rounds {
            let senders = round_senders(&field, &log, j, &config.params, rule);
            let map = field_map(&senders, &config.grid, &config.params, field_model(model))?;
            written.extend(write_map(config, &map, j, model)?);
        }
    }
    Ok(written)
}

fn write_map(config: &FieldmapConfig, map: &FieldMap, round: usize, model: ReceptionModel) -> Result<[PathBuf; 2]> {
    let stem = format!("round_{}_{}", round, model.name());
    let pgm = config.output_dir.join(format!("{stem}.pgm"));
    let csv = config.output_dir.join(format!("{stem}.csv"));
    io::write_atomic(&pgm, io::fieldmap_pgm(map, config.params.beta_n0).as_bytes())?;
    io::write_atomic(&csv, &io::fieldmap_csv(map)?)?;
    Ok([pgm, csv])
}

/// Field values at `samples` equally spaced angles on a circle.
pub fn circle_profile(
    senders: &SenderSet,
    radius: f64,
    samples: usize,
    params: &SignalParams,
    model: FieldModel,
) -> Vec<f64> {
    (0..samples)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / samples as f64;
            field_value(senders, Point2::from_polar(radius, theta), params, model)
        })
        .collect()
}

/// Strict local maxima of a cyclic profile that reach `floor`.
pub fn count_angular_peaks(profile: &[f64], floor: f64) -> usize {
    let n = profile.len();
    if n < 3 {
        return 0;
    }
    (0..n)
        .filter(|&k| {
            let v = profile[k];
            v >= floor && v > profile[(k + n - 1) % n] && v > profile[(k + 1) % n]
        })
        .count()
}
