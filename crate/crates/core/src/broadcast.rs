//! Broadcast algorithms over a [`NodeField`].
//!
//! All algorithms run synchronous rounds. In each round a set of informed nodes
//! transmits together, every uninformed node is tested against the complete
//! transmitting set, and the nodes that trigger become informed for the next
//! round. Round 1 is always the source `v0` alone.

use alloc::vec;
use alloc::vec::Vec;

use libm::{ceil, log2, sqrt};
use serde::{Deserialize, Serialize};

use crate::geometry::Point2;
use crate::nodefield::{sample_field, GridIndex, NodeField};
use crate::rng;
use crate::signal::{self, center_sync_phase, random_phase, Sender, SenderSet, SignalParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReceptionModel {
    Udg,
    Snr,
    Mimo,
}

impl ReceptionModel {
    pub fn name(self) -> &'static str {
        match self {
            ReceptionModel::Udg => "udg",
            ReceptionModel::Snr => "snr",
            ReceptionModel::Mimo => "mimo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    Flood,
    ExpandingDisk,
}

/// How transmitters choose their carrier phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule")]
pub enum PhaseRule {
    /// Every sender uses phase 0.
    None,
    /// Fresh uniform phases per `(round, node)`.
    Random { seed: u64 },
    /// `φ = −2π‖v − v0‖/λ`, so every sender continues the wave leaving `v0`.
    CenterSync,
}

impl PhaseRule {
    pub fn phase(&self, position: Point2, node: usize, round: usize, lambda: f64) -> f64 {
        match *self {
            PhaseRule::None => 0.0,
            PhaseRule::Random { seed } => random_phase(seed, round as u64, node as u64),
            PhaseRule::CenterSync => center_sync_phase(position, lambda),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BroadcastConfig {
    pub model: ReceptionModel,
    pub schedule: ScheduleKind,
    /// Sender radii `r_1, r_2, …`; round `t ≥ 2` uses `r_{t−1}`. Unused for flooding.
    pub radius_schedule: Vec<f64>,
    pub params: SignalParams,
    pub phase_rule: PhaseRule,
}

impl BroadcastConfig {
    pub fn flood(model: ReceptionModel, params: SignalParams, phase_rule: PhaseRule) -> Self {
        Self { model, schedule: ScheduleKind::Flood, radius_schedule: Vec::new(), params, phase_rule }
    }

    pub fn expanding_disk(
        model: ReceptionModel,
        radius_schedule: Vec<f64>,
        params: SignalParams,
        phase_rule: PhaseRule,
    ) -> Self {
        Self { model, schedule: ScheduleKind::ExpandingDisk, radius_schedule, params, phase_rule }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.schedule == ScheduleKind::ExpandingDisk {
            if self.radius_schedule.is_empty() {
                return Err(Error::InvalidArgument("expanding disk needs a nonempty radius schedule"));
            }
            if self.radius_schedule.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
                return Err(Error::InvalidArgument("schedule radii must be finite and non-negative"));
            }
            if self.radius_schedule.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidArgument("radius schedule must be strictly increasing"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    /// Single-sender UDG rounds that seed the MISO broadcast.
    Bootstrap,
    Main,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    /// 1-based, counted across both stages.
    pub round_index: usize,
    /// Sorted ascending.
    pub newly_informed: Vec<usize>,
    /// Largest `‖v‖` over all nodes informed after this round.
    pub frontier_radius: f64,
    pub senders_active: usize,
    /// `None` when the round was not restricted to a disk.
    pub disk_radius_r_j: Option<f64>,
    pub stage: Stage,
    /// Signal travel distance of this round at unit speed.
    pub travel_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundLog {
    pub rounds: Vec<RoundRecord>,
    pub total_rounds: usize,
    pub fully_informed: bool,
    pub propagation_time: f64,
    pub cap_hit: bool,
    pub bootstrap_rounds: usize,
    pub main_rounds: usize,
}

impl RoundLog {
    /// Informed flags after the whole run.
    pub fn informed_mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        if n > 0 {
            mask[0] = true;
        }
        for r in &self.rounds {
            for &i in &r.newly_informed {
                mask[i] = true;
            }
        }
        mask
    }

    /// Number of informed nodes after the first `rounds` rounds.
    pub fn informed_after(&self, rounds: usize) -> usize {
        1 + self.rounds.iter().take(rounds).map(|r| r.newly_informed.len()).sum::<usize>()
    }

    /// Frontier radii of the main-stage rounds, in order.
    pub fn main_frontiers(&self) -> Vec<f64> {
        self.rounds.iter().filter(|r| r.stage == Stage::Main).map(|r| r.frontier_radius).collect()
    }
}

/// Round cap `10·⌈log₂ log₂ n⌉ + 100`.
pub fn round_cap(n: usize) -> usize {
    let ll = if n > 2 { ceil(log2(log2(n as f64))) as usize } else { 0 };
    10 * ll + 100
}

/// Who transmits in a round.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Transmitters {
    Source,
    Within(f64),
    All,
}

impl Transmitters {
    fn admits(self, node: usize, position: Point2) -> bool {
        match self {
            Transmitters::Source => node == 0,
            Transmitters::Within(r) => position.norm() <= r,
            Transmitters::All => true,
        }
    }

    fn disk(self) -> Option<f64> {
        match self {
            Transmitters::Within(r) => Some(r),
            _ => None,
        }
    }
}

struct Progress<'a> {
    field: &'a NodeField,
    informed: Vec<bool>,
    count: usize,
    frontier: f64,
    rounds: Vec<RoundRecord>,
}

impl<'a> Progress<'a> {
    fn new(field: &'a NodeField) -> Self {
        let mut informed = vec![false; field.len()];
        informed[0] = true;
        Self { field, informed, count: 1, frontier: 0.0, rounds: Vec::new() }
    }

    fn complete(&self) -> bool {
        self.count == self.field.len()
    }

    fn commit(&mut self, newly: Vec<usize>, senders: usize, t: Transmitters, stage: Stage, travel: f64) {
        let pts = self.field.positions();
        for &i in &newly {
            debug_assert!(!self.informed[i]);
            self.informed[i] = true;
            self.frontier = self.frontier.max(pts[i].norm());
        }
        self.count += newly.len();
        self.rounds.push(RoundRecord {
            round_index: self.rounds.len() + 1,
            newly_informed: newly,
            frontier_radius: self.frontier,
            senders_active: senders,
            disk_radius_r_j: t.disk(),
            stage,
            travel_distance: travel,
        });
    }

    /// Drops unproductive rounds at the end of the log.
    fn trim(&mut self) {
        while self.rounds.last().is_some_and(|r| r.newly_informed.is_empty()) {
            self.rounds.pop();
        }
    }

    fn finish(mut self, cap_hit: bool) -> RoundLog {
        self.trim();
        let bootstrap_rounds = self.rounds.iter().filter(|r| r.stage == Stage::Bootstrap).count();
        RoundLog {
            total_rounds: self.rounds.len(),
            fully_informed: self.complete(),
            propagation_time: self.rounds.iter().map(|r| r.travel_distance).sum(),
            cap_hit,
            bootstrap_rounds,
            main_rounds: self.rounds.len() - bootstrap_rounds,
            rounds: self.rounds,
        }
    }
}

/// BFS layers from the current informed set, restricted to `‖v‖ ≤ limit`.
/// Each layer transmits once.
fn udg_layers(progress: &mut Progress<'_>, index: &GridIndex, limit: f64, stage: Stage) {
    let pts = progress.field.positions();
    let mut frontier: Vec<usize> = (0..pts.len()).filter(|&i| progress.informed[i]).collect();
    let mut nearest = vec![f64::INFINITY; pts.len()];
    loop {
        let mut newly = Vec::new();
        for &s in &frontier {
            index.for_each_within(pts, pts[s], 1.0, |j| {
                if progress.informed[j] || pts[j].norm() > limit {
                    return;
                }
                if nearest[j] == f64::INFINITY {
                    newly.push(j);
                }
                nearest[j] = nearest[j].min(pts[j].dist(pts[s]));
            });
        }
        if newly.is_empty() {
            return;
        }
        newly.sort_unstable();
        let travel = newly.iter().map(|&j| nearest[j]).fold(0.0, f64::max);
        let senders = frontier.len();
        progress.commit(newly.clone(), senders, Transmitters::All, stage, travel);
        frontier = newly;
    }
}

/// Synchronous BFS from `v0` on the unit-disk graph. Round `t` informs
/// exactly BFS layer `t`.
pub fn run_udg_flood(field: &NodeField) -> RoundLog {
    let index = GridIndex::new(field.positions(), 1.0);
    let mut progress = Progress::new(field);
    udg_layers(&mut progress, &index, f64::INFINITY, Stage::Main);
    progress.finish(false)
}

struct Engine<'a> {
    model: ReceptionModel,
    params: SignalParams,
    phase_rule: PhaseRule,
    index: Option<GridIndex>,
    cap: usize,
    _field: &'a NodeField,
}

impl<'a> Engine<'a> {
    fn new(field: &'a NodeField, model: ReceptionModel, params: SignalParams, phase_rule: PhaseRule) -> Self {
        let index = (model == ReceptionModel::Udg).then(|| GridIndex::new(field.positions(), 1.0));
        Self { model, params, phase_rule, index, cap: round_cap(field.len()), _field: field }
    }

    fn senders(&self, progress: &Progress<'_>, t: Transmitters) -> Vec<usize> {
        let pts = progress.field.positions();
        (0..pts.len()).filter(|&i| progress.informed[i] && t.admits(i, pts[i])).collect()
    }

    /// Evaluates one round. Returns the newly triggered nodes and the travel distance.
    fn round(&self, progress: &Progress<'_>, ids: &[usize], round: usize) -> (Vec<usize>, f64) {
        let pts = progress.field.positions();
        match self.model {
            ReceptionModel::Udg => {
                let index = self.index.as_ref().expect("UDG engine builds its index");
                let mut nearest = vec![f64::INFINITY; pts.len()];
                let mut newly = Vec::new();
                for &s in ids {
                    index.for_each_within(pts, pts[s], 1.0, |j| {
                        if progress.informed[j] {
                            return;
                        }
                        if nearest[j] == f64::INFINITY {
                            newly.push(j);
                        }
                        nearest[j] = nearest[j].min(pts[j].dist(pts[s]));
                    });
                }
                newly.sort_unstable();
                let travel = newly.iter().map(|&j| nearest[j]).fold(0.0, f64::max);
                (newly, travel)
            }
            ReceptionModel::Snr | ReceptionModel::Mimo => {
                let lambda = self.params.lambda;
                let senders: Vec<Sender> = ids
                    .iter()
                    .map(|&i| {
                        let phase = self.phase_rule.phase(pts[i], i, round, lambda);
                        Sender::new(pts[i], self.params.amplitude_default, phase)
                    })
                    .collect();
                let set = SenderSet::new(senders).expect("field positions are finite");
                let newly: Vec<usize> = (0..pts.len())
                    .filter(|&q| {
                        !progress.informed[q]
                            && match self.model {
                                ReceptionModel::Snr => signal::snr_triggered(&set, pts[q], &self.params),
                                _ => signal::mimo_triggered(&set, pts[q], &self.params),
                            }
                    })
                    .collect();
                // Superposition needs the farthest sender's wave to arrive.
                let travel = newly
                    .iter()
                    .map(|&q| ids.iter().map(|&s| pts[s].dist(pts[q])).fold(0.0, f64::max))
                    .fold(0.0, f64::max);
                (newly, travel)
            }
        }
    }

    /// Runs rounds until full coverage, a fixed point, or the cap.
    /// `plan(t)` gives the transmitters of the `t`-th round of this stage.
    fn run(&self, progress: &mut Progress<'_>, plan: impl Fn(usize) -> Transmitters) -> bool {
        let mut t = 1;
        loop {
            if progress.complete() {
                return false;
            }
            if t > self.cap {
                return true;
            }
            let transmitters = plan(t);
            let ids = self.senders(progress, transmitters);
            let (newly, travel) = self.round(progress, &ids, progress.rounds.len() + 1);
            let stalled = newly.is_empty();
            progress.commit(newly, ids.len(), transmitters, Stage::Main, travel);
            // With no new nodes the next round repeats this one unless the
            // schedule admits more senders.
            if stalled && self.senders(progress, plan(t + 1)) == ids {
                return false;
            }
            t += 1;
        }
    }
}

/// Algorithm with a growing sender disk: round 1 is `v0` alone and round
/// `t ≥ 2` activates the informed nodes within `r_{t−1}` of the origin. The
/// last radius repeats once the schedule is exhausted.
pub fn run_expanding_disk(field: &NodeField, config: &BroadcastConfig) -> Result<RoundLog> {
    config.validate()?;
    if config.schedule != ScheduleKind::ExpandingDisk {
        return Err(Error::InvalidArgument("run_expanding_disk needs an expanding_disk schedule"));
    }
    let engine = Engine::new(field, config.model, config.params, config.phase_rule);
    let mut progress = Progress::new(field);
    let radii = &config.radius_schedule;
    let cap_hit = engine.run(&mut progress, |t| {
        if t == 1 {
            Transmitters::Source
        } else {
            Transmitters::Within(radii[(t - 2).min(radii.len() - 1)])
        }
    });
    Ok(progress.finish(cap_hit))
}

/// Every informed node transmits in every round. The UDG model runs as BFS.
pub fn run_flood(
    field: &NodeField,
    model: ReceptionModel,
    params: &SignalParams,
    phase_rule: PhaseRule,
) -> Result<RoundLog> {
    params.validate()?;
    if model == ReceptionModel::Udg {
        return Ok(run_udg_flood(field));
    }
    let engine = Engine::new(field, model, *params, phase_rule);
    let mut progress = Progress::new(field);
    let cap_hit = engine.run(&mut progress, |_| Transmitters::All);
    Ok(progress.finish(cap_hit))
}

/// Dispatches on `config.schedule`.
pub fn run_broadcast(field: &NodeField, config: &BroadcastConfig) -> Result<RoundLog> {
    match config.schedule {
        ScheduleKind::Flood => {
            config.validate()?;
            run_flood(field, config.model, &config.params, config.phase_rule)
        }
        ScheduleKind::ExpandingDisk => run_expanding_disk(field, config),
    }
}

/// Constants of the MISO schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MisoConstants {
    pub c1: f64,
    /// `r_1 = c2/λ`.
    pub c2: f64,
}

impl Default for MisoConstants {
    fn default() -> Self {
        Self { c1: crate::CALIBRATED_C1, c2: 1.0 }
    }
}

/// Sender radii of the MIMO stage: `s_1 = c2/λ` and
/// `s_{j+1} = (c1/15)·ρ·√λ·s_j^{3/2}`, never shrinking. Stops at the first
/// radius `≥ field_radius` or after `max_len` entries.
pub fn miso_sender_radii(rho: f64, lambda: f64, constants: MisoConstants, field_radius: f64, max_len: usize) -> Vec<f64> {
    let gain = constants.c1 / 15.0 * rho * sqrt(lambda);
    let mut radii = vec![constants.c2 / lambda];
    while radii.len() < max_len.max(1) {
        let s = *radii.last().unwrap();
        if s >= field_radius {
            break;
        }
        radii.push((gain * s * sqrt(s)).max(s));
    }
    radii
}

/// Two-stage MISO broadcast.
///
/// Stage 1 informs the disk of radius `15·r_1` by UDG flooding restricted to
/// that disk. Stage 2 runs MIMO rounds with center-synchronized phases in
/// which the informed nodes within `s_j` of the origin transmit.
pub fn run_miso_broadcast(field: &NodeField, params: &SignalParams, constants: MisoConstants) -> Result<RoundLog> {
    params.validate()?;
    if !(constants.c1 > 0.0) || !(constants.c2 > 0.0) || !constants.c1.is_finite() || !constants.c2.is_finite() {
        return Err(Error::InvalidArgument("MISO constants must be positive and finite"));
    }
    let r1 = constants.c2 / params.lambda;
    let bootstrap = 15.0 * r1;
    let index = GridIndex::new(field.positions(), 1.0);
    let mut progress = Progress::new(field);
    udg_layers(&mut progress, &index, bootstrap, Stage::Bootstrap);
    let pts = field.positions();
    let uninformed = (0..pts.len()).filter(|&i| !progress.informed[i] && pts[i].norm() <= bootstrap).count();
    if uninformed > 0 {
        return Err(Error::BootstrapFailure { radius: bootstrap, uninformed });
    }

    let engine = Engine::new(field, ReceptionModel::Mimo, *params, PhaseRule::CenterSync);
    let radii = miso_sender_radii(field.density(), params.lambda, constants, field.radius(), engine.cap + 1);
    let cap_hit = engine.run(&mut progress, |t| Transmitters::Within(radii[(t - 1).min(radii.len() - 1)]));
    Ok(progress.finish(cap_hit))
}

/// Greedy corridor routing from `from` to `to` over unit-disk hops.
///
/// Each hop moves to the neighbor inside the width-2 corridor around the
/// connecting line that advances the projection the most, and at least ¼.
/// Returns the hop sequence including both ends, or an empty path if stuck.
pub fn sector_route(field: &NodeField, from: usize, to: usize) -> Result<Vec<usize>> {
    let pts = field.positions();
    if from >= pts.len() || to >= pts.len() {
        return Err(Error::InvalidArgument("route endpoint is not a node of the field"));
    }
    let mut path = vec![from];
    if from == to {
        return Ok(path);
    }
    let (a, b) = (pts[from], pts[to]);
    let length = a.dist(b);
    let dir = (b - a) * (1.0 / length);
    let along = |p: Point2| (p - a).dot(dir);
    let across = |p: Point2| {
        let v = p - a;
        (v.x * dir.y - v.y * dir.x).abs()
    };
    let index = GridIndex::new(pts, 1.0);
    let mut cur = from;
    while path.len() <= pts.len() {
        if pts[cur].dist(b) <= 1.0 {
            path.push(to);
            return Ok(path);
        }
        let base = along(pts[cur]);
        let mut best: Option<(f64, usize)> = None;
        index.for_each_within(pts, pts[cur], 1.0, |j| {
            let gain = along(pts[j]) - base;
            if gain < 0.25 || across(pts[j]) > 1.0 {
                return;
            }
            if best.is_none_or(|(g, k)| gain > g || (gain == g && j < k)) {
                best = Some((gain, j));
            }
        });
        match best {
            Some((_, j)) => {
                path.push(j);
                cur = j;
            }
            None => return Ok(Vec::new()),
        }
    }
    Ok(Vec::new())
}

/// Trigger experiment for one sender disk: the informed disk of radius
/// `sender_radius` at density `rho` transmits with center-synchronized phases,
/// and `receivers` random receivers are tested at each distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriggerTrial {
    pub rho: f64,
    pub sender_radius: f64,
    pub receiver_distances: Vec<f64>,
    pub receivers: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriggerOutcome {
    pub receiver_distance: f64,
    pub senders: usize,
    pub receivers: usize,
    pub triggered: usize,
    pub min_energy: f64,
}

impl TriggerOutcome {
    pub fn rate(&self) -> f64 {
        if self.receivers == 0 {
            1.0
        } else {
            self.triggered as f64 / self.receivers as f64
        }
    }
}

/// Runs a [`TriggerTrial`], one outcome per receiver distance.
///
/// The disk holds `round(ρπr²)` nodes drawn by
/// [`crate::nodefield::sample_field`] with seed `substream(seed, 0)`, `v0`
/// included. Receiver angles come from `substream(seed, 1)` and are shared
/// across distances.
pub fn miso_trigger_trial(trial: &TriggerTrial, params: &SignalParams) -> Result<Vec<TriggerOutcome>> {
    params.validate()?;
    let (rho, r) = (trial.rho, trial.sender_radius);
    if !(rho > 0.0) || !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument("trigger trial needs positive density and radius"));
    }
    if trial.receiver_distances.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
        return Err(Error::InvalidArgument("receiver distances must be finite and non-negative"));
    }
    let senders = libm::round(rho * core::f64::consts::PI * r * r).max(1.0) as usize;
    let disk = sample_field(senders, r, rng::substream(trial.seed, 0))?;
    let set = SenderSet::new(
        disk.positions()
            .iter()
            .map(|&p| Sender::new(p, params.amplitude_default, center_sync_phase(p, params.lambda)))
            .collect(),
    )?;
    let angle_seed = rng::substream(trial.seed, 1);
    let angles: Vec<f64> = (0..trial.receivers)
        .map(|j| core::f64::consts::TAU * rng::unit_f64(rng::at(angle_seed, j as u64)))
        .collect();
    Ok(trial
        .receiver_distances
        .iter()
        .map(|&d| {
            let mut triggered = 0;
            let mut min_energy = f64::INFINITY;
            for &theta in &angles {
                let energy = signal::mimo_energy(&set, Point2::from_polar(d, theta), params);
                min_energy = min_energy.min(energy);
                triggered += usize::from(energy >= params.beta_n0);
            }
            TriggerOutcome { receiver_distance: d, senders, receivers: trial.receivers, triggered, min_energy }
        })
        .collect())
}

/// The three test distances `15r`, `½·c1ρr^{3/2}√λ` and `c1ρr^{3/2}√λ`.
pub fn trigger_distances(c1: f64, rho: f64, lambda: f64, r: f64) -> [f64; 3] {
    let reach = c1 * rho * r * sqrt(r) * sqrt(lambda);
    [15.0 * r, 0.5 * reach, reach]
}

/// Search space and pass rule of [`calibrate_c1`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSpec {
    /// Sets the density `ρ = 8·ln n`.
    pub n: usize,
    pub c2: f64,
    pub seeds: u64,
    pub receivers: usize,
    /// Sender radii as multiples of `r_1 = c2/λ`.
    pub radius_multiples: Vec<f64>,
    pub target_rate: f64,
    /// Candidates are `2^{-k}` for `k = 0..=max_exponent`.
    pub max_exponent: u32,
}

impl Default for CalibrationSpec {
    fn default() -> Self {
        Self {
            n: 10_000,
            c2: 1.0,
            seeds: 50,
            receivers: 100,
            radius_multiples: vec![1.0, 4.0, 16.0],
            target_rate: 0.99,
            max_exponent: 10,
        }
    }
}

impl CalibrationSpec {
    pub fn density(&self) -> f64 {
        8.0 * libm::log(self.n as f64)
    }
}

/// Pooled trigger count over all seeds for one `(c1, r, d)` cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationCell {
    pub c1: f64,
    pub sender_radius: f64,
    pub receiver_distance: f64,
    pub triggered: usize,
    pub receivers: usize,
}

impl CalibrationCell {
    pub fn rate(&self) -> f64 {
        self.triggered as f64 / self.receivers.max(1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    /// Largest passing candidate, if any.
    pub c1: Option<f64>,
    pub rho: f64,
    pub lambda: f64,
    /// Every evaluated cell, in evaluation order.
    pub cells: Vec<CalibrationCell>,
}

/// Trigger cells for one `c1`, in order of increasing sender radius. With
/// `stop_early`, evaluation ends after the first radius with a failing cell.
pub fn trigger_cells(
    c1: f64,
    spec: &CalibrationSpec,
    params: &SignalParams,
    stop_early: bool,
) -> Result<Vec<CalibrationCell>> {
    let rho = spec.density();
    let r1 = spec.c2 / params.lambda;
    let mut cells = Vec::new();
    for &m in &spec.radius_multiples {
        let r = m * r1;
        let distances = trigger_distances(c1, rho, params.lambda, r);
        let mut row: Vec<CalibrationCell> = distances
            .iter()
            .map(|&d| CalibrationCell { c1, sender_radius: r, receiver_distance: d, triggered: 0, receivers: 0 })
            .collect();
        for seed in 0..spec.seeds {
            let trial = TriggerTrial {
                rho,
                sender_radius: r,
                receiver_distances: distances.to_vec(),
                receivers: spec.receivers,
                seed,
            };
            for (cell, out) in row.iter_mut().zip(miso_trigger_trial(&trial, params)?) {
                cell.triggered += out.triggered;
                cell.receivers += out.receivers;
            }
        }
        let failed = row.iter().any(|c| c.rate() < spec.target_rate);
        cells.extend(row);
        if failed && stop_early {
            break;
        }
    }
    Ok(cells)
}

/// Largest `c1 ∈ {2^{-k}}` whose trigger cells all reach `target_rate`.
pub fn calibrate_c1(spec: &CalibrationSpec, params: &SignalParams) -> Result<CalibrationReport> {
    params.validate()?;
    if spec.n < 2 || spec.seeds == 0 || spec.receivers == 0 || spec.radius_multiples.is_empty() {
        return Err(Error::InvalidArgument("calibration needs n >= 2, seeds, receivers and radii"));
    }
    if !(spec.c2 > 0.0) || spec.radius_multiples.iter().any(|m| !(*m > 0.0)) {
        return Err(Error::InvalidArgument("calibration radii must be positive"));
    }
    let mut report = CalibrationReport { c1: None, rho: spec.density(), lambda: params.lambda, cells: Vec::new() };
    for k in 0..=spec.max_exponent {
        let c1 = libm::ldexp(1.0, -(k as i32));
        let cells = trigger_cells(c1, spec, params, true)?;
        let passed = cells.len() == 3 * spec.radius_multiples.len()
            && cells.iter().all(|c| c.rate() >= spec.target_rate);
        report.cells.extend(cells);
        if passed {
            report.c1 = Some(c1);
            break;
        }
    }
    Ok(report)
}
