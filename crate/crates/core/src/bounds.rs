//! Radius schedules and round-count predictions.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{log, pow, sqrt};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Iteration cap for schedules that converge slowly or not at all.
const MAX_SCHEDULE_LEN: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundModel {
    Udg,
    Snr,
    Mimo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Upper,
    Lower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchedulePrediction {
    pub model: BoundModel,
    pub direction: Direction,
    pub radii: Vec<f64>,
    /// 1-based index of the first radius reaching the field radius; `None`
    /// when the schedule never gets there.
    pub predicted_rounds: Option<usize>,
    /// For MIMO upper schedules: whether `r_2 ≥ 15·r_1`.
    pub growth_precondition_met: bool,
}

/// Iterates `next` from `first` until a radius reaches `field_radius`.
fn iterate(
    model: BoundModel,
    direction: Direction,
    first: f64,
    field_radius: f64,
    next: impl Fn(f64) -> f64,
) -> SchedulePrediction {
    let mut radii = vec![first];
    let mut r = first;
    while r < field_radius && radii.len() < MAX_SCHEDULE_LEN {
        let n = next(r);
        if !(n > r) || !n.is_finite() {
            break;
        }
        r = n;
        radii.push(r);
    }
    let predicted_rounds = (r >= field_radius).then_some(radii.len());
    SchedulePrediction { model, direction, radii, predicted_rounds, growth_precondition_met: true }
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(name))
    }
}

/// Expanding-disk schedule `r_1 = 1`, `r_{j+1} = ¼√ρ·r_j` up to `R`.
pub fn snr_upper_schedule(rho: f64, field_radius: f64) -> Result<SchedulePrediction> {
    if !(rho > 16.0) {
        return Err(Error::InvalidArgument("SNR schedule needs rho > 16 to expand"));
    }
    check_positive("field radius must be positive", field_radius)?;
    let factor = sqrt(rho / 16.0);
    Ok(iterate(BoundModel::Snr, Direction::Upper, 1.0, field_radius, |r| r * factor))
}

/// `(ρ/16)^{(j−1)/2}`.
pub fn snr_upper_radius(rho: f64, j: usize) -> f64 {
    pow(rho / 16.0, (j as f64 - 1.0) / 2.0)
}

/// Farthest node a round can reach from senders within `r`: `4√ρ·r`.
pub fn snr_lower_radius(rho: f64, r: f64) -> f64 {
    4.0 * sqrt(rho) * r
}

/// Seed radius `√((k/(πρ))·ln n)` for the sparse case.
pub fn snr_lower_seed_radius(k: f64, rho: f64, n: usize) -> f64 {
    sqrt(k / (PI * rho) * log(n as f64))
}

/// Iterates [`snr_lower_radius`] from `r_1` (default 1) up to `R`; its length
/// is a floor on the number of rounds of any algorithm.
pub fn snr_lower_schedule(rho: f64, field_radius: f64, r1: Option<f64>) -> Result<SchedulePrediction> {
    check_positive("rho must be positive", rho)?;
    check_positive("field radius must be positive", field_radius)?;
    let first = r1.unwrap_or(1.0);
    check_positive("seed radius must be positive", first)?;
    Ok(iterate(BoundModel::Snr, Direction::Lower, first, field_radius, |r| snr_lower_radius(rho, r)))
}

/// Farthest node coherent senders within `r` can reach: `4πρr²`.
pub fn mimo_lower_radius(rho: f64, r: f64) -> f64 {
    4.0 * PI * rho * r * r
}

/// Iterates [`mimo_lower_radius`] from `r_0` up to `R`.
pub fn mimo_lower_schedule(rho: f64, field_radius: f64, r0: f64) -> Result<SchedulePrediction> {
    check_positive("rho must be positive", rho)?;
    check_positive("field radius must be positive", field_radius)?;
    check_positive("seed radius must be positive", r0)?;
    Ok(iterate(BoundModel::Mimo, Direction::Lower, r0, field_radius, |r| mimo_lower_radius(rho, r)))
}

/// MIMO schedule `r_1 = c2/λ`, `r_{j+1} = c1·ρ·√λ·r_j^{3/2}` up to `R`.
///
/// A schedule with `r_2 < 15·r_1` is still returned, with
/// `growth_precondition_met = false`.
pub fn mimo_upper_schedule(
    rho: f64,
    lambda: f64,
    c1: f64,
    c2: f64,
    field_radius: f64,
) -> Result<SchedulePrediction> {
    check_positive("rho must be positive", rho)?;
    check_positive("lambda must be positive", lambda)?;
    check_positive("c1 must be positive", c1)?;
    check_positive("c2 must be positive", c2)?;
    check_positive("field radius must be positive", field_radius)?;
    let gain = c1 * rho * sqrt(lambda);
    let r1 = c2 / lambda;
    let mut p = iterate(BoundModel::Mimo, Direction::Upper, r1, field_radius, |r| gain * r * sqrt(r));
    p.growth_precondition_met = gain * sqrt(r1) >= 15.0;
    Ok(p)
}

/// `r_j = r_1^{(3/2)^{j−1}} · gain^{2((3/2)^{j−1}) − 2}` with `gain = c1·ρ·√λ`.
pub fn mimo_upper_radius(r1: f64, gain: f64, j: usize) -> f64 {
    let e = pow(1.5, j as f64 - 1.0);
    libm::exp(e * log(r1) + (2.0 * e - 2.0) * log(gain))
}

/// Total signal travel distance `Σ r_j` at unit speed.
pub fn propagation_time(radii: &[f64]) -> f64 {
    radii.iter().sum()
}

/// Schedule built downward from `r′_p = R` by factors `√(ρ/16)` until
/// `r′ ≤ 1`, returned in increasing order.
pub fn reverse_snr_schedule(rho: f64, field_radius: f64) -> Result<Vec<f64>> {
    if !(rho > 16.0) {
        return Err(Error::InvalidArgument("SNR schedule needs rho > 16 to expand"));
    }
    check_positive("field radius must be positive", field_radius)?;
    let factor = sqrt(rho / 16.0);
    let mut radii = vec![field_radius];
    let mut r = field_radius;
    while r > 1.0 {
        r /= factor;
        radii.push(r);
    }
    radii.reverse();
    Ok(radii)
}
