//! Reception physics: coherent phasor sums (MIMO), incoherent energy sums
//! (SNR) and the unit-disk rule, plus numerical oracles for the closed forms.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};
use core::ops::Add;

use libm::{cos, sincos, sqrt};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::{delta_d, Point2};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalParams {
    /// Carrier wavelength in units of the unit-disk radius.
    pub lambda: f64,
    /// Product of the reception threshold and the noise energy.
    pub beta_n0: f64,
    /// The path-loss denominator is clamped at `c_f · lambda`.
    pub c_f: f64,
    pub amplitude_default: f64,
}

impl Default for SignalParams {
    fn default() -> Self {
        Self { lambda: 0.1, beta_n0: 1.0, c_f: 2.0, amplitude_default: 1.0 }
    }
}

impl SignalParams {
    pub fn with_lambda(lambda: f64) -> Self {
        Self { lambda, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidArgument("wavelength must be positive"));
        }
        if !(self.beta_n0 > 0.0) {
            return Err(Error::InvalidArgument("beta_n0 must be positive"));
        }
        if !(self.c_f > 0.0) || self.c_f * self.lambda > 1.0 {
            return Err(Error::InvalidArgument("near-field cutoff needs 0 < c_f·lambda <= 1"));
        }
        if !(self.amplitude_default >= 0.0) {
            return Err(Error::InvalidArgument("amplitude must be non-negative"));
        }
        Ok(())
    }

    pub fn near_field(&self) -> f64 {
        self.c_f * self.lambda
    }

    pub fn wavenumber(&self) -> f64 {
        TAU / self.lambda
    }

    /// Received amplitude `a / max(dist, c_f·λ)`.
    #[inline]
    pub fn attenuated(&self, amplitude: f64, dist: f64) -> f64 {
        amplitude / dist.max(self.near_field())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sender {
    pub position: Point2,
    pub amplitude: f64,
    /// Phase offset in radians, stored in `[0, 2π)`.
    pub phase: f64,
}

impl Sender {
    pub fn new(position: Point2, amplitude: f64, phase: f64) -> Self {
        Self { position, amplitude, phase: wrap_phase(phase) }
    }
}

/// Reduces a phase into `[0, 2π)`.
pub fn wrap_phase(phase: f64) -> f64 {
    let r = libm::fmod(phase, TAU);
    let r = if r < 0.0 { r + TAU } else { r };
    if r >= TAU { 0.0 } else { r }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SenderSet {
    senders: Vec<Sender>,
}

impl SenderSet {
    pub fn new(senders: Vec<Sender>) -> Result<Self> {
        for s in &senders {
            if !(s.amplitude >= 0.0) || !s.amplitude.is_finite() {
                return Err(Error::InvalidArgument("sender amplitude must be finite and >= 0"));
            }
            if !s.position.is_finite() || !s.phase.is_finite() {
                return Err(Error::InvalidArgument("sender position and phase must be finite"));
            }
        }
        Ok(Self { senders })
    }

    pub fn senders(&self) -> &[Sender] {
        &self.senders
    }

    pub fn len(&self) -> usize {
        self.senders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.senders.is_empty()
    }

    /// Disjoint union, keeping `self` first.
    pub fn union(&self, other: &SenderSet) -> SenderSet {
        let mut senders = self.senders.clone();
        senders.extend_from_slice(&other.senders);
        SenderSet { senders }
    }

    /// Sorts senders into a canonical order so that sums become independent of
    /// the order in which they were supplied.
    pub fn canonicalize(&mut self) {
        self.senders.sort_by(|a, b| {
            let key = |s: &Sender| (s.position.x, s.position.y, s.amplitude, s.phase);
            let (ka, kb) = (key(a), key(b));
            ka.0.total_cmp(&kb.0)
                .then(ka.1.total_cmp(&kb.1))
                .then(ka.2.total_cmp(&kb.2))
                .then(ka.3.total_cmp(&kb.3))
        });
    }
}

const PAIRWISE_BLOCK: usize = 32;

/// Pairwise (tree) summation of `term(0) + … + term(n−1)`.
pub fn pairwise_sum<T, F>(n: usize, zero: T, term: &F) -> T
where
    T: Copy + Add<Output = T>,
    F: Fn(usize) -> T,
{
    fn rec<T: Copy + Add<Output = T>, F: Fn(usize) -> T>(lo: usize, hi: usize, zero: T, term: &F) -> T {
        if hi - lo <= PAIRWISE_BLOCK {
            let mut acc = zero;
            for i in lo..hi {
                acc = acc + term(i);
            }
            acc
        } else {
            let mid = lo + (hi - lo) / 2;
            rec(lo, mid, zero, term) + rec(mid, hi, zero, term)
        }
    }
    rec(0, n, zero, term)
}

#[inline]
fn phase_term(s: &Sender, q: Point2, params: &SignalParams, reference: f64) -> Complex64 {
    sender_phasor(s.position, s.amplitude, s.phase, q, params, reference)
}

/// One sender's contribution `b·e^{i(φ − k·dist − reference)}` at `q`.
#[inline]
pub fn sender_phasor(
    position: Point2,
    amplitude: f64,
    phase: f64,
    q: Point2,
    params: &SignalParams,
    reference: f64,
) -> Complex64 {
    let dist = position.dist(q);
    let b = params.attenuated(amplitude, dist);
    let (sin, cos) = sincos(phase - params.wavenumber() * dist - reference);
    Complex64::new(b * cos, b * sin)
}

/// Stationary demodulation output `z = Σ b_j e^{i(φ_j − 2π‖q − v_j‖/λ)}`.
pub fn received_phasor(senders: &SenderSet, q: Point2, params: &SignalParams) -> Complex64 {
    let s = senders.senders();
    pairwise_sum(s.len(), Complex64::new(0.0, 0.0), &|i| phase_term(&s[i], q, params, 0.0))
}

/// `|z|²`, summed relative to the first sender's phase. The modulus is
/// unchanged, but a single sender yields exactly `b²`.
pub fn mimo_energy(senders: &SenderSet, q: Point2, params: &SignalParams) -> f64 {
    let s = senders.senders();
    let Some(first) = s.first() else { return 0.0 };
    let reference = first.phase - params.wavenumber() * first.position.dist(q);
    pairwise_sum(s.len(), Complex64::new(0.0, 0.0), &|i| phase_term(&s[i], q, params, reference))
        .norm_sqr()
}

pub fn mimo_triggered(senders: &SenderSet, q: Point2, params: &SignalParams) -> bool {
    mimo_energy(senders, q, params) >= params.beta_n0
}

/// `RS = Σ a_j² / max(‖q − v_j‖, c_f λ)²`.
pub fn snr_received_energy(senders: &SenderSet, q: Point2, params: &SignalParams) -> f64 {
    let s = senders.senders();
    pairwise_sum(s.len(), 0.0, &|i| {
        let b = params.attenuated(s[i].amplitude, s[i].position.dist(q));
        b * b
    })
}

pub fn snr_triggered(senders: &SenderSet, q: Point2, params: &SignalParams) -> bool {
    snr_received_energy(senders, q, params) >= params.beta_n0
}

pub fn udg_triggered(sender: Point2, q: Point2) -> bool {
    sender.dist(q) <= 1.0
}

/// Time-domain oracle for [`received_phasor`].
///
/// Each sender emits the real carrier `a_j cos(2πt/λ + φ_j)` from `t = 0`. The
/// receiver correlates `rx(t)` with `2e^{−i2πt/λ}` over a steady-state window of
/// length `delta` (rounded down to whole half periods), using the trapezoid rule.
pub fn demodulate_numeric(
    senders: &SenderSet,
    q: Point2,
    params: &SignalParams,
    delta: f64,
    steps: usize,
) -> Result<Complex64> {
    params.validate()?;
    if !(delta >= 50.0 * params.lambda) {
        return Err(Error::InvalidArgument("demodulation window must be at least 50 wavelengths"));
    }
    if steps < 10_000 {
        return Err(Error::InvalidArgument("demodulation needs at least 10^4 steps"));
    }
    let s = senders.senders();
    if s.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let half_period = 0.5 * params.lambda;
    let window = libm::floor(delta / half_period) * half_period;
    let start = s.iter().map(|x| x.position.dist(q)).fold(0.0, f64::max);
    let k = params.wavenumber();
    let paths: Vec<(f64, f64)> = s
        .iter()
        .map(|x| {
            let dist = x.position.dist(q);
            (dist, params.attenuated(x.amplitude, dist))
        })
        .collect();
    let h = window / steps as f64;
    let sample = |j: usize| {
        let tau = j as f64 * h;
        let t = start + tau;
        let rx: f64 = s
            .iter()
            .zip(&paths)
            .map(|(x, &(dist, b))| b * cos(k * (t - dist) + x.phase))
            .sum();
        // e^{−ikt} = e^{−ik·start} e^{−ik·tau}; the first factor is applied once.
        let (sin, cos) = sincos(-k * tau);
        Complex64::new(rx * cos, rx * sin)
    };
    let mut acc = (sample(0) + sample(steps)) * 0.5;
    for j in 1..steps {
        acc += sample(j);
    }
    let (sin, cos) = sincos(-k * start);
    Ok(acc * h * Complex64::new(cos, sin) * (2.0 / window))
}

/// `∬_{D_r} e^{+iΔ_d(p)·2π/λ} / ‖(d,0) − p‖ dp` by polar quadrature around the origin.
///
/// Uses the conjugate-phase convention, under which the imaginary part is
/// positive. Simpson in the radius and the trapezoid rule in the angle; both
/// resolutions double until the relative change drops below 1e-9.
pub fn phasor_integral(d: f64, lambda: f64, r: f64) -> Result<Complex64> {
    if !(r > 0.0) || !(lambda > 0.0) || !(d > r) {
        return Err(Error::InvalidArgument("phasor integral needs 0 < r < d and lambda > 0"));
    }
    let k = TAU / lambda;
    let eval = |n: usize| {
        // n is even: Simpson panels in radius, n angles.
        let hr = r / n as f64;
        let ht = TAU / n as f64;
        let receiver = Point2::new(d, 0.0);
        let mut total = Complex64::new(0.0, 0.0);
        for i in 1..=n {
            let rho = i as f64 * hr;
            let weight = if i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            let ring = pairwise_sum(n, Complex64::new(0.0, 0.0), &|j| {
                let p = Point2::from_polar(rho, j as f64 * ht);
                let (sin, cos) = sincos(k * delta_d(p, d));
                Complex64::new(cos, sin) / p.dist(receiver)
            });
            total += ring * (weight * rho);
        }
        total * (hr / 3.0 * ht)
    };
    let mut n = 2 * (32.0 * libm::ceil(2.0 * r / lambda).max(1.0)) as usize;
    let mut prev = eval(n);
    let mut change = f64::INFINITY;
    for _ in 0..5 {
        n *= 2;
        let next = eval(n);
        change = (next - prev).norm() / next.norm();
        prev = next;
        if change < 1e-9 {
            return Ok(prev);
        }
    }
    if change > 1e-4 {
        return Err(Error::NonConvergence { relative_change: change });
    }
    Ok(prev)
}

/// [`phasor_integral`] on the unit disk at scaled distance and wavelength.
pub fn expected_phasor_integral(d_over_r: f64, lambda_over_r: f64) -> Result<Complex64> {
    if !(d_over_r >= 15.0) {
        return Err(Error::Domain { op: "expected_phasor_integral (d/r)", value: d_over_r });
    }
    if !(lambda_over_r > 0.0 && lambda_over_r <= 2.0) {
        return Err(Error::Domain { op: "expected_phasor_integral (lambda/r)", value: lambda_over_r });
    }
    phasor_integral(d_over_r, lambda_over_r, 1.0)
}

/// Lower bound on `Im` of the unit-disk phasor integral for `d > 15`, `λ ≤ 2`.
pub fn phasor_integral_lower_bound(d: f64, lambda: f64) -> f64 {
    9.0 / (2240.0 * core::f64::consts::SQRT_2) * sqrt(lambda) / (d + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.xmin, self.xmax, self.ymin, self.ymax].iter().all(|v| v.is_finite());
        if !finite || !(self.xmin < self.xmax) || !(self.ymin < self.ymax) {
            return Err(Error::InvalidArgument("grid bounds must be finite with min < max"));
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidArgument("grid needs at least one cell per axis"));
        }
        Ok(())
    }

    /// Center of cell `(ix, iy)`.
    pub fn cell_center(&self, ix: usize, iy: usize) -> Point2 {
        let dx = (self.xmax - self.xmin) / self.nx as f64;
        let dy = (self.ymax - self.ymin) / self.ny as f64;
        Point2::new(self.xmin + (ix as f64 + 0.5) * dx, self.ymin + (iy as f64 + 0.5) * dy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldModel {
    /// `|z|²`.
    Mimo,
    /// Received energy `RS`.
    Snr,
    /// Strongest single-sender energy `max_j b_j²`.
    Udg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldMap {
    pub grid: GridSpec,
    pub model: FieldModel,
    /// Row-major values, row `iy` then column `ix`.
    pub values: Vec<f64>,
}

impl FieldMap {
    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.grid.nx + ix]
    }
}

pub fn field_value(senders: &SenderSet, q: Point2, params: &SignalParams, model: FieldModel) -> f64 {
    match model {
        FieldModel::Mimo => mimo_energy(senders, q, params),
        FieldModel::Snr => snr_received_energy(senders, q, params),
        FieldModel::Udg => senders
            .senders()
            .iter()
            .map(|s| {
                let b = params.attenuated(s.amplitude, s.position.dist(q));
                b * b
            })
            .fold(0.0, f64::max),
    }
}

pub fn field_map(
    senders: &SenderSet,
    grid: &GridSpec,
    params: &SignalParams,
    model: FieldModel,
) -> Result<FieldMap> {
    grid.validate()?;
    let mut values = Vec::with_capacity(grid.nx * grid.ny);
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            values.push(field_value(senders, grid.cell_center(ix, iy), params, model));
        }
    }
    Ok(FieldMap { grid: *grid, model, values })
}

/// `φ = −2π‖v‖/λ`: each sender imitates the phase of a wave leaving the origin.
pub fn center_sync_phase(position: Point2, lambda: f64) -> f64 {
    -TAU * position.norm() / lambda
}

/// Uniform phase in `[0, 2π)` for `(seed, round, node)`.
pub fn random_phase(seed: u64, round: u64, node: u64) -> f64 {
    let stream = crate::rng::substream(seed, round);
    2.0 * PI * crate::rng::unit_f64(crate::rng::at(stream, node))
}
