//! Shipped defaults, including the calibrated `c1`.

use serde::{Deserialize, Serialize};
use wavecast_core::broadcast::MisoConstants;
use wavecast_core::SignalParams;

pub const DEFAULT_CONFIG_JSON: &str = include_str!("../config/default.json");

/// How the shipped `c1` was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationProvenance {
    pub n: usize,
    pub lambda: f64,
    pub seeds: u64,
    pub receivers: usize,
    pub radius_multiples: Vec<f64>,
    pub target_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    pub lambda: f64,
    pub beta_n0: f64,
    pub c_f: f64,
    pub amplitude: f64,
    pub c1: f64,
    pub c2: f64,
    /// Density multiple `ρ ≥ c3·ln n` expected by the MISO analysis.
    pub c3: f64,
    pub calibration: CalibrationProvenance,
}

impl Defaults {
    pub fn shipped() -> Self {
        serde_json::from_str(DEFAULT_CONFIG_JSON).expect("shipped config parses")
    }

    pub fn params(&self) -> SignalParams {
        SignalParams { lambda: self.lambda, beta_n0: self.beta_n0, c_f: self.c_f, amplitude_default: self.amplitude }
    }

    pub fn miso(&self) -> MisoConstants {
        MisoConstants { c1: self.c1, c2: self.c2 }
    }
}
