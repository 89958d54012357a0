//! Least-squares scaling fits on transformed coordinates.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    /// `(x, y)`.
    Linear,
    /// `(ln x, ln y)`.
    LogLog,
    /// `(ln x, y)`.
    SemiLog,
    /// `(ln ln x, y)`.
    LogLogX,
}

impl Transform {
    pub fn apply(self, x: f64, y: f64) -> Result<(f64, f64), FitError> {
        let ln = |v: f64| if v > 0.0 { Ok(v.ln()) } else { Err(FitError::NonPositive(v)) };
        Ok(match self {
            Transform::Linear => (x, y),
            Transform::LogLog => (ln(x)?, ln(y)?),
            Transform::SemiLog => (ln(x)?, y),
            Transform::LogLogX => (ln(ln(x)?)?, y),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub transform: Transform,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Transformed points the fit was computed on.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("a scaling fit needs at least 4 points, got {0}")]
    TooFewPoints(usize),
    #[error("logarithm of non-positive value {0}")]
    NonPositive(f64),
    #[error("all transformed x values are equal")]
    Degenerate,
    #[error("non-finite input")]
    NonFinite,
}

pub const MIN_POINTS: usize = 4;

pub fn fit_scaling(points: &[(f64, f64)], transform: Transform) -> Result<ScalingFit, FitError> {
    if points.len() < MIN_POINTS {
        return Err(FitError::TooFewPoints(points.len()));
    }
    let pts = points
        .iter()
        .map(|&(x, y)| {
            if !x.is_finite() || !y.is_finite() {
                return Err(FitError::NonFinite);
            }
            transform.apply(x, y)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if !(sxx > f64::EPSILON * n * mx.abs().max(1.0).powi(2)) {
        return Err(FitError::Degenerate);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - residual / syy } else { 1.0 };
    Ok(ScalingFit { transform, slope, intercept, r_squared, points: pts })
}
