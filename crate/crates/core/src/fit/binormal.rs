use serde::{Deserialize, Serialize};

use super::FitError;
use crate::event::HailEvent;
use crate::stats::{EigenDecomposition, StatsError, SymPosDefMatrix};

/// How the radial coordinate of an event is measured from the fitted center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceMetric {
    /// `sqrt((x-μ)ᵀ Σ⁻¹ (x-μ))`, constant on the level ellipses of the fit.
    #[default]
    Mahalanobis,
    /// `‖x - μ‖`.
    Euclidean,
    /// `sqrt((x-μ)ᵀ Σ (x-μ))`. Not affine invariant; retained to reproduce
    /// penalty tables that were computed with Σ in place of Σ⁻¹.
    CovarianceForm,
}

impl DistanceMetric {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Mahalanobis => "mahalanobis",
            Self::Euclidean => "euclidean",
            Self::CovarianceForm => "covariance-form",
        }
    }
}

impl std::str::FromStr for DistanceMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mahalanobis" | "d" => Ok(Self::Mahalanobis),
            "euclidean" => Ok(Self::Euclidean),
            "covariance-form" | "covariance" => Ok(Self::CovarianceForm),
            other => Err(format!("unknown distance metric '{other}'")),
        }
    }
}

/// Weighted maximum-likelihood binormal fit of a storm.
#[derive(Debug, Clone, PartialEq)]
pub struct BinormalFit {
    pub mean: [f64; 2],
    pub cov: SymPosDefMatrix,
    pub total_weight: f64,
}

fn check_weighted(points: &[[f64; 2]], weights: &[f64]) -> Result<f64, FitError> {
    if points.is_empty() {
        return Err(FitError::Empty);
    }
    if points.len() != weights.len() {
        return Err(FitError::InvalidArgument(format!(
            "{} points but {} weights",
            points.len(),
            weights.len()
        )));
    }
    for (index, (p, &w)) in points.iter().zip(weights).enumerate() {
        if !(w >= 0.0) || !w.is_finite() {
            return Err(FitError::InvalidWeight { index, value: w });
        }
        if !p[0].is_finite() || !p[1].is_finite() {
            return Err(FitError::NonFiniteLocation(index));
        }
    }
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(FitError::ZeroTotalWeight);
    }
    Ok(total)
}

impl BinormalFit {
    pub fn from_events(events: &[HailEvent]) -> Result<Self, FitError> {
        let (points, weights) = split(events);
        Self::from_weighted(&points, &weights)
    }

    pub fn from_weighted(points: &[[f64; 2]], weights: &[f64]) -> Result<Self, FitError> {
        let total_weight = check_weighted(points, weights)?;
        let mean = weighted_mean(points, weights, total_weight);
        let cov = weighted_cov(points, weights, mean, total_weight)?;
        Ok(Self {
            mean,
            cov,
            total_weight,
        })
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        self.cov.eigen()
    }

    pub fn distance(&self, x: [f64; 2], metric: DistanceMetric) -> f64 {
        let dx = [x[0] - self.mean[0], x[1] - self.mean[1]];
        match metric {
            DistanceMetric::Mahalanobis => self.cov.inverse_quadratic_form(&dx).sqrt(),
            DistanceMetric::Euclidean => dx[0].hypot(dx[1]),
            DistanceMetric::CovarianceForm => self.cov.quadratic_form(&dx).sqrt(),
        }
    }
}

pub(crate) fn split(events: &[HailEvent]) -> (Vec<[f64; 2]>, Vec<f64>) {
    events.iter().map(|e| (e.location(), e.prob)).unzip()
}

fn weighted_mean(points: &[[f64; 2]], weights: &[f64], total: f64) -> [f64; 2] {
    let mut acc = [0.0; 2];
    for (p, w) in points.iter().zip(weights) {
        acc[0] += w * p[0];
        acc[1] += w * p[1];
    }
    [acc[0] / total, acc[1] / total]
}

fn weighted_cov(
    points: &[[f64; 2]],
    weights: &[f64],
    mean: [f64; 2],
    total: f64,
) -> Result<SymPosDefMatrix, FitError> {
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (p, w) in points.iter().zip(weights) {
        let dx = p[0] - mean[0];
        let dy = p[1] - mean[1];
        sxx += w * dx * dx;
        sxy += w * dx * dy;
        syy += w * dy * dy;
    }
    SymPosDefMatrix::from_2x2(sxx / total, sxy / total, syy / total).map_err(|e| match e {
        StatsError::NotPositiveDefinite {
            min_eigenvalue,
            max_eigenvalue,
        } => FitError::DegenerateCovariance {
            min_eigenvalue,
            max_eigenvalue,
        },
        other => FitError::Stats(other),
    })
}

/// Weighted mean location `Σ Pᵢ xᵢ / Σ Pᵢ`.
pub fn estimate_mean(events: &[HailEvent]) -> Result<[f64; 2], FitError> {
    let (points, weights) = split(events);
    let total = check_weighted(&points, &weights)?;
    Ok(weighted_mean(&points, &weights, total))
}

/// Weighted covariance `Σ Pᵢ (xᵢ-μ)(xᵢ-μ)ᵀ / Σ Pᵢ` about `mean`.
///
/// Fails with [`FitError::DegenerateCovariance`] when the condition number
/// exceeds 1e12 (coincident or collinear events).
pub fn estimate_cov(events: &[HailEvent], mean: [f64; 2]) -> Result<SymPosDefMatrix, FitError> {
    let (points, weights) = split(events);
    let total = check_weighted(&points, &weights)?;
    weighted_cov(&points, &weights, mean, total)
}

pub fn mahalanobis(x: [f64; 2], fit: &BinormalFit) -> f64 {
    fit.distance(x, DistanceMetric::Mahalanobis)
}

/// Closed polyline (first vertex repeated at the end) tracing the ellipse
/// `d(x) = level`, vertices ordered by the parametric angle.
pub fn ellipse_points(fit: &BinormalFit, level: f64, count: usize) -> Result<Vec<[f64; 2]>, FitError> {
    if !(level > 0.0) || !level.is_finite() {
        return Err(FitError::InvalidArgument(format!("ellipse level {level} must be positive")));
    }
    if count < 8 {
        return Err(FitError::InvalidArgument(format!("ellipse needs at least 8 vertices, got {count}")));
    }
    let eigen = fit.eigen();
    let axes = eigen.semi_axes();
    let mut points: Vec<[f64; 2]> = (0..count)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / count as f64;
            let y = [level * axes[0] * theta.cos(), level * axes[1] * theta.sin()];
            let x = eigen.from_principal(&y);
            [fit.mean[0] + x[0], fit.mean[1] + x[1]]
        })
        .collect();
    points.push(points[0]);
    Ok(points)
}
