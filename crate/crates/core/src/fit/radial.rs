use super::binormal::split;
use super::{BinormalFit, DistanceMetric, FitError};
use crate::event::HailEvent;

/// Events ordered by distance from the fitted center together with their
/// normalized cumulative weights (the weighted empirical CDF).
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSeries {
    distances: Vec<f64>,
    cum_weights: Vec<f64>,
    order: Vec<usize>,
}

impl RadialSeries {
    /// Validated constructor: distances nonnegative and nondecreasing,
    /// cumulative weights strictly increasing in `(0, 1]` and ending at 1.
    pub fn new(distances: Vec<f64>, cum_weights: Vec<f64>) -> Result<Self, FitError> {
        let n = distances.len();
        if n == 0 {
            return Err(FitError::Empty);
        }
        if cum_weights.len() != n {
            return Err(FitError::InvalidSeries(format!(
                "{n} distances but {} cumulative weights",
                cum_weights.len()
            )));
        }
        if distances.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
            return Err(FitError::InvalidSeries("distances must be finite and nonnegative".into()));
        }
        if distances.windows(2).any(|w| w[1] < w[0]) {
            return Err(FitError::InvalidSeries("distances must be nondecreasing".into()));
        }
        if !(cum_weights[0] > 0.0) || cum_weights.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(FitError::InvalidSeries(
                "cumulative weights must be positive and strictly increasing".into(),
            ));
        }
        if (cum_weights[n - 1] - 1.0).abs() > 1e-12 {
            return Err(FitError::InvalidSeries("cumulative weights must end at 1".into()));
        }
        Ok(Self {
            distances,
            cum_weights,
            order: (0..n).collect(),
        })
    }

    /// Sorts `(distance, weight)` pairs by distance (stable in input order)
    /// and accumulates normalized weights. Zero-weight entries are dropped.
    pub fn from_weighted(distances: &[f64], weights: &[f64]) -> Result<Self, FitError> {
        if distances.is_empty() {
            return Err(FitError::Empty);
        }
        if distances.len() != weights.len() {
            return Err(FitError::InvalidArgument(format!(
                "{} distances but {} weights",
                distances.len(),
                weights.len()
            )));
        }
        for (index, &w) in weights.iter().enumerate() {
            if !(w >= 0.0) || !w.is_finite() {
                return Err(FitError::InvalidWeight { index, value: w });
            }
        }
        if distances.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
            return Err(FitError::InvalidSeries("distances must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(FitError::ZeroTotalWeight);
        }
        let mut order: Vec<usize> = (0..distances.len()).filter(|&i| weights[i] > 0.0).collect();
        order.sort_by(|&i, &j| distances[i].total_cmp(&distances[j]));
        let mut running = 0.0;
        let mut cum_weights: Vec<f64> = order
            .iter()
            .map(|&i| {
                running += weights[i];
                running / total
            })
            .collect();
        if let Some(last) = cum_weights.last_mut() {
            *last = 1.0;
        }
        Ok(Self {
            distances: order.iter().map(|&i| distances[i]).collect(),
            cum_weights,
            order,
        })
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn cum_weights(&self) -> &[f64] {
        &self.cum_weights
    }

    /// Original index of each series entry (the sorting permutation).
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Normalized weight of each entry.
    pub fn weights(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.cum_weights
            .iter()
            .map(|&c| {
                let w = c - prev;
                prev = c;
                w
            })
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.distances.iter().copied().zip(self.cum_weights.iter().copied())
    }
}

/// Radial series under the Mahalanobis distance of `fit`.
pub fn radial_series(events: &[HailEvent], fit: &BinormalFit) -> Result<RadialSeries, FitError> {
    radial_series_with(events, fit, DistanceMetric::Mahalanobis)
}

pub fn radial_series_with(
    events: &[HailEvent],
    fit: &BinormalFit,
    metric: DistanceMetric,
) -> Result<RadialSeries, FitError> {
    let (points, weights) = split(events);
    let distances: Vec<f64> = points.iter().map(|&p| fit.distance(p, metric)).collect();
    RadialSeries::from_weighted(&distances, &weights)
}
