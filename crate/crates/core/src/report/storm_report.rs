use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{BinormalFit, ChiFit, DistanceMetric, GoFReport, LogNormalFit};

/// Center, covariance and principal axes of a storm's binormal fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinormalSummary {
    pub mean: [f64; 2],
    pub cov: [[f64; 2]; 2],
    pub semi_axes: [f64; 2],
    /// Unit direction of each semi-axis, longest first.
    pub axes: [[f64; 2]; 2],
    pub total_weight: f64,
}

impl From<&BinormalFit> for BinormalSummary {
    fn from(fit: &BinormalFit) -> Self {
        let e = fit.eigen();
        let c = &fit.cov;
        Self {
            mean: fit.mean,
            cov: [[c.get(0, 0), c.get(0, 1)], [c.get(1, 0), c.get(1, 1)]],
            semi_axes: [e.semi_axes()[0], e.semi_axes()[1]],
            axes: [[e.axis(0)[0], e.axis(0)[1]], [e.axis(1)[0], e.axis(1)[1]]],
            total_weight: fit.total_weight,
        }
    }
}

/// Everything computed for one storm. Fields are `None` when the
/// corresponding step was skipped or failed; `notes` says why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StormReport {
    pub storm_id: usize,
    pub event_count: usize,
    pub metric: DistanceMetric,
    pub skipped: Option<String>,
    pub binormal: Option<BinormalSummary>,
    pub chi: Option<ChiFit>,
    /// Log-normal fit against the configured metric (S^d_G).
    pub lognormal_d: Option<LogNormalFit>,
    /// Log-normal fit against Euclidean distance (S_G).
    pub lognormal_euclidean: Option<LogNormalFit>,
    pub gof: Option<GoFReport>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl StormReport {
    pub fn summary_row(&self) -> SummaryRow {
        SummaryRow {
            storm_id: self.storm_id,
            events: self.event_count,
            s_f: self.chi.map(|c| c.sse),
            s_g: self.lognormal_euclidean.map(|l| l.sse),
            s_g_d: self.lognormal_d.map(|l| l.sse),
        }
    }
}

/// One row of the penalty summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub storm_id: usize,
    pub events: usize,
    pub s_f: Option<f64>,
    pub s_g: Option<f64>,
    pub s_g_d: Option<f64>,
}

/// Two significant figures below 10, one decimal place above
/// (0.067, 0.25, 3.2, 23.7).
pub fn format_penalty(value: f64) -> String {
    if !value.is_finite() {
        return "-".to_string();
    }
    if value.abs() >= 10.0 {
        return format!("{value:.1}");
    }
    if value == 0.0 {
        return "0".to_string();
    }
    let magnitude = value.abs().log10().floor() as i32;
    let decimals = (1 - magnitude).max(0) as usize;
    format!("{value:.decimals$}")
}

pub fn save_report(report: &StormReport, path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(report).map_err(|source| Error::Json {
        path: path.display().to_string(),
        source,
    })?;
    super::commands::write_atomic(path, json.as_bytes())
}

pub fn load_report(path: &Path) -> Result<StormReport> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn penalty_rounding_matches_table_style() {
        assert_eq!(format_penalty(0.0670009), "0.067");
        assert_eq!(format_penalty(0.0447541), "0.045");
        assert_eq!(format_penalty(0.0483304), "0.048");
        assert_eq!(format_penalty(0.25), "0.25");
        assert_eq!(format_penalty(3.21), "3.2");
        assert_eq!(format_penalty(23.71), "23.7");
        assert_eq!(format_penalty(f64::NAN), "-");
    }
}
