//! Residuals, Q–Q points and the F-test comparing the two CDF fits.

use serde::{Deserialize, Serialize};

use super::{ChiFit, FitError, LogNormalFit, RadialSeries};
use crate::stats::f_sf;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FTest {
    pub f_statistic: f64,
    /// Upper-tail probability of `f_statistic` under `F(dof.0, dof.1)`.
    pub p_value: f64,
    pub dof: (u32, u32),
}

/// F-test of equal residual variances with `n - 1` degrees of freedom for
/// the one-parameter chi fit and `n - 2` for the two-parameter log-normal.
pub fn f_test(sse_chi: f64, sse_lognormal: f64, n: usize) -> Result<FTest, FitError> {
    if n < 4 {
        return Err(FitError::TooFewPoints { required: 4, found: n });
    }
    f_test_with_dof(sse_chi, sse_lognormal, (n - 1) as u32, (n - 2) as u32)
}

pub fn f_test_with_dof(sse_chi: f64, sse_lognormal: f64, dof_chi: u32, dof_lognormal: u32) -> Result<FTest, FitError> {
    for sse in [sse_chi, sse_lognormal] {
        if !(sse > 0.0) || !sse.is_finite() {
            return Err(FitError::InvalidSse(sse));
        }
    }
    if dof_chi == 0 || dof_lognormal == 0 {
        return Err(FitError::InvalidArgument("degrees of freedom must be positive".into()));
    }
    let (d1, d2) = (dof_chi as f64, dof_lognormal as f64);
    let f_statistic = (sse_chi / d1) / (sse_lognormal / d2);
    let p_value = f_sf(f_statistic, d1, d2)?;
    Ok(FTest {
        f_statistic,
        p_value,
        dof: (dof_chi, dof_lognormal),
    })
}

/// `cumᵢ - cdf(dᵢ)` for every series entry.
pub fn residuals(series: &RadialSeries, cdf: impl Fn(f64) -> f64) -> Vec<f64> {
    series.iter().map(|(d, c)| c - cdf(d)).collect()
}

/// `(quantile(p'ᵢ), dᵢ)` pairs with `p'ᵢ = cumᵢ · n / (n + 1)`, which keeps
/// the last probability below 1.
pub fn qq_points(series: &RadialSeries, quantile: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    let n = series.len() as f64;
    let shrink = n / (n + 1.0);
    series.iter().map(|(d, c)| (quantile(c * shrink), d)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoFReport {
    pub f_statistic: f64,
    pub p_value: f64,
    pub dof: (u32, u32),
    pub residuals_chi: Vec<f64>,
    pub residuals_lognormal: Vec<f64>,
    pub qq_chi: Vec<(f64, f64)>,
    pub qq_lognormal: Vec<(f64, f64)>,
}

/// Residuals, Q–Q points and F-test for both fits over the same series.
pub fn goodness_of_fit(series: &RadialSeries, chi: &ChiFit, lognormal: &LogNormalFit) -> Result<GoFReport, FitError> {
    let test = f_test(chi.sse, lognormal.sse, series.len())?;
    Ok(GoFReport {
        f_statistic: test.f_statistic,
        p_value: test.p_value,
        dof: test.dof,
        residuals_chi: residuals(series, |r| chi.cdf(r)),
        residuals_lognormal: residuals(series, |r| lognormal.cdf(r)),
        qq_chi: qq_points(series, |p| chi.quantile(p)),
        qq_lognormal: qq_points(series, |p| lognormal.quantile(p)),
    })
}
