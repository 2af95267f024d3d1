//! Least-squares fits of radial CDFs to the weighted empirical CDF.

use serde::{Deserialize, Serialize};

use super::optim::{brent, nelder_mead};
use super::{radial_series_with, BinormalFit, DistanceMetric, FitError, RadialSeries};
use crate::event::HailEvent;
use crate::stats::{normal_cdf, normal_pdf, normal_quantile};

const LAMBDA_GRID: usize = 400;
const LAMBDA_SPAN_DECADES: f64 = 9.0;
const LAMBDA_REL_TOL: f64 = 1e-10;
const SIMPLEX_DIAMETER_TOL: f64 = 1e-10;
const SIMPLEX_MAX_ITER: usize = 20_000;
// Offsets (in units of the initial step) for restarting the simplex from
// the best point found so far.
const RESTART_JITTER: [[f64; 2]; 5] = [[1.0, -1.0], [-1.0, 1.0], [1.0, 1.0], [-1.0, -1.0], [0.5, 0.0]];
const POLISH_ITER: usize = 50;

/// Fitted scaled-Rayleigh law `F(r; λ) = 1 - exp(-λ² r² / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiFit {
    pub lambda_hat: f64,
    /// Sum of squared CDF deviations at `lambda_hat` (S_F).
    pub sse: f64,
}

impl ChiFit {
    pub fn cdf(&self, r: f64) -> f64 {
        let s = self.lambda_hat * r.max(0.0);
        -(-0.5 * s * s).exp_m1()
    }

    /// Inverse CDF for `p ∈ [0, 1)`; `p ≥ 1` maps to infinity.
    pub fn quantile(&self, p: f64) -> f64 {
        if p >= 1.0 {
            return f64::INFINITY;
        }
        (-2.0 * (-p.max(0.0)).ln_1p()).sqrt() / self.lambda_hat
    }
}

/// Fitted log-normal law `G(r; μ, σ) = N((ln r - μ) / σ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogNormalFit {
    pub mu_hat: f64,
    pub sigma_hat: f64,
    /// Sum of squared CDF deviations at the fitted parameters.
    pub sse: f64,
    /// Set when the series has a single distinct distance; the objective
    /// then has a valley of minimizers and the reported point is one of them.
    #[serde(default)]
    pub degenerate: bool,
}

impl LogNormalFit {
    pub fn cdf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        normal_cdf((r.ln() - self.mu_hat) / self.sigma_hat)
    }

    pub fn quantile(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return 0.0;
        }
        if p >= 1.0 {
            return f64::INFINITY;
        }
        let z = normal_quantile(p).expect("p in (0, 1)");
        (self.mu_hat + self.sigma_hat * z).exp()
    }
}

/// `Σᵢ [F(dᵢ; λ) - cumᵢ]²`.
pub fn chi_objective(series: &RadialSeries, lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    series
        .iter()
        .map(|(d, c)| {
            let f = -(-0.5 * l2 * d * d).exp_m1();
            (f - c) * (f - c)
        })
        .sum()
}

/// `Σᵢ [G(dᵢ; μ, σ) - cumᵢ]²`.
pub fn lognormal_objective(series: &RadialSeries, mu: f64, sigma: f64) -> f64 {
    series
        .iter()
        .map(|(d, c)| {
            let g = if d > 0.0 {
                normal_cdf((d.ln() - mu) / sigma)
            } else {
                0.0
            };
            (g - c) * (g - c)
        })
        .sum()
}

/// Least-squares `λ̂` over `(0, 10 / min positive distance]`.
///
/// A logarithmic grid locates the basin of the global minimum, then Brent's
/// method refines `λ` to a relative tolerance of 1e-10.
pub fn fit_chi(series: &RadialSeries) -> Result<ChiFit, FitError> {
    if series.len() < 2 {
        return Err(FitError::TooFewPoints {
            required: 2,
            found: series.len(),
        });
    }
    let min_positive = series
        .distances()
        .iter()
        .copied()
        .find(|&d| d > 0.0)
        .ok_or_else(|| FitError::InvalidSeries("all distances are zero".into()))?;
    let lambda_max = 10.0 / min_positive;
    let lambda_min = lambda_max * 10f64.powf(-LAMBDA_SPAN_DECADES);
    let grid: Vec<f64> = (0..LAMBDA_GRID)
        .map(|k| {
            let t = k as f64 / (LAMBDA_GRID - 1) as f64;
            lambda_min * (lambda_max / lambda_min).powf(t)
        })
        .collect();
    let best = (0..LAMBDA_GRID)
        .min_by(|&i, &j| chi_objective(series, grid[i]).total_cmp(&chi_objective(series, grid[j])))
        .expect("nonempty grid");
    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(LAMBDA_GRID - 1)];
    let m = brent(|l| chi_objective(series, l), lo, hi, LAMBDA_REL_TOL, 500);
    if !m.converged {
        return Err(FitError::NoConvergence {
            what: "chi scale search",
            best: vec![m.point],
            objective: m.value,
        });
    }
    let lambda_hat = polish_chi(series, m.point);
    Ok(ChiFit {
        lambda_hat,
        sse: chi_objective(series, lambda_hat),
    })
}

/// Least-squares `(μ̂, σ̂)` by simplex descent in `(μ, ln σ)`, started from
/// the weighted moments of `ln d` and restarted from jittered points.
pub fn fit_lognormal(series: &RadialSeries) -> Result<LogNormalFit, FitError> {
    if series.len() < 3 {
        return Err(FitError::TooFewPoints {
            required: 3,
            found: series.len(),
        });
    }
    if let Some(i) = series.distances().iter().position(|&d| d <= 0.0) {
        return Err(FitError::ZeroDistance(i));
    }
    let weights = series.weights();
    let logs: Vec<f64> = series.distances().iter().map(|d| d.ln()).collect();
    let mu0: f64 = weights.iter().zip(&logs).map(|(w, l)| w * l).sum();
    let var0: f64 = weights.iter().zip(&logs).map(|(w, l)| w * (l - mu0) * (l - mu0)).sum();
    let distinct = series.distances().windows(2).any(|w| w[1] > w[0]);
    let sigma0 = if var0.sqrt() > 1e-6 { var0.sqrt() } else { 0.1 };

    let objective = |p: [f64; 2]| lognormal_objective(series, p[0], p[1].exp());
    let steps = [0.5 * sigma0, 0.5];
    let mut best = nelder_mead(objective, [mu0, sigma0.ln()], steps, SIMPLEX_DIAMETER_TOL, SIMPLEX_MAX_ITER);
    for jitter in RESTART_JITTER {
        let start = [
            best.point[0] + jitter[0] * steps[0],
            best.point[1] + jitter[1] * steps[1],
        ];
        let candidate = nelder_mead(objective, start, steps, SIMPLEX_DIAMETER_TOL, SIMPLEX_MAX_ITER);
        if candidate.converged && candidate.value < best.value {
            best = candidate;
        }
    }
    if !best.converged {
        return Err(FitError::NoConvergence {
            what: "log-normal simplex",
            best: vec![best.point[0], best.point[1].exp()],
            objective: best.value,
        });
    }
    let (mu_hat, sigma_hat) = if distinct {
        polish_lognormal(series, best.point[0], best.point[1].exp())
    } else {
        (best.point[0], best.point[1].exp())
    };
    Ok(LogNormalFit {
        mu_hat,
        sigma_hat,
        sse: lognormal_objective(series, mu_hat, sigma_hat),
        degenerate: !distinct,
    })
}

/// Gauss–Newton refinement of a bracketed minimum. Value-based searches
/// locate a minimum only to about the square root of machine precision;
/// driving the gradient to zero pins it down to rounding level. A step is
/// kept only if it does not raise the objective.
/// Halves the step fraction until `trial` yields an objective no worse than
/// `value` (up to rounding noise).
fn damped<P>(value: f64, trial: impl Fn(f64) -> Option<(P, f64)>) -> Option<(P, f64)> {
    let mut t = 1.0;
    for _ in 0..40 {
        if let Some((p, v)) = trial(t) {
            if v <= value * (1.0 + 1e-12) {
                return Some((p, v));
            }
        }
        t *= 0.5;
    }
    None
}

fn polish_chi(series: &RadialSeries, start: f64) -> f64 {
    let mut lambda = start;
    let mut value = chi_objective(series, lambda);
    for _ in 0..POLISH_ITER {
        let (mut num, mut den) = (0.0, 0.0);
        for (d, c) in series.iter() {
            let e = (-0.5 * lambda * lambda * d * d).exp();
            let r = c - (1.0 - e);
            let j = lambda * d * d * e;
            num += r * j;
            den += j * j;
        }
        if !(den > 0.0) {
            break;
        }
        let full = num / den;
        let Some((next, next_value)) = damped(value, |t| {
            let next = lambda + t * full;
            (next > 0.0).then(|| (next, chi_objective(series, next)))
        }) else {
            break;
        };
        let done = (next - lambda).abs() <= 4.0 * f64::EPSILON * lambda;
        lambda = next;
        value = next_value;
        if done {
            break;
        }
    }
    lambda
}

fn polish_lognormal(series: &RadialSeries, mu: f64, sigma: f64) -> (f64, f64) {
    let (mut mu, mut sigma) = (mu, sigma);
    let mut value = lognormal_objective(series, mu, sigma);
    for _ in 0..POLISH_ITER {
        // Normal equations of the linearized residuals in (μ, σ).
        let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (d, c) in series.iter() {
            let z = (d.ln() - mu) / sigma;
            let r = c - normal_cdf(z);
            let g = normal_pdf(z) / sigma;
            let (j1, j2) = (g, g * z);
            a11 += j1 * j1;
            a12 += j1 * j2;
            a22 += j2 * j2;
            b1 -= j1 * r;
            b2 -= j2 * r;
        }
        let det = a11 * a22 - a12 * a12;
        if !(det > 0.0) {
            break;
        }
        let step = [(a22 * b1 - a12 * b2) / det, (a11 * b2 - a12 * b1) / det];
        let Some((next, next_value)) = damped(value, |t| {
            let next = (mu + t * step[0], sigma + t * step[1]);
            (next.1 > 0.0).then(|| (next, lognormal_objective(series, next.0, next.1)))
        }) else {
            break;
        };
        let done = step[0].abs() <= 4.0 * f64::EPSILON * mu.abs().max(1.0) && step[1].abs() <= 4.0 * f64::EPSILON * sigma;
        (mu, sigma) = next;
        value = next_value;
        if done {
            break;
        }
    }
    (mu, sigma)
}

/// Log-normal fit against plain Euclidean distances from the fitted center.
pub fn fit_lognormal_euclidean(events: &[HailEvent], fit: &BinormalFit) -> Result<LogNormalFit, FitError> {
    fit_lognormal(&radial_series_with(events, fit, DistanceMetric::Euclidean)?)
}
