//! Weighted binormal estimation, radial reduction, least-squares CDF fits
//! and goodness-of-fit statistics for a single storm.

mod binormal;
mod cdf;
mod gof;
pub mod optim;
mod radial;

pub use binormal::{ellipse_points, estimate_cov, estimate_mean, mahalanobis, BinormalFit, DistanceMetric};
pub use cdf::{
    chi_objective, fit_chi, fit_lognormal, fit_lognormal_euclidean, lognormal_objective, ChiFit,
    LogNormalFit,
};
pub use gof::{f_test, f_test_with_dof, goodness_of_fit, qq_points, residuals, FTest, GoFReport};
pub use radial::{radial_series, radial_series_with, RadialSeries};

use thiserror::Error;

use crate::stats::StatsError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("no events")]
    Empty,
    #[error("weight {value} at index {index} must be finite and nonnegative")]
    InvalidWeight { index: usize, value: f64 },
    #[error("total weight is zero")]
    ZeroTotalWeight,
    #[error("location at index {0} is not finite")]
    NonFiniteLocation(usize),
    #[error("degenerate covariance (eigenvalues {min_eigenvalue:e} and {max_eigenvalue:e})")]
    DegenerateCovariance {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },
    #[error("need at least {required} points, found {found}")]
    TooFewPoints { required: usize, found: usize },
    #[error("distance at series position {0} is zero; log-normal fit needs positive distances")]
    ZeroDistance(usize),
    #[error("invalid radial series: {0}")]
    InvalidSeries(String),
    #[error("{what} did not converge; best parameters {best:?} with objective {objective:e}")]
    NoConvergence {
        what: &'static str,
        best: Vec<f64>,
        objective: f64,
    },
    #[error("sum of squares {0} must be positive and finite")]
    InvalidSse(f64),
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Stats(#[from] StatsError),
}
