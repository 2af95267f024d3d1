//! Special functions, univariate distributions and small symmetric-matrix
//! linear algebra shared by the rest of the crate.

mod dist;
mod linalg;
pub mod quad;
mod special;

pub use dist::{
    chi_cdf, chi_family_cdf, chi_family_quantile, chi_pdf, disc_average_density, lognormal_cdf,
    lognormal_pdf, lognormal_quantile, normal_cdf, normal_pdf, normal_quantile,
};
pub use linalg::{sym_eigen, EigenDecomposition, SymPosDefMatrix, PD_RATIO_FLOOR};
pub use special::{f_cdf, f_sf, ln_gamma, reg_beta_i, reg_gamma_p, reg_gamma_q};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("{function}: argument out of domain ({detail})")]
    Domain {
        function: &'static str,
        detail: String,
    },
    #[error("matrix is not symmetric: entry ({row},{col}) differs from its transpose")]
    NotSymmetric { row: usize, col: usize },
    #[error("matrix is not positive definite (eigenvalues in [{min_eigenvalue:e}, {max_eigenvalue:e}])")]
    NotPositiveDefinite {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },
    #[error("matrix shape mismatch: expected {expected} entries, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("quadrature failed to converge (estimate {estimate:e}, error {error:e})")]
    Quadrature { estimate: f64, error: f64 },
    #[error("iteration limit reached in {0}")]
    NoConvergence(&'static str),
}

pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> StatsError {
    StatsError::Domain {
        function,
        detail: detail.into(),
    }
}
