//! Normal, log-normal and chi distributions.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::special::{ln_gamma, reg_gamma_p};
use super::{domain, StatsError};

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal distribution function `N(x)`.
///
/// Evaluated through `erfc`, which keeps full relative precision in the
/// lower tail. Infinite arguments saturate to 0 or 1.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

// Rational approximation for the inverse normal CDF (relative error ~1e-9),
// polished afterwards by Newton steps on `normal_cdf`.
const QA: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_690e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const QB: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const QC: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_671_010_229_528,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const QD: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];
const P_LOW: f64 = 0.024_25;

/// Inverse of [`normal_cdf`] on the open interval `(0, 1)`.
pub fn normal_quantile(p: f64) -> Result<f64, StatsError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain("normal_quantile", format!("p = {p} outside (0, 1)")));
    }
    let mut x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((QC[0] * q + QC[1]) * q + QC[2]) * q + QC[3]) * q + QC[4]) * q + QC[5])
            / ((((QD[0] * q + QD[1]) * q + QD[2]) * q + QD[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((QA[0] * r + QA[1]) * r + QA[2]) * r + QA[3]) * r + QA[4]) * r + QA[5]) * q
            / (((((QB[0] * r + QB[1]) * r + QB[2]) * r + QB[3]) * r + QB[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (-p).ln_1p()).sqrt();
        -(((((QC[0] * q + QC[1]) * q + QC[2]) * q + QC[3]) * q + QC[4]) * q + QC[5])
            / ((((QD[0] * q + QD[1]) * q + QD[2]) * q + QD[3]) * q + 1.0)
    };
    for _ in 0..2 {
        let density = normal_pdf(x);
        if density > 0.0 {
            // Work on the smaller tail so the residual does not cancel.
            let residual = if x > 0.0 {
                (1.0 - p) - normal_cdf(-x)
            } else {
                normal_cdf(x) - p
            };
            x -= residual / density;
        }
    }
    Ok(x)
}

fn check_lognormal(function: &'static str, r: f64, sigma: f64) -> Result<(), StatsError> {
    if !(r > 0.0) {
        return Err(domain(function, format!("r = {r} must be positive")));
    }
    if !(sigma > 0.0) {
        return Err(domain(function, format!("sigma = {sigma} must be positive")));
    }
    Ok(())
}

/// Log-normal density `g(r; mu, sigma)`.
pub fn lognormal_pdf(r: f64, mu: f64, sigma: f64) -> Result<f64, StatsError> {
    check_lognormal("lognormal_pdf", r, sigma)?;
    let z = (r.ln() - mu) / sigma;
    Ok((-0.5 * z * z).exp() / (r * sigma * (2.0 * PI).sqrt()))
}

/// Log-normal distribution function `G(r; mu, sigma) = N((ln r - mu) / sigma)`.
pub fn lognormal_cdf(r: f64, mu: f64, sigma: f64) -> Result<f64, StatsError> {
    check_lognormal("lognormal_cdf", r, sigma)?;
    Ok(normal_cdf((r.ln() - mu) / sigma))
}

pub fn lognormal_quantile(p: f64, mu: f64, sigma: f64) -> Result<f64, StatsError> {
    if !(sigma > 0.0) {
        return Err(domain("lognormal_quantile", format!("sigma = {sigma} must be positive")));
    }
    Ok((mu + sigma * normal_quantile(p)?).exp())
}

fn check_chi(function: &'static str, r: f64, dof: u32) -> Result<(), StatsError> {
    if dof < 1 {
        return Err(domain(function, "degrees of freedom must be at least 1"));
    }
    if !(r >= 0.0) {
        return Err(domain(function, format!("r = {r} must be nonnegative")));
    }
    Ok(())
}

/// Density of the chi distribution with `dof` degrees of freedom,
/// `2^(1 - n/2) / Γ(n/2) · r^(n-1) · exp(-r²/2)`.
pub fn chi_pdf(r: f64, dof: u32) -> Result<f64, StatsError> {
    check_chi("chi_pdf", r, dof)?;
    let n = dof as f64;
    if r == 0.0 {
        return Ok(if dof == 1 { (2.0 / PI).sqrt() } else { 0.0 });
    }
    if r.is_infinite() {
        return Ok(0.0);
    }
    let ln = (1.0 - n / 2.0) * std::f64::consts::LN_2 - ln_gamma(n / 2.0) + (n - 1.0) * r.ln()
        - 0.5 * r * r;
    Ok(ln.exp())
}

/// Chi distribution function, `P(n/2, r²/2)`.
pub fn chi_cdf(r: f64, dof: u32) -> Result<f64, StatsError> {
    check_chi("chi_cdf", r, dof)?;
    if dof == 2 {
        return Ok(-(-0.5 * r * r).exp_m1());
    }
    reg_gamma_p(dof as f64 / 2.0, 0.5 * r * r)
}

/// Scaled Rayleigh family `F(r; λ) = 1 - exp(-λ² r² / 2)`.
pub fn chi_family_cdf(r: f64, lambda: f64) -> Result<f64, StatsError> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(domain("chi_family_cdf", format!("lambda = {lambda} must be positive")));
    }
    if !(r >= 0.0) {
        return Err(domain("chi_family_cdf", format!("r = {r} must be nonnegative")));
    }
    let s = lambda * r;
    Ok(-(-0.5 * s * s).exp_m1())
}

/// Inverse of [`chi_family_cdf`] on `[0, 1)`.
pub fn chi_family_quantile(p: f64, lambda: f64) -> Result<f64, StatsError> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(domain("chi_family_quantile", format!("lambda = {lambda} must be positive")));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(domain("chi_family_quantile", format!("p = {p} outside [0, 1)")));
    }
    Ok((-2.0 * (-p).ln_1p()).sqrt() / lambda)
}

/// Average log-normal radial damage density over a disc of radius `eps`
/// about the center: `N((ln eps - mu) / sigma) / (π eps²)`.
///
/// Tends to zero as `eps → 0`, i.e. a log-normal radial law puts no damage
/// at the storm center.
pub fn disc_average_density(eps: f64, mu: f64, sigma: f64) -> Result<f64, StatsError> {
    if !(eps > 0.0) {
        return Err(domain("disc_average_density", format!("eps = {eps} must be positive")));
    }
    if !(sigma > 0.0) {
        return Err(domain("disc_average_density", format!("sigma = {sigma} must be positive")));
    }
    Ok(normal_cdf((eps.ln() - mu) / sigma) / (PI * eps * eps))
}
