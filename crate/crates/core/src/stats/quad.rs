//! Adaptive Gauss–Legendre quadrature on finite intervals.

use std::sync::OnceLock;

use super::StatsError;

const ORDER: usize = 15;
const MAX_DEPTH: u32 = 40;
const MAX_PANELS: usize = 20_000;

fn rule() -> &'static ([f64; ORDER], [f64; ORDER]) {
    static RULE: OnceLock<([f64; ORDER], [f64; ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let mut nodes = [0.0; ORDER];
        let mut weights = [0.0; ORDER];
        for i in 0..n {
            // Newton iteration on P_n from the Chebyshev-like initial guess.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    nodes
        .iter()
        .zip(weights)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Integrates `f` over `[a, b]` to absolute tolerance `abs_tol`.
///
/// Each panel is compared with the sum over its two halves and bisected
/// until they agree; failure to reach the tolerance within the panel and
/// depth budgets is reported rather than returning a silent estimate.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64, StatsError> {
    if a == b {
        return Ok(0.0);
    }
    let mut total = 0.0;
    let mut error = 0.0;
    let mut panels = 0usize;
    let mut stack = vec![(a, b, panel(&f, a, b), abs_tol, 0u32)];
    while let Some((lo, hi, whole, tol, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = panel(&f, lo, mid);
        let right = panel(&f, mid, hi);
        let diff = (left + right - whole).abs();
        panels += 1;
        if diff <= tol || diff <= 1e-15 * (left + right).abs() {
            total += left + right;
            error += diff;
            continue;
        }
        if depth >= MAX_DEPTH || panels >= MAX_PANELS || !diff.is_finite() {
            return Err(StatsError::Quadrature {
                estimate: total + left + right,
                error: error + diff,
            });
        }
        stack.push((mid, hi, right, 0.5 * tol, depth + 1));
        stack.push((lo, mid, left, 0.5 * tol, depth + 1));
    }
    Ok(total)
}
