mod common;

use std::f64::consts::PI;

use chrono::{TimeZone, Utc};
use common::{fixture_events, fixture_rows};
use hailchi::fit::*;
use hailchi::stats::{f_sf, SymPosDefMatrix};
use hailchi::storm::{sample_events, Velocity2};
use hailchi::HailEvent;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn event(x: f64, y: f64, p: f64) -> HailEvent {
    HailEvent::new(Utc.with_ymd_and_hms(2010, 1, 20, 17, 0, 0).unwrap(), x, y, p)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn table_fit(metric: DistanceMetric) -> (Vec<HailEvent>, BinormalFit, RadialSeries) {
    let events = fixture_events();
    let fit = BinormalFit::from_events(&events).unwrap();
    let series = radial_series_with(&events, &fit, metric).unwrap();
    (events, fit, series)
}

#[test]
fn mean_examples() {
    let m = estimate_mean(&[event(1.0, 2.0, 0.5), event(3.0, -4.0, 0.5)]).unwrap();
    assert_eq!(m, [2.0, -1.0]);
    let m = estimate_mean(&[event(1.0, 2.0, 1.0), event(3.0, -4.0, 1e-12)]).unwrap();
    assert!((m[0] - 1.0).abs() < 1e-11 && (m[1] - 2.0).abs() < 1e-11);
    assert!(matches!(estimate_mean(&[]), Err(FitError::Empty)));
    assert!(matches!(
        BinormalFit::from_weighted(&[[0.0, 0.0], [1.0, 0.0]], &[0.0, 0.0]),
        Err(FitError::ZeroTotalWeight)
    ));
}

#[test]
fn fixture_mean_matches_direct_summation() {
    let rows = fixture_rows();
    let total: f64 = rows.iter().map(|r| r.2).sum();
    let sx: f64 = rows.iter().map(|r| r.0 * r.2).sum();
    let sy: f64 = rows.iter().map(|r| r.1 * r.2).sum();
    let m = estimate_mean(&fixture_events()).unwrap();
    assert!((m[0] - sx / total).abs() < 1e-12 && (m[1] - sy / total).abs() < 1e-12);
    // Regression pin.
    assert!((m[0] - -89.2187527).abs() < 1e-7 && (m[1] - 31.65931436).abs() < 1e-8, "{m:?}");
    assert!((total - 21.1).abs() < 1e-12);
}

#[test]
fn fixture_covariance_matches_direct_summation() {
    let rows = fixture_rows();
    let total: f64 = rows.iter().map(|r| r.2).sum();
    let m = estimate_mean(&fixture_events()).unwrap();
    let mut c = [0.0; 3];
    for &(x, y, p) in &rows {
        c[0] += p * (x - m[0]) * (x - m[0]);
        c[1] += p * (x - m[0]) * (y - m[1]);
        c[2] += p * (y - m[1]) * (y - m[1]);
    }
    let cov = estimate_cov(&fixture_events(), m).unwrap();
    for (got, want) in [cov.get(0, 0), cov.get(0, 1), cov.get(1, 1)].iter().zip(c.map(|s| s / total)) {
        assert!((got - want).abs() < 1e-13);
    }
}

#[test]
fn degenerate_covariances() {
    let same = [event(1.0, 1.0, 0.5), event(1.0, 1.0, 0.7), event(1.0, 1.0, 0.2)];
    assert!(matches!(BinormalFit::from_events(&same), Err(FitError::DegenerateCovariance { .. })));
    let two = [event(0.0, 0.0, 0.5), event(1.0, 2.0, 0.5)];
    assert!(matches!(BinormalFit::from_events(&two), Err(FitError::DegenerateCovariance { .. })));
    let line = [event(0.0, 0.0, 0.5), event(1.0, 2.0, 0.5), event(2.0, 4.0, 0.9)];
    assert!(matches!(BinormalFit::from_events(&line), Err(FitError::DegenerateCovariance { .. })));
}

#[test]
fn covariance_recovers_known_binormal() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = 10_000;
    // x = L z with L L ᵀ = [[4, 1.2], [1.2, 1]].
    let l = [[2.0, 0.0], [0.6, 0.8]];
    let pts: Vec<[f64; 2]> = (0..n)
        .map(|_| {
            let z: [f64; 2] = [StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)];
            [l[0][0] * z[0] + 3.0, l[1][0] * z[0] + l[1][1] * z[1] - 1.0]
        })
        .collect();
    let fit = BinormalFit::from_weighted(&pts, &vec![1.0; n]).unwrap();
    // Standard errors of sample covariances for a Gaussian:
    // var(s_ij) = (σ_ii σ_jj + σ_ij²) / n.
    let truth = [[4.0, 1.2], [1.2, 1.0]];
    for (i, j) in [(0, 0), (0, 1), (1, 1)] {
        let se = ((truth[i][i] * truth[j][j] + truth[i][j] * truth[i][j]) / n as f64).sqrt();
        assert!((fit.cov.get(i, j) - truth[i][j]).abs() < 3.0 * se, "({i},{j})");
    }
}

#[test]
fn mahalanobis_examples() {
    let fit = BinormalFit {
        mean: [1.0, -2.0],
        cov: SymPosDefMatrix::identity(2),
        total_weight: 1.0,
    };
    assert_eq!(mahalanobis([1.0, -2.0], &fit), 0.0);
    assert!((mahalanobis([4.0, 2.0], &fit) - 5.0).abs() < 1e-15);
}

#[test]
fn mahalanobis_is_affine_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..50 {
        let pts: Vec<[f64; 2]> = (0..30).map(|_| [rng.random_range(-3.0..3.0), rng.random_range(-1.0..1.0)]).collect();
        let w: Vec<f64> = (0..30).map(|_| rng.random_range(0.1..1.0)).collect();
        let a = random_matrix(&mut rng);
        let b = [rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0)];
        let map = |p: [f64; 2]| [a[0][0] * p[0] + a[0][1] * p[1] + b[0], a[1][0] * p[0] + a[1][1] * p[1] + b[1]];
        let f1 = BinormalFit::from_weighted(&pts, &w).unwrap();
        let moved: Vec<[f64; 2]> = pts.iter().map(|&p| map(p)).collect();
        let f2 = BinormalFit::from_weighted(&moved, &w).unwrap();
        let q = [rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)];
        assert!((mahalanobis(q, &f1) - mahalanobis(map(q), &f2)).abs() < 1e-10);
    }
}

fn random_matrix(rng: &mut ChaCha8Rng) -> [[f64; 2]; 2] {
    loop {
        let a: [[f64; 2]; 2] = [
            [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)],
            [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)],
        ];
        if (a[0][0] * a[1][1] - a[0][1] * a[1][0]).abs() > 0.3 {
            return a;
        }
    }
}

#[test]
fn radial_series_examples() {
    let s = RadialSeries::from_weighted(&[0.7], &[0.4]).unwrap();
    assert_eq!((s.distances(), s.cum_weights()), (&[0.7][..], &[1.0][..]));

    let (_, _, s) = table_fit(DistanceMetric::Mahalanobis);
    assert_eq!(s.len(), 46);
    assert_eq!(*s.cum_weights().last().unwrap(), 1.0);
    assert!(s.distances().windows(2).all(|w| w[0] <= w[1]));
    assert!(s.cum_weights().windows(2).all(|w| w[0] < w[1]));

    let s = RadialSeries::from_weighted(&[2.0, 1.0, 2.0, 1.0], &[0.1, 0.2, 0.3, 0.4]).unwrap();
    assert_eq!(s.order(), &[1, 3, 0, 2]);
    assert_eq!(*s.cum_weights().last().unwrap(), 1.0);
}

#[test]
fn fixture_chi_fit() {
    let (_, _, s) = table_fit(DistanceMetric::CovarianceForm);
    let chi = fit_chi(&s).unwrap();
    assert!((chi.lambda_hat - 7.308).abs() < 0.02, "{chi:?}");
    assert!((chi.sse - 0.067).abs() < 0.002, "{chi:?}");
    let resid = residuals(&s, |r| chi.cdf(r));
    assert_eq!(resid.len(), s.len());
    let sum_sq: f64 = resid.iter().map(|r| r * r).sum();
    assert!((sum_sq - chi.sse).abs() < 1e-12);
    assert!((chi_objective(&s, chi.lambda_hat) - chi.sse).abs() < 1e-12);
}

#[test]
fn fixture_lognormal_fits() {
    let (events, fit, s) = table_fit(DistanceMetric::CovarianceForm);
    let ln = fit_lognormal(&s).unwrap();
    assert!((ln.mu_hat - -1.862).abs() < 0.01, "{ln:?}");
    assert!((ln.sigma_hat - 0.6227).abs() < 0.005, "{ln:?}");
    assert!((ln.sse - 0.0483).abs() < 0.001, "{ln:?}");
    assert!((lognormal_objective(&s, ln.mu_hat, ln.sigma_hat) - ln.sse).abs() < 1e-12);
    let euclid = fit_lognormal_euclidean(&events, &fit).unwrap();
    assert!((euclid.sse - 0.045).abs() < 0.002, "{euclid:?}");
}

#[test]
fn simulated_stationary_storm_has_unit_scale() {
    let events = sample_events(10_000, Velocity2::zero(), 21).unwrap();
    let fit = BinormalFit::from_events(&events).unwrap();
    let chi = fit_chi(&radial_series(&events, &fit).unwrap()).unwrap();
    assert!((chi.lambda_hat - 1.0).abs() < 0.02, "{chi:?}");
}

#[test]
fn isotropic_data_gives_similar_lognormal_penalties() {
    let events = sample_events(5_000, Velocity2::zero(), 8).unwrap();
    let fit = BinormalFit::from_events(&events).unwrap();
    let d = fit_lognormal(&radial_series(&events, &fit).unwrap()).unwrap();
    let e = fit_lognormal_euclidean(&events, &fit).unwrap();
    assert!((d.sse - e.sse).abs() < 0.25 * d.sse.max(e.sse), "{} vs {}", d.sse, e.sse);
}

#[test]
fn identity_covariance_makes_variants_coincide() {
    let pts = [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0], [2.0, 0.0], [-2.0, 0.0], [0.0, 2.0], [0.0, -2.0]];
    let events: Vec<HailEvent> = pts.iter().map(|p| event(p[0], p[1], 0.5)).collect();
    let fit = BinormalFit {
        mean: [0.0, 0.0],
        cov: SymPosDefMatrix::identity(2),
        total_weight: 4.0,
    };
    let d = fit_lognormal(&radial_series(&events, &fit).unwrap()).unwrap();
    let e = fit_lognormal_euclidean(&events, &fit).unwrap();
    assert_eq!(d, e);
}

#[test]
fn repeated_distance_is_flagged_degenerate() {
    let s = RadialSeries::new(vec![0.5; 6], (1..=6).map(|i| i as f64 / 6.0).collect()).unwrap();
    let fit = fit_lognormal(&s).unwrap();
    assert!(fit.degenerate);
    assert!(fit.sse.is_finite());
}

#[test]
fn f_test_examples() {
    let t = f_test_with_dof(0.3, 0.3, 10, 10).unwrap();
    assert_eq!(t.f_statistic, 1.0);
    assert!((t.p_value - 0.5).abs() < 1e-14);
    let t = f_test(0.067, 0.0483, 46).unwrap();
    assert_eq!(t.dof, (45, 44));
    assert!((t.p_value - 0.142).abs() < 0.03, "{t:?}");
    assert!(f_test(0.1, 0.1, 3).is_err());
    assert!(f_test(0.0, 0.1, 10).is_err());
}

#[test]
fn f_test_p_value_matches_monte_carlo() {
    let (d1, d2) = (5usize, 4usize);
    let f_obs = 2.0;
    let p = f_test_with_dof(f_obs * d1 as f64, d2 as f64, d1 as u32, d2 as u32).unwrap().p_value;
    assert!((p - f_sf(f_obs, d1 as f64, d2 as f64).unwrap()).abs() < 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(1_000_000);
    let draws = 1_000_000;
    let mut exceed = 0usize;
    for _ in 0..draws {
        let mut chi = |k: usize| (0..k).map(|_| rng.sample::<f64, _>(StandardNormal).powi(2)).sum::<f64>();
        let ratio = (chi(d1) / d1 as f64) / (chi(d2) / d2 as f64);
        if ratio > f_obs {
            exceed += 1;
        }
    }
    let estimate = exceed as f64 / draws as f64;
    let se = (p * (1.0 - p) / draws as f64).sqrt();
    assert!((estimate - p).abs() < 3.0 * se, "{estimate} vs {p} (se {se})");
}

#[test]
fn perfect_fits_have_zero_residuals_and_diagonal_qq() {
    let truth = ChiFit { lambda_hat: 2.5, sse: 0.0 };
    let n = 40;
    let cum: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
    let shrink = n as f64 / (n as f64 + 1.0);
    // Distances placed at the adjusted quantiles so that Q–Q points are exact.
    let d: Vec<f64> = cum.iter().map(|c| truth.quantile(c * shrink)).collect();
    let s = RadialSeries::new(d, cum.clone()).unwrap();
    for (t, e) in qq_points(&s, |p| truth.quantile(p)) {
        assert!((t - e).abs() < 1e-8);
    }
    let d: Vec<f64> = cum[..n - 1].iter().map(|&c| truth.quantile(c)).chain([10.0]).collect();
    let s = RadialSeries::new(d, cum).unwrap();
    let r = residuals(&s, |x| truth.cdf(x));
    assert!(r.iter().all(|v| v.abs() < 1e-9), "{r:?}");
}

#[test]
fn fixture_qq_points() {
    let (_, _, s) = table_fit(DistanceMetric::CovarianceForm);
    let chi = fit_chi(&s).unwrap();
    let ln = fit_lognormal(&s).unwrap();
    let gof = goodness_of_fit(&s, &chi, &ln).unwrap();
    for qq in [&gof.qq_chi, &gof.qq_lognormal] {
        assert!(qq.windows(2).all(|w| w[0].0 <= w[1].0 && w[0].1 <= w[1].1));
    }
    // The log-normal's fat tail: its extreme quantiles overshoot the data,
    // while the chi quantiles stay below it, and the chi points are nearer
    // the diagonal over the two largest distances.
    let n = s.len();
    let tail = |qq: &[(f64, f64)], k: usize| qq[n - k..].iter().map(|(t, e)| (t - e).abs()).sum::<f64>();
    assert!(gof.qq_lognormal[n - 1].0 > gof.qq_lognormal[n - 1].1);
    assert!(gof.qq_chi[n - 1].0 < gof.qq_chi[n - 1].1);
    assert!(tail(&gof.qq_chi, 2) < tail(&gof.qq_lognormal, 2));
    // Over the five largest distances the ordering reverses (0.347 vs 0.280).
    assert!((tail(&gof.qq_chi, 5) - 0.3474).abs() < 1e-3);
    assert!((tail(&gof.qq_lognormal, 5) - 0.2801).abs() < 1e-3);
}

#[test]
fn ellipse_examples() {
    let circle = BinormalFit {
        mean: [2.0, -1.0],
        cov: SymPosDefMatrix::identity(2),
        total_weight: 1.0,
    };
    let pts = ellipse_points(&circle, 1.5, 64).unwrap();
    assert_eq!(pts.len(), 65);
    assert_eq!(pts[0], pts[64]);
    for p in &pts {
        assert!(((p[0] - 2.0).hypot(p[1] + 1.0) - 1.5).abs() < 1e-12);
    }
    assert!(ellipse_points(&circle, 1.0, 7).is_err());
    assert!(ellipse_points(&circle, 0.0, 16).is_err());

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..50 {
        let a: f64 = rng.random_range(0.1..5.0);
        let c = rng.random_range(0.1..5.0);
        let b = rng.random_range(-0.9..0.9) * f64::sqrt(a * c);
        let fit = BinormalFit {
            mean: [rng.random_range(-90.0..-80.0), rng.random_range(30.0..40.0)],
            cov: SymPosDefMatrix::from_2x2(a, b, c).unwrap(),
            total_weight: 1.0,
        };
        for p in ellipse_points(&fit, 1.0, 32).unwrap() {
            assert!((mahalanobis(p, &fit) - 1.0).abs() < 1e-10);
        }
        let level = 1.7;
        let poly = ellipse_points(&fit, level, 720).unwrap();
        let area = 0.5 * poly.windows(2).map(|w| w[0][0] * w[1][1] - w[1][0] * w[0][1]).sum::<f64>().abs();
        let exact = PI * level * level * fit.cov.determinant().sqrt();
        assert!((area - exact).abs() < 1e-3 * exact);
    }
}

#[test]
fn optimizers_certify_their_minima() {
    let (_, _, s) = table_fit(DistanceMetric::CovarianceForm);
    let chi = fit_chi(&s).unwrap();
    let ln = fit_lognormal(&s).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for _ in 0..100 {
        let l = chi.lambda_hat * (1.0 + rng.random_range(-0.05..0.05));
        assert!(chi_objective(&s, l) >= chi.sse - 1e-15);
        let mu = ln.mu_hat + rng.random_range(-0.05..0.05);
        let sigma = ln.sigma_hat * (1.0 + rng.random_range(-0.05..0.05));
        assert!(lognormal_objective(&s, mu, sigma) >= ln.sse - 1e-15);
    }
}

#[test]
fn synthetic_recovery() {
    let n = 50;
    let cum: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
    let truth = ChiFit { lambda_hat: 3.0, sse: 0.0 };
    let d: Vec<f64> = cum[..n - 1].iter().map(|&c| truth.quantile(c)).chain([20.0 / 3.0]).collect();
    let fit = fit_chi(&RadialSeries::new(d, cum.clone()).unwrap()).unwrap();
    assert!((fit.lambda_hat - 3.0).abs() < 1e-6 && fit.sse < 1e-12, "{fit:?}");

    let truth = LogNormalFit { mu_hat: 0.5, sigma_hat: 0.3, sse: 0.0, degenerate: false };
    let d: Vec<f64> = cum[..n - 1].iter().map(|&c| truth.quantile(c)).chain([20.0]).collect();
    let fit = fit_lognormal(&RadialSeries::new(d, cum).unwrap()).unwrap();
    assert!((fit.mu_hat - 0.5).abs() < 1e-5 && (fit.sigma_hat - 0.3).abs() < 1e-5 && fit.sse < 1e-12, "{fit:?}");
}

fn dataset() -> impl Strategy<Value = Vec<([f64; 2], f64)>> {
    prop::collection::vec(((-5.0..5.0f64, -3.0..3.0f64), 0.05..1.0f64), 8..40)
        .prop_map(|v| v.into_iter().map(|((x, y), w)| ([x, y], w)).collect())
}

fn full_fit(points: &[[f64; 2]], weights: &[f64]) -> Option<(BinormalFit, RadialSeries, ChiFit, LogNormalFit)> {
    let fit = BinormalFit::from_weighted(points, weights).ok()?;
    let d: Vec<f64> = points.iter().map(|&p| mahalanobis(p, &fit)).collect();
    let s = RadialSeries::from_weighted(&d, weights).ok()?;
    let chi = fit_chi(&s).ok()?;
    let ln = fit_lognormal(&s).ok()?;
    Some((fit, s, chi, ln))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn weight_scale_invariance(data in dataset(), scale in 0.01..100.0f64) {
        let (pts, w): (Vec<[f64; 2]>, Vec<f64>) = data.into_iter().unzip();
        let scaled: Vec<f64> = w.iter().map(|v| v * scale).collect();
        let (Some(a), Some(b)) = (full_fit(&pts, &w), full_fit(&pts, &scaled)) else {
            return Ok(());
        };
        for k in 0..2 {
            prop_assert!(close(a.0.mean[k], b.0.mean[k], 1e-10));
        }
        for (x, y) in a.0.cov.entries().iter().zip(b.0.cov.entries()) {
            prop_assert!(close(*x, *y, 1e-10));
        }
        for (x, y) in a.1.cum_weights().iter().zip(b.1.cum_weights()) {
            prop_assert!(close(*x, *y, 1e-10));
        }
        prop_assert!(close(a.2.lambda_hat, b.2.lambda_hat, 1e-8));
        prop_assert!(close(a.2.sse, b.2.sse, 1e-8));
        prop_assert!(close(a.3.mu_hat, b.3.mu_hat, 1e-8));
        prop_assert!(close(a.3.sigma_hat, b.3.sigma_hat, 1e-8));
        prop_assert!(close(a.3.sse, b.3.sse, 1e-8));
    }

    #[test]
    fn affine_equivariance(
        data in dataset(),
        m in prop::array::uniform4(-3.0..3.0f64),
        shift in prop::array::uniform2(-100.0..100.0f64),
    ) {
        let det = m[0] * m[3] - m[1] * m[2];
        prop_assume!(det.abs() > 0.3);
        let (pts, w): (Vec<[f64; 2]>, Vec<f64>) = data.into_iter().unzip();
        let map = |p: [f64; 2]| [m[0] * p[0] + m[1] * p[1] + shift[0], m[2] * p[0] + m[3] * p[1] + shift[1]];
        let moved: Vec<[f64; 2]> = pts.iter().map(|&p| map(p)).collect();
        let (Some(a), Some(b)) = (full_fit(&pts, &w), full_fit(&moved, &w)) else {
            return Ok(());
        };
        let mu = map(a.0.mean);
        for k in 0..2 {
            prop_assert!(close(mu[k], b.0.mean[k], 1e-8));
        }
        let s = [[a.0.cov.get(0, 0), a.0.cov.get(0, 1)], [a.0.cov.get(1, 0), a.0.cov.get(1, 1)]];
        let am = [[m[0], m[1]], [m[2], m[3]]];
        for i in 0..2 {
            for j in 0..2 {
                let mut v = 0.0;
                for k in 0..2 {
                    for l in 0..2 {
                        v += am[i][k] * s[k][l] * am[j][l];
                    }
                }
                prop_assert!(close(v, b.0.cov.get(i, j), 1e-8));
            }
        }
        for (x, y) in a.1.distances().iter().zip(b.1.distances()) {
            prop_assert!(close(*x, *y, 1e-8));
        }
        prop_assert!(close(a.2.lambda_hat, b.2.lambda_hat, 1e-8));
        prop_assert!(close(a.2.sse, b.2.sse, 1e-8));
    }
}

