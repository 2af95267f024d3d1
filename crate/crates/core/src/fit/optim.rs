//! Derivative-free minimizers for the low-dimensional CDF objectives.

/// Outcome of a minimization: best point, objective there, and whether the
/// stopping criterion was met before the iteration cap.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum<P> {
    pub point: P,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

const GOLDEN: f64 = 0.381_966_011_250_105_1;

/// Brent's parabolic/golden-section search for a minimum of `f` on `[lo, hi]`.
///
/// Stops when the bracket around the current best point is within
/// `rel_tol · |x|` (plus a tiny absolute floor).
pub fn brent<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64, max_iter: usize) -> Minimum<f64> {
    let (mut a, mut b) = if lo < hi { (lo, hi) } else { (hi, lo) };
    let mut x = a + GOLDEN * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x);
    let mut fw = fx;
    let mut fv = fx;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for iter in 0..max_iter {
        let mid = 0.5 * (a + b);
        let tol1 = rel_tol * x.abs() + 1e-300;
        let tol2 = 2.0 * tol1;
        if (x - mid).abs() <= tol2 - 0.5 * (b - a) {
            return Minimum {
                point: x,
                value: fx,
                iterations: iter,
                converged: true,
            };
        }
        let mut golden = true;
        if e.abs() > tol1 {
            // Parabola through (v, fv), (w, fw), (x, fx).
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if mid >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= mid { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d >= 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Minimum {
        point: x,
        value: fx,
        iterations: max_iter,
        converged: false,
    }
}

/// Nelder–Mead simplex descent in two dimensions.
///
/// `steps` sets the initial simplex edge along each axis. Converges when the
/// simplex diameter drops below `diameter_tol`.
pub fn nelder_mead<F: Fn([f64; 2]) -> f64>(
    f: F,
    start: [f64; 2],
    steps: [f64; 2],
    diameter_tol: f64,
    max_iter: usize,
) -> Minimum<[f64; 2]> {
    let eval = |p: [f64; 2]| {
        let v = f(p);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex = [
        start,
        [start[0] + steps[0], start[1]],
        [start[0], start[1] + steps[1]],
    ];
    let mut values = simplex.map(eval);
    let lerp = |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];

    for iter in 0..max_iter {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = idx.map(|i| simplex[i]);
        values = idx.map(|i| values[i]);

        let diameter = (0..3)
            .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
            .map(|(i, j)| (simplex[i][0] - simplex[j][0]).hypot(simplex[i][1] - simplex[j][1]))
            .fold(0.0, f64::max);
        if diameter < diameter_tol {
            return Minimum {
                point: simplex[0],
                value: values[0],
                iterations: iter,
                converged: true,
            };
        }

        let centroid = lerp(simplex[0], simplex[1], 0.5);
        let worst = simplex[2];
        let reflected = lerp(centroid, worst, -1.0);
        let fr = eval(reflected);
        if fr < values[0] {
            let expanded = lerp(centroid, worst, -2.0);
            let fe = eval(expanded);
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
        } else {
            let (contracted, fc) = if fr < values[2] {
                let c = lerp(centroid, worst, -0.5);
                (c, eval(c))
            } else {
                let c = lerp(centroid, worst, 0.5);
                (c, eval(c))
            };
            if fc < values[2].min(fr) {
                simplex[2] = contracted;
                values[2] = fc;
            } else {
                for k in 1..3 {
                    simplex[k] = lerp(simplex[0], simplex[k], 0.5);
                    values[k] = eval(simplex[k]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&i, &j| values[i].total_cmp(&values[j])).unwrap();
    Minimum {
        point: simplex[best],
        value: values[best],
        iterations: max_iter,
        converged: false,
    }
}
