//! Independent reference implementations used as test oracles. None of
//! these share code with the library.
#![allow(dead_code)]

use std::path::PathBuf;

use hailchi::HailEvent;

pub fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/storm4_2010-01-20.csv")
}

pub fn fixture_events() -> Vec<HailEvent> {
    hailchi::report::load_events(&[fixture_path()], None).expect("fixture parses")
}

/// `(lon, lat, prob)` rows of the fixture read with plain string splitting.
pub fn fixture_rows() -> Vec<(f64, f64, f64)> {
    let text = std::fs::read_to_string(fixture_path()).unwrap();
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let cols: Vec<&str> = l.split(',').collect();
            (cols[1].parse().unwrap(), cols[2].parse().unwrap(), cols[3].parse().unwrap())
        })
        .collect()
}

/// Adaptive Simpson quadrature.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    // Split first so that narrow features are not missed by the initial
    // five-point sample.
    let pieces = 16;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|k| {
            let (lo, hi) = (a + k as f64 * h, a + (k + 1) as f64 * h);
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            step(f, lo, hi, fa, fm, fb, whole, tol / pieces as f64, 50)
        })
        .sum()
}

/// Composite trapezoid rule on a square grid; spectrally accurate for
/// smooth integrands that vanish at the box boundary.
pub fn trapezoid_2d(f: &dyn Fn(f64, f64) -> f64, half_width: f64, steps: usize) -> f64 {
    let h = 2.0 * half_width / steps as f64;
    let mut sum = 0.0;
    for i in 0..=steps {
        let x = -half_width + i as f64 * h;
        let wx = if i == 0 || i == steps { 0.5 } else { 1.0 };
        for j in 0..=steps {
            let y = -half_width + j as f64 * h;
            let wy = if j == 0 || j == steps { 0.5 } else { 1.0 };
            sum += wx * wy * f(x, y);
        }
    }
    sum * h * h
}

/// Root of a monotone function by bisection.
pub fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let increasing = f(hi) > f(lo);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol {
            return mid;
        }
        if (f(mid) > 0.0) == increasing {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// One-sample Kolmogorov–Smirnov statistic.
pub fn ks_statistic(samples: &mut [f64], cdf: &dyn Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// One agglomeration step: the two merged leaf sets and the merge height.
#[derive(Debug, Clone)]
pub struct OracleMerge {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub height: f64,
}

/// Textbook single linkage: at every step scan all cluster pairs and all
/// member pairs for the closest two clusters. O(n³).
pub fn brute_force_single_linkage(points: &[Vec<f64>]) -> Vec<OracleMerge> {
    let mut clusters: Vec<Vec<usize>> = (0..points.len()).map(|i| vec![i]).collect();
    let mut merges = Vec::new();
    while clusters.len() > 1 {
        let mut best = (f64::INFINITY, 0, 0);
        for a in 0..clusters.len() {
            for b in a + 1..clusters.len() {
                let mut d = f64::INFINITY;
                for &i in &clusters[a] {
                    for &j in &clusters[b] {
                        d = d.min(euclid(&points[i], &points[j]));
                    }
                }
                if d < best.0 {
                    best = (d, a, b);
                }
            }
        }
        let (height, a, b) = best;
        let right = clusters.remove(b);
        let left = clusters.remove(a);
        let mut joined = left.clone();
        joined.extend(&right);
        joined.sort_unstable();
        merges.push(OracleMerge {
            left: sorted(left),
            right: sorted(right),
            height,
        });
        clusters.push(joined);
    }
    merges
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// Kruskal minimum spanning tree edge weights, ascending.
pub fn mst_weights(points: &[Vec<f64>]) -> Vec<f64> {
    let n = points.len();
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            edges.push((euclid(&points[i], &points[j]), i, j));
        }
    }
    edges.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut out = Vec::new();
    for (w, i, j) in edges {
        let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
        if ri != rj {
            parent[ri] = rj;
            out.push(w);
        }
    }
    out
}

/// Leaf sets of both inputs of every merge in a library dendrogram.
pub fn dendrogram_leaf_sets(d: &hailchi::cluster::Dendrogram) -> Vec<(Vec<usize>, Vec<usize>, f64)> {
    let n = d.leaf_count;
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut out = Vec::new();
    for m in &d.merges {
        let left = sorted(members[m.left].clone());
        let right = sorted(members[m.right].clone());
        let mut joined = left.clone();
        joined.extend(&right);
        members.push(sorted(joined));
        out.push((left, right, m.height));
    }
    out
}

/// Partition as a sorted set of sorted member lists.
pub fn partition(labels: &[usize]) -> Vec<Vec<usize>> {
    let k = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut groups = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        groups[l].push(i);
    }
    groups.sort();
    groups
}

/// Compares two unordered merge inputs.
pub fn same_pair(a: (&[usize], &[usize]), b: (&[usize], &[usize])) -> bool {
    (a.0 == b.0 && a.1 == b.1) || (a.0 == b.1 && a.1 == b.0)
}
