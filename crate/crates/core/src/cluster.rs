//! Single-linkage agglomerative clustering of hail events into storms.
//!
//! The dendrogram is read off a minimum spanning tree of the complete
//! Euclidean graph (Prim, O(n²)): single-linkage merge heights are exactly
//! the MST edge weights in ascending order.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event::HailEvent;

pub const DEFAULT_JUMP_THRESHOLD: f64 = 3.0;
pub const DEFAULT_MIN_HEIGHT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClusterError {
    #[error("no events to cluster")]
    Empty,
    #[error("feature vector {index} has {found} components, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("feature vector {0} has a non-finite component")]
    NonFinite(usize),
    #[error("time scale {0} must be finite and nonnegative")]
    InvalidTimeScale(f64),
    #[error("jump threshold {0} must exceed 1")]
    InvalidThreshold(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub coords: Vec<f64>,
}

impl FeatureVector {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    fn distance(&self, other: &Self) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

/// `(lon, lat)` per event, plus `time_scale · seconds since the earliest
/// event` as a third coordinate when `time_scale > 0`.
pub fn event_features(
    events: &[HailEvent],
    time_scale: f64,
) -> Result<Vec<FeatureVector>, ClusterError> {
    if events.is_empty() {
        return Err(ClusterError::Empty);
    }
    if !(time_scale >= 0.0) || !time_scale.is_finite() {
        return Err(ClusterError::InvalidTimeScale(time_scale));
    }
    let first = events.iter().map(|e| e.time).min().expect("nonempty");
    Ok(events
        .iter()
        .map(|e| {
            let mut coords = vec![e.lon, e.lat];
            if time_scale > 0.0 {
                let dt = (e.time - first)
                    .to_std()
                    .expect("earliest event precedes all others")
                    .as_secs_f64();
                coords.push(time_scale * dt);
            }
            FeatureVector::new(coords)
        })
        .collect())
}

/// One agglomeration step. Leaves have ids `0..n`; merge `k` creates
/// cluster id `n + k`. `left < right`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub merges: Vec<Merge>,
    pub leaf_count: usize,
}

impl Dendrogram {
    pub fn heights(&self) -> Vec<f64> {
        self.merges.iter().map(|m| m.height).collect()
    }

    /// Leaf labels after applying the first `merge_count` merges. Labels are
    /// contiguous and numbered by first appearance in leaf order.
    pub fn assignments_after(&self, merge_count: usize) -> Vec<usize> {
        let n = self.leaf_count;
        let mut dsu = DisjointSets::new(n);
        let mut representative: Vec<usize> = (0..n).collect();
        for m in &self.merges[..merge_count.min(self.merges.len())] {
            let a = representative[m.left];
            let b = representative[m.right];
            let root = dsu.union(a, b);
            representative.push(root);
        }
        let mut label_of_root = vec![usize::MAX; n];
        let mut next = 0;
        (0..n)
            .map(|leaf| {
                let root = dsu.find(leaf);
                if label_of_root[root] == usize::MAX {
                    label_of_root[root] = next;
                    next += 1;
                }
                label_of_root[root]
            })
            .collect()
    }
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> usize {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        lo
    }
}

fn validate(features: &[FeatureVector]) -> Result<(), ClusterError> {
    let first = features.first().ok_or(ClusterError::Empty)?;
    let dim = first.coords.len();
    for (index, f) in features.iter().enumerate() {
        if f.coords.len() != dim {
            return Err(ClusterError::DimensionMismatch {
                index,
                expected: dim,
                found: f.coords.len(),
            });
        }
        if f.coords.iter().any(|c| !c.is_finite()) {
            return Err(ClusterError::NonFinite(index));
        }
    }
    Ok(())
}

/// Single-linkage dendrogram under the Euclidean metric.
///
/// Equal heights are ordered by the smallest `(leaf, leaf)` pair of the
/// underlying tree edge.
pub fn single_linkage(features: &[FeatureVector]) -> Result<Dendrogram, ClusterError> {
    validate(features)?;
    let n = features.len();

    // Prim's algorithm on the implicit complete graph.
    let mut edges: Vec<(f64, usize, usize)> = Vec::with_capacity(n.saturating_sub(1));
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut from = vec![0usize; n];
    let mut current = 0;
    in_tree[0] = true;
    for _ in 1..n {
        let mut next = usize::MAX;
        for j in 0..n {
            if in_tree[j] {
                continue;
            }
            let d = features[current].distance(&features[j]);
            if d < best[j] {
                best[j] = d;
                from[j] = current;
            }
            if next == usize::MAX || best[j] < best[next] {
                next = j;
            }
        }
        in_tree[next] = true;
        let (a, b) = (from[next].min(next), from[next].max(next));
        edges.push((best[next], a, b));
        current = next;
    }
    edges.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));

    let mut dsu = DisjointSets::new(n);
    // Current cluster id of each DSU root.
    let mut cluster_id: Vec<usize> = (0..n).collect();
    let mut size = vec![1usize; n];
    let merges = edges
        .into_iter()
        .enumerate()
        .map(|(k, (height, a, b))| {
            let (ra, rb) = (dsu.find(a), dsu.find(b));
            let (ia, ib) = (cluster_id[ra], cluster_id[rb]);
            let merged = size[ra] + size[rb];
            let root = dsu.union(ra, rb);
            cluster_id[root] = n + k;
            size[root] = merged;
            Merge {
                left: ia.min(ib),
                right: ia.max(ib),
                height,
                size: merged,
            }
        })
        .collect();
    Ok(Dendrogram {
        merges,
        leaf_count: n,
    })
}

/// Partition produced by cutting a dendrogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterCut {
    pub assignments: Vec<usize>,
    pub cluster_count: usize,
    /// Height ratio that triggered the cut, or the largest ratio seen when
    /// no merge qualified as a jump.
    pub jump_ratio: f64,
    /// Number of merges applied before the cut.
    pub merges_applied: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutRule {
    pub jump_threshold: f64,
    /// Merges at or below this height (duplicate locations) never serve as
    /// the reference height for a jump.
    pub min_height: f64,
}

impl Default for CutRule {
    fn default() -> Self {
        Self {
            jump_threshold: DEFAULT_JUMP_THRESHOLD,
            min_height: DEFAULT_MIN_HEIGHT,
        }
    }
}

pub fn cut_dendrogram(dendrogram: &Dendrogram, jump_threshold: f64) -> Result<ClusterCut, ClusterError> {
    cut_dendrogram_with(
        dendrogram,
        CutRule {
            jump_threshold,
            ..CutRule::default()
        },
    )
}

/// Stops agglomerating right before the first merge whose height exceeds
/// `jump_threshold` times the most recent merge height above `min_height`.
pub fn cut_dendrogram_with(dendrogram: &Dendrogram, rule: CutRule) -> Result<ClusterCut, ClusterError> {
    if !(rule.jump_threshold > 1.0) || !rule.jump_threshold.is_finite() {
        return Err(ClusterError::InvalidThreshold(rule.jump_threshold));
    }
    let mut reference: Option<f64> = None;
    let mut largest = 1.0f64;
    let mut cut = None;
    for (k, m) in dendrogram.merges.iter().enumerate() {
        if let Some(prev) = reference {
            let ratio = m.height / prev;
            if ratio > rule.jump_threshold {
                cut = Some((k, ratio));
                break;
            }
            largest = largest.max(ratio);
        }
        if m.height > rule.min_height {
            reference = Some(m.height);
        }
    }
    let (applied, jump_ratio) = cut.unwrap_or((dendrogram.merges.len(), largest));
    let assignments = dendrogram.assignments_after(applied);
    let cluster_count = assignments.iter().copied().max().map_or(0, |m| m + 1);
    Ok(ClusterCut {
        assignments,
        cluster_count,
        jump_ratio,
        merges_applied: applied,
    })
}
