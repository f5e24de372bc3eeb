//! One breadth-first search per source yields girth, diameter, closeness,
//! Brandes betweenness and the geodesic-distance histogram.

use std::collections::VecDeque;
use std::sync::atomic::{AtomicBool, Ordering};

use super::{Deadline, FeatureError};
use crate::graph::Graph;
use crate::par::Parallelism;

/// Distance-based statistics of a connected graph.
#[derive(Debug, Clone, PartialEq)]
pub struct PathStats {
    /// Length of the shortest cycle; 0 when the graph is acyclic.
    pub girth: usize,
    pub diameter: usize,
    /// Normalized by `(n-1)(n-2)/2` unordered pairs.
    pub betweenness: Vec<f64>,
    /// `(n-1) / sum of distances`.
    pub closeness: Vec<f64>,
    /// Median of `d(u, v)` over unordered pairs `u < v`.
    pub geodesic_median: f64,
    pub geodesic_std: f64,
}

struct Partial {
    betweenness: Vec<f64>,
    closeness: Vec<(usize, f64)>,
    histogram: Vec<u64>,
    girth: usize,
    diameter: usize,
}

impl Partial {
    fn new(n: usize) -> Self {
        Partial {
            betweenness: vec![0.0; n],
            closeness: Vec::new(),
            histogram: Vec::new(),
            girth: usize::MAX,
            diameter: 0,
        }
    }

    fn merge(mut self, other: Partial) -> Partial {
        for (a, b) in self.betweenness.iter_mut().zip(&other.betweenness) {
            *a += b;
        }
        self.closeness.extend(other.closeness);
        if self.histogram.len() < other.histogram.len() {
            self.histogram.resize(other.histogram.len(), 0);
        }
        for (a, b) in self.histogram.iter_mut().zip(&other.histogram) {
            *a += b;
        }
        self.girth = self.girth.min(other.girth);
        self.diameter = self.diameter.max(other.diameter);
        self
    }
}

/// Requires a connected graph.
pub fn path_statistics(g: &Graph, par: Parallelism) -> Result<PathStats, FeatureError> {
    if !g.is_connected() {
        return Err(FeatureError::Disconnected);
    }
    path_statistics_until(g, par, &Deadline::unlimited())
}

pub(super) fn path_statistics_until(
    g: &Graph,
    par: Parallelism,
    deadline: &Deadline,
) -> Result<PathStats, FeatureError> {
    let n = g.node_count();
    let expired = AtomicBool::new(false);
    let total = par.fold_range(
        n,
        || Partial::new(n),
        |mut acc, s| {
            if expired.load(Ordering::Relaxed) {
                return acc;
            }
            if deadline.expired() {
                expired.store(true, Ordering::Relaxed);
                return acc;
            }
            single_source(g, s, &mut acc);
            acc
        },
        Partial::merge,
    );
    if expired.load(Ordering::Relaxed) {
        deadline.check("paths")?;
    }

    let mut closeness = vec![0.0; n];
    for (v, c) in total.closeness {
        closeness[v] = c;
    }
    // Brandes counts each unordered pair twice on undirected graphs.
    let scale = if n > 2 { 1.0 / ((n - 1) as f64 * (n - 2) as f64) } else { 0.0 };
    let betweenness = total.betweenness.iter().map(|b| b * scale).collect();
    let (geodesic_median, geodesic_std) = histogram_stats(&total.histogram);
    Ok(PathStats {
        girth: if total.girth == usize::MAX { 0 } else { total.girth },
        diameter: total.diameter,
        betweenness,
        closeness,
        geodesic_median,
        geodesic_std,
    })
}

fn single_source(g: &Graph, s: usize, acc: &mut Partial) {
    let n = g.node_count();
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut sigma = vec![0.0f64; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    dist[s] = 0;
    sigma[s] = 1.0;
    queue.push_back(s);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &w in g.neighbors(u) {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                parent[w] = u;
                queue.push_back(w);
            } else if w != parent[u] && dist[w] >= dist[u] {
                // Non-tree edge closes a cycle through the BFS tree.
                acc.girth = acc.girth.min(dist[u] + dist[w] + 1);
            }
            if dist[w] == dist[u] + 1 {
                sigma[w] += sigma[u];
            }
        }
    }

    let mut delta = vec![0.0f64; n];
    for &w in order.iter().rev() {
        for &v in g.neighbors(w) {
            if dist[v] != usize::MAX && dist[v] + 1 == dist[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
        }
        if w != s {
            acc.betweenness[w] += delta[w];
        }
    }

    let mut sum = 0usize;
    let mut ecc = 0usize;
    for (t, &d) in dist.iter().enumerate() {
        sum += d;
        ecc = ecc.max(d);
        if t > s {
            if acc.histogram.len() <= d {
                acc.histogram.resize(d + 1, 0);
            }
            acc.histogram[d] += 1;
        }
    }
    acc.diameter = acc.diameter.max(ecc);
    let closeness = if sum > 0 { (n - 1) as f64 / sum as f64 } else { 0.0 };
    acc.closeness.push((s, closeness));
}

/// Median and population std of a value histogram (`hist[d]` = count of `d`).
fn histogram_stats(hist: &[u64]) -> (f64, f64) {
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return (0.0, 0.0);
    }
    let kth = |k: u64| -> f64 {
        let mut seen = 0;
        for (d, &c) in hist.iter().enumerate() {
            seen += c;
            if seen > k {
                return d as f64;
            }
        }
        (hist.len() - 1) as f64
    };
    let median = if total % 2 == 1 { kth(total / 2) } else { 0.5 * (kth(total / 2 - 1) + kth(total / 2)) };
    let t = total as f64;
    let mean = hist.iter().enumerate().map(|(d, &c)| d as f64 * c as f64).sum::<f64>() / t;
    let var = hist.iter().enumerate().map(|(d, &c)| (d as f64 - mean).powi(2) * c as f64).sum::<f64>() / t;
    (median, var.sqrt())
}
