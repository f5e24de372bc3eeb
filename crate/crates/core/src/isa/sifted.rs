//! Two-stage feature selection.
//!
//! Stage one keeps every feature whose largest absolute Pearson correlation
//! with any solver's performance column reaches the threshold. Stage two
//! clusters the survivors with k-medoids under the distance `1 - |corr|`,
//! picks `k` in `2..=min(10, kept)` by mean silhouette and returns one medoid
//! per cluster.
//!
//! Correlations are rounded to 12 decimals before use so that the result
//! does not depend on the order in which instances were summed.

use crate::stats::pearson;

use super::IsaError;

pub const DEFAULT_THRESHOLD: f64 = 0.8;
pub const MAX_CLUSTERS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct SiftedResult {
    /// Medoid features in input column order.
    pub selected: Vec<String>,
    /// Stage-one survivors in input column order.
    pub passed: Vec<String>,
    /// Largest |corr| with any solver, per input feature.
    pub max_abs_correlation: Vec<f64>,
    /// Chosen cluster count; 0 when stage two did not run.
    pub k: usize,
    pub silhouette: f64,
    /// Set when no feature reached the threshold.
    pub diagnostic: Option<String>,
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// `features` is instances by features, `y` instances by solvers. Non-finite
/// `y` entries (failed runs) are ignored pairwise.
pub fn sifted_select(
    names: &[String],
    features: &[Vec<f64>],
    y: &[Vec<f64>],
    threshold: f64,
) -> Result<SiftedResult, IsaError> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(IsaError::InvalidParameter(format!("correlation threshold {threshold} outside [0, 1]")));
    }
    if features.len() != y.len() || features.is_empty() {
        return Err(IsaError::Shape);
    }
    let n = features.len();
    let f = names.len();
    let m = y[0].len();
    if features.iter().any(|r| r.len() != f) || y.iter().any(|r| r.len() != m) {
        return Err(IsaError::Shape);
    }
    let column = |j: usize| -> Vec<f64> { features.iter().map(|r| r[j]).collect() };
    let columns: Vec<Vec<f64>> = (0..f).map(column).collect();
    let y_columns: Vec<Vec<f64>> = (0..m).map(|a| y.iter().map(|r| r[a]).collect()).collect();

    let max_abs_correlation: Vec<f64> =
        columns.iter().map(|c| y_columns.iter().map(|ya| round12(pearson(c, ya).abs())).fold(0.0, f64::max)).collect();
    let passed_idx: Vec<usize> = (0..f).filter(|&j| max_abs_correlation[j] >= threshold).collect();
    let passed: Vec<String> = passed_idx.iter().map(|&j| names[j].clone()).collect();
    log::debug!("sifted stage one kept {} of {} features over {n} instances", passed.len(), f);

    let mut result =
        SiftedResult { selected: Vec::new(), passed, max_abs_correlation, k: 0, silhouette: 0.0, diagnostic: None };
    match passed_idx.len() {
        0 => {
            let best = result.max_abs_correlation.iter().copied().fold(0.0, f64::max);
            result.diagnostic =
                Some(format!("no feature reaches |corr| >= {threshold}; the strongest reaches {best:.4}"));
            return Ok(result);
        }
        1 | 2 => {
            // Too few for a meaningful clustering: every survivor is its
            // own medoid.
            result.selected = result.passed.clone();
            result.k = passed_idx.len();
            return Ok(result);
        }
        _ => {}
    }

    let kept = passed_idx.len();
    let mut dist = vec![vec![0.0; kept]; kept];
    for a in 0..kept {
        for b in a + 1..kept {
            let d = 1.0 - round12(pearson(&columns[passed_idx[a]], &columns[passed_idx[b]]).abs());
            dist[a][b] = d;
            dist[b][a] = d;
        }
    }
    let mut best: Option<(f64, usize, Vec<usize>)> = None;
    for k in 2..=MAX_CLUSTERS.min(kept) {
        let medoids = k_medoids(&dist, k);
        let s = mean_silhouette(&dist, &assign(&dist, &medoids));
        if best.as_ref().is_none_or(|(bs, _, _)| s > *bs) {
            best = Some((s, k, medoids));
        }
    }
    let (silhouette, k, mut medoids) = best.expect("at least one k is tried");
    medoids.sort_unstable();
    result.selected = medoids.iter().map(|&i| names[passed_idx[i]].clone()).collect();
    result.k = k;
    result.silhouette = silhouette;
    Ok(result)
}

/// Nearest medoid of every point; ties go to the earlier medoid.
pub fn assign(dist: &[Vec<f64>], medoids: &[usize]) -> Vec<usize> {
    (0..dist.len())
        .map(|i| {
            let mut best = 0;
            for (c, &m) in medoids.iter().enumerate() {
                if dist[i][m] < dist[i][medoids[best]] {
                    best = c;
                }
            }
            best
        })
        .collect()
}

fn total_cost(dist: &[Vec<f64>], medoids: &[usize]) -> f64 {
    (0..dist.len()).map(|i| medoids.iter().map(|&m| dist[i][m]).fold(f64::INFINITY, f64::min)).sum()
}

/// PAM: greedy BUILD followed by best-improvement SWAP. Deterministic; ties
/// go to the lower index.
pub fn k_medoids(dist: &[Vec<f64>], k: usize) -> Vec<usize> {
    let n = dist.len();
    let k = k.min(n);
    let mut medoids: Vec<usize> = Vec::with_capacity(k);
    while medoids.len() < k {
        let mut pick = None;
        let mut pick_cost = f64::INFINITY;
        for c in 0..n {
            if medoids.contains(&c) {
                continue;
            }
            medoids.push(c);
            let cost = total_cost(dist, &medoids);
            medoids.pop();
            if cost < pick_cost {
                pick = Some(c);
                pick_cost = cost;
            }
        }
        medoids.push(pick.expect("k <= n leaves a candidate"));
    }
    let mut cost = total_cost(dist, &medoids);
    loop {
        let mut best_swap = None;
        let mut best_cost = cost;
        for slot in 0..k {
            for c in 0..n {
                if medoids.contains(&c) {
                    continue;
                }
                let old = medoids[slot];
                medoids[slot] = c;
                let trial = total_cost(dist, &medoids);
                medoids[slot] = old;
                if trial < best_cost - 1e-12 {
                    best_cost = trial;
                    best_swap = Some((slot, c));
                }
            }
        }
        match best_swap {
            Some((slot, c)) => {
                medoids[slot] = c;
                cost = best_cost;
            }
            None => return medoids,
        }
    }
}

/// Mean silhouette; singleton clusters contribute 0.
pub fn mean_silhouette(dist: &[Vec<f64>], labels: &[usize]) -> f64 {
    let n = dist.len();
    if n == 0 {
        return 0.0;
    }
    let k = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut total = 0.0;
    for i in 0..n {
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for j in (0..n).filter(|&j| j != i) {
            sums[labels[j]] += dist[i][j];
            counts[labels[j]] += 1;
        }
        let own = labels[i];
        if counts[own] == 0 {
            continue;
        }
        let a = sums[own] / counts[own] as f64;
        let b = (0..k)
            .filter(|&c| c != own && counts[c] > 0)
            .map(|c| sums[c] / counts[c] as f64)
            .fold(f64::INFINITY, f64::min);
        if !b.is_finite() {
            continue;
        }
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    total / n as f64
}
