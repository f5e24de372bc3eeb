//! The 35-feature description of a graph instance.
//!
//! Features fall into four groups that are timed separately: the path pass
//! (girth, diameter, betweenness, closeness, geodesic statistics), the
//! degree and eigenvector-centrality group, the dense spectral group and the
//! clique-specific group (k-core number, colouring/clique gap).

mod mcp;
mod paths;
mod spectral;
mod table;

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph::Graph;
use crate::par::Parallelism;
use crate::stats::{median, population_std};

pub use mcp::{core_numbers, greedy_clique, k_core_number, largest_first_coloring, mcp_specific_features, McpFeatures};
pub use paths::{path_statistics, PathStats};
pub use spectral::{spectral_features, SpectralFeatures};
pub use table::{read_features_csv, write_features_csv};

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("graph is disconnected; distance-based features are undefined")]
    Disconnected,
    #[error("feature group {group} exceeded the {limit:?} budget")]
    Timeout { group: &'static str, limit: Duration },
    #[error("power iteration did not converge after {0} iterations")]
    NonConvergence(usize),
    #[error("graph needs at least {0} nodes")]
    TooSmall(usize),
    #[error("features table: {0}")]
    Table(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

macro_rules! features {
    ($($variant:ident => $name:literal,)*) => {
        /// Feature identifiers in canonical column order.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Feature {
            $($variant,)*
        }

        impl Feature {
            pub const ALL: [Feature; FEATURE_COUNT] = [$(Feature::$variant,)*];

            /// Canonical snake_case column name.
            pub fn name(self) -> &'static str {
                match self {
                    $(Feature::$variant => $name,)*
                }
            }
        }
    };
}

pub const FEATURE_COUNT: usize = 35;

features! {
    NodeCount => "node_count",
    EdgeCount => "edge_count",
    Density => "density",
    Girth => "girth",
    Diameter => "diameter",
    MedianBetweenness => "median_betweenness_centrality",
    MedianCloseness => "median_closeness_centrality",
    MedianDegreeCentrality => "median_degree_centrality",
    MedianEigenvectorCentrality => "median_eigenvector_centrality",
    StdBetweenness => "std_betweenness_centrality",
    StdCloseness => "std_closeness_centrality",
    StdDegreeCentrality => "std_degree_centrality",
    StdEigenvectorCentrality => "std_eigenvector_centrality",
    MedianDegree => "median_degree",
    StdDegree => "std_degree",
    MedianNeighborMedianDegree => "median_neighbor_median_degree",
    StdNeighborMedianDegree => "std_neighbor_median_degree",
    MedianGeodesic => "median_geodesic_distance",
    StdGeodesic => "std_geodesic_distance",
    GlobalClustering => "global_clustering_coefficient",
    EvenClosedWalkProportion => "even_closed_walk_proportion",
    SpectralRadius => "spectral_radius",
    LaplacianSpectralRadius => "laplacian_spectral_radius",
    Energy => "energy",
    StdAdjacencyEigenvalues => "std_adjacency_eigenvalues",
    SmallestNonzeroLaplacian => "smallest_nonzero_laplacian",
    SecondSmallestNonzeroLaplacian => "second_smallest_nonzero_laplacian",
    SecondLargestLaplacian => "second_largest_laplacian",
    SmallestAdjacency => "smallest_adjacency",
    SecondSmallestAdjacency => "second_smallest_adjacency",
    SecondLargestAdjacency => "second_largest_adjacency",
    GapLargestSecondLargestAdjacency => "gap_largest_second_largest_adjacency",
    GapLargestSmallestLaplacian => "gap_largest_smallest_laplacian",
    KCoreNumber => "k_core_number",
    ChromaticMinusGreedyCliqueGap => "chromatic_minus_greedy_clique_gap",
}

impl Feature {
    pub fn from_name(name: &str) -> Option<Feature> {
        Feature::ALL.iter().copied().find(|f| f.name() == name)
    }

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }
}

/// Wall time spent in each feature group.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FeatureTimings {
    pub paths: f64,
    pub centrality: f64,
    pub spectral: f64,
    pub clique: f64,
}

impl FeatureTimings {
    pub fn total(&self) -> f64 {
        self.paths + self.centrality + self.spectral + self.clique
    }
}

/// All 35 features of one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub instance_id: String,
    values: [f64; FEATURE_COUNT],
    pub timings: FeatureTimings,
}

impl FeatureVector {
    pub fn from_values(instance_id: impl Into<String>, values: [f64; FEATURE_COUNT]) -> Self {
        FeatureVector { instance_id: instance_id.into(), values, timings: FeatureTimings::default() }
    }

    pub fn values(&self) -> &[f64; FEATURE_COUNT] {
        &self.values
    }

    pub fn get(&self, feature: Feature) -> f64 {
        self.values[feature.index()]
    }

    pub fn by_name(&self, name: &str) -> Option<f64> {
        Feature::from_name(name).map(|f| self.get(f))
    }

    fn set(&mut self, feature: Feature, value: f64) {
        self.values[feature.index()] = value;
    }
}

impl std::ops::Index<Feature> for FeatureVector {
    type Output = f64;

    fn index(&self, feature: Feature) -> &f64 {
        &self.values[feature.index()]
    }
}

/// Eigenvector-centrality power iteration limits.
pub const EIGENVECTOR_TOLERANCE: f64 = 1e-8;
pub const EIGENVECTOR_MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Deadline {
    start: Instant,
    limit: Duration,
}

impl Deadline {
    pub(crate) fn new(limit: Duration) -> Self {
        Deadline { start: Instant::now(), limit }
    }

    pub(crate) fn unlimited() -> Self {
        Self::new(Duration::MAX)
    }

    pub(crate) fn expired(&self) -> bool {
        self.start.elapsed() > self.limit
    }

    pub(crate) fn check(&self, group: &'static str) -> Result<(), FeatureError> {
        if self.expired() {
            Err(FeatureError::Timeout { group, limit: self.limit })
        } else {
            Ok(())
        }
    }
}

/// Compute all features with the default parallel strategy.
pub fn compute_features(g: &Graph, timeout: Duration) -> Result<FeatureVector, FeatureError> {
    compute_features_with(g, timeout, Parallelism::default())
}

/// Compute all features; the whole computation shares one deadline and any
/// group finishing past it aborts with [`FeatureError::Timeout`].
pub fn compute_features_with(g: &Graph, timeout: Duration, par: Parallelism) -> Result<FeatureVector, FeatureError> {
    let n = g.node_count();
    if n < 2 {
        return Err(FeatureError::TooSmall(2));
    }
    if !g.is_connected() {
        return Err(FeatureError::Disconnected);
    }
    let deadline = Deadline::new(timeout);
    let mut fv = FeatureVector::from_values(g.name(), [0.0; FEATURE_COUNT]);

    fv.set(Feature::NodeCount, n as f64);
    fv.set(Feature::EdgeCount, g.edge_count() as f64);
    fv.set(Feature::Density, g.density());

    let t = Instant::now();
    let paths = paths::path_statistics_until(g, par, &deadline)?;
    fv.timings.paths = t.elapsed().as_secs_f64();
    deadline.check("paths")?;
    fv.set(Feature::Girth, paths.girth as f64);
    fv.set(Feature::Diameter, paths.diameter as f64);
    fv.set(Feature::MedianBetweenness, median(&paths.betweenness));
    fv.set(Feature::StdBetweenness, population_std(&paths.betweenness));
    fv.set(Feature::MedianCloseness, median(&paths.closeness));
    fv.set(Feature::StdCloseness, population_std(&paths.closeness));
    fv.set(Feature::MedianGeodesic, paths.geodesic_median);
    fv.set(Feature::StdGeodesic, paths.geodesic_std);

    let t = Instant::now();
    let degrees: Vec<f64> = g.degrees().into_iter().map(|d| d as f64).collect();
    let degree_centrality: Vec<f64> = degrees.iter().map(|d| d / (n - 1) as f64).collect();
    let neighbor_medians: Vec<f64> = (0..n)
        .map(|v| {
            let nd: Vec<f64> = g.neighbors(v).iter().map(|&w| degrees[w]).collect();
            median(&nd)
        })
        .collect();
    let eigenvector = eigenvector_centrality_until(g, &deadline)?;
    fv.set(Feature::MedianDegreeCentrality, median(&degree_centrality));
    fv.set(Feature::StdDegreeCentrality, population_std(&degree_centrality));
    fv.set(Feature::MedianEigenvectorCentrality, median(&eigenvector));
    fv.set(Feature::StdEigenvectorCentrality, population_std(&eigenvector));
    fv.set(Feature::MedianDegree, median(&degrees));
    fv.set(Feature::StdDegree, population_std(&degrees));
    fv.set(Feature::MedianNeighborMedianDegree, median(&neighbor_medians));
    fv.set(Feature::StdNeighborMedianDegree, population_std(&neighbor_medians));
    fv.set(Feature::GlobalClustering, global_clustering(g, par));
    fv.timings.centrality = t.elapsed().as_secs_f64();
    deadline.check("centrality")?;

    let t = Instant::now();
    let s = spectral_features(g)?;
    fv.timings.spectral = t.elapsed().as_secs_f64();
    deadline.check("spectral")?;
    fv.set(Feature::EvenClosedWalkProportion, s.even_closed_walk_proportion);
    fv.set(Feature::SpectralRadius, s.spectral_radius);
    fv.set(Feature::LaplacianSpectralRadius, s.laplacian_spectral_radius);
    fv.set(Feature::Energy, s.energy);
    fv.set(Feature::StdAdjacencyEigenvalues, s.std_adjacency_eigenvalues);
    fv.set(Feature::SmallestNonzeroLaplacian, s.smallest_nonzero_laplacian);
    fv.set(Feature::SecondSmallestNonzeroLaplacian, s.second_smallest_nonzero_laplacian);
    fv.set(Feature::SecondLargestLaplacian, s.second_largest_laplacian);
    fv.set(Feature::SmallestAdjacency, s.smallest_adjacency);
    fv.set(Feature::SecondSmallestAdjacency, s.second_smallest_adjacency);
    fv.set(Feature::SecondLargestAdjacency, s.second_largest_adjacency);
    fv.set(Feature::GapLargestSecondLargestAdjacency, s.gap_largest_second_largest_adjacency);
    fv.set(Feature::GapLargestSmallestLaplacian, s.gap_largest_smallest_laplacian);

    let t = Instant::now();
    let m = mcp_specific_features(g);
    fv.timings.clique = t.elapsed().as_secs_f64();
    deadline.check("clique")?;
    fv.set(Feature::KCoreNumber, m.k_core_number as f64);
    fv.set(Feature::ChromaticMinusGreedyCliqueGap, m.chromatic_minus_greedy_clique_gap as f64);

    Ok(fv)
}

/// Median and population standard deviation of the four centralities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralityStats {
    pub median_betweenness: f64,
    pub std_betweenness: f64,
    pub median_closeness: f64,
    pub std_closeness: f64,
    pub median_degree: f64,
    pub std_degree: f64,
    pub median_eigenvector: f64,
    pub std_eigenvector: f64,
}

pub fn centrality_stats(g: &Graph) -> Result<CentralityStats, FeatureError> {
    if !g.is_connected() {
        return Err(FeatureError::Disconnected);
    }
    let n = g.node_count();
    let paths = path_statistics(g, Parallelism::default())?;
    let dc: Vec<f64> = if n > 1 { g.degrees().iter().map(|&d| d as f64 / (n - 1) as f64).collect() } else { vec![0.0] };
    let ev = eigenvector_centrality(g)?;
    Ok(CentralityStats {
        median_betweenness: median(&paths.betweenness),
        std_betweenness: population_std(&paths.betweenness),
        median_closeness: median(&paths.closeness),
        std_closeness: population_std(&paths.closeness),
        median_degree: median(&dc),
        std_degree: population_std(&dc),
        median_eigenvector: median(&ev),
        std_eigenvector: population_std(&ev),
    })
}

/// Unit-norm dominant eigenvector of the adjacency matrix.
///
/// Iterates on `A + I`, which has the same eigenvectors but a strictly
/// dominant Perron root on bipartite graphs.
pub fn eigenvector_centrality(g: &Graph) -> Result<Vec<f64>, FeatureError> {
    eigenvector_centrality_until(g, &Deadline::unlimited())
}

fn eigenvector_centrality_until(g: &Graph, deadline: &Deadline) -> Result<Vec<f64>, FeatureError> {
    let n = g.node_count();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut next = vec![0.0; n];
    for iter in 0..EIGENVECTOR_MAX_ITERATIONS {
        for v in 0..n {
            next[v] = x[v] + g.neighbors(v).iter().map(|&w| x[w]).sum::<f64>();
        }
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(x);
        }
        let mut change: f64 = 0.0;
        for v in 0..n {
            next[v] /= norm;
            change = change.max((next[v] - x[v]).abs());
        }
        std::mem::swap(&mut x, &mut next);
        if change < EIGENVECTOR_TOLERANCE {
            return Ok(x);
        }
        if iter % 64 == 63 {
            deadline.check("centrality")?;
        }
    }
    Err(FeatureError::NonConvergence(EIGENVECTOR_MAX_ITERATIONS))
}

/// Transitivity `3 * triangles / connected triples`, counted per edge by
/// intersecting sorted neighbour lists.
pub fn global_clustering(g: &Graph, par: Parallelism) -> f64 {
    let triples: f64 = g.degrees().iter().map(|&d| (d * d.saturating_sub(1) / 2) as f64).sum();
    if triples == 0.0 {
        return 0.0;
    }
    // Each triangle is seen once per edge, i.e. three times.
    let closed: usize =
        par.map(g.edges(), |&(u, v)| sorted_intersection_len(g.neighbors(u), g.neighbors(v))).into_iter().sum();
    closed as f64 / triples
}

fn sorted_intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};

    fn k(n: usize) -> Graph {
        generate(GraphKind::Complete, n, 0.0, 0).unwrap()
    }

    #[test]
    fn names_are_unique_and_ordered() {
        let mut names: Vec<_> = Feature::ALL.iter().map(|f| f.name()).collect();
        assert_eq!(names[0], "node_count");
        assert_eq!(names[34], "chromatic_minus_greedy_clique_gap");
        names.sort();
        names.dedup();
        assert_eq!(names.len(), FEATURE_COUNT);
        for f in Feature::ALL {
            assert_eq!(Feature::from_name(f.name()), Some(f));
        }
    }

    #[test]
    fn triangle_fixture() {
        let fv = compute_features(&k(3), Duration::from_secs(10)).unwrap();
        assert_eq!(fv[Feature::Density], 1.0);
        assert!((fv[Feature::SpectralRadius] - 2.0).abs() < 1e-9);
        assert!((fv[Feature::Energy] - 4.0).abs() < 1e-9);
        assert!((fv[Feature::LaplacianSpectralRadius] - 3.0).abs() < 1e-9);
        assert_eq!(fv[Feature::GlobalClustering], 1.0);
        assert_eq!(fv[Feature::Girth], 3.0);
        assert_eq!(fv[Feature::Diameter], 1.0);
        assert_eq!(fv[Feature::KCoreNumber], 2.0);
    }

    #[test]
    fn four_cycle_fixture() {
        let c4 = generate(GraphKind::Cycle, 4, 0.0, 0).unwrap();
        let fv = compute_features(&c4, Duration::from_secs(10)).unwrap();
        assert!((fv[Feature::SpectralRadius] - 2.0).abs() < 1e-9);
        assert!((fv[Feature::EvenClosedWalkProportion] - 1.0).abs() < 1e-9);
        assert_eq!(fv[Feature::Girth], 4.0);
        assert_eq!(fv[Feature::Diameter], 2.0);
    }

    #[test]
    fn disconnected_and_tiny_graphs_are_refused() {
        let g = Graph::new("t", 4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(compute_features(&g, Duration::from_secs(1)), Err(FeatureError::Disconnected)));
        assert!(matches!(compute_features(&k(1), Duration::from_secs(1)), Err(FeatureError::TooSmall(2))));
    }

    #[test]
    fn zero_budget_times_out() {
        let g = generate(GraphKind::Gnp, 120, 0.3, 1).unwrap();
        let err = compute_features(&g, Duration::ZERO).unwrap_err();
        assert!(matches!(err, FeatureError::Timeout { .. }), "{err}");
    }

    #[test]
    fn star_and_complete_centralities() {
        let star = generate(GraphKind::Star, 5, 0.0, 0).unwrap();
        let s = centrality_stats(&star).unwrap();
        assert_eq!(s.median_betweenness, 0.0);
        let c = centrality_stats(&k(5)).unwrap();
        assert!(c.std_degree.abs() < 1e-12);
        assert!(c.std_eigenvector.abs() < 1e-9);
    }

    #[test]
    fn eigenvector_converges_on_bipartite() {
        let c6 = generate(GraphKind::Cycle, 6, 0.0, 0).unwrap();
        let x = eigenvector_centrality(&c6).unwrap();
        for v in &x {
            assert!((v - 1.0 / 6f64.sqrt()).abs() < 1e-9);
        }
        let p4 = generate(GraphKind::Path, 4, 0.0, 0).unwrap();
        let x = eigenvector_centrality(&p4).unwrap();
        assert!(x[1] > x[0] && (x[1] - x[2]).abs() < 1e-8);
    }

    #[test]
    fn neighbor_median_degree_on_path() {
        // P4 degrees 1,2,2,1; neighbour medians: 2, 1.5, 1.5, 2.
        let p4 = generate(GraphKind::Path, 4, 0.0, 0).unwrap();
        let fv = compute_features(&p4, Duration::from_secs(5)).unwrap();
        assert_eq!(fv[Feature::MedianNeighborMedianDegree], 1.75);
        assert!((fv[Feature::StdNeighborMedianDegree] - 0.25).abs() < 1e-15);
        assert_eq!(fv[Feature::Girth], 0.0);
    }
}
