use nalgebra::DMatrix;

use super::FeatureError;
use crate::graph::Graph;
use crate::stats::population_std;

/// Adjacency and Laplacian eigenvalue features.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFeatures {
    /// Adjacency eigenvalues, ascending.
    pub adjacency: Vec<f64>,
    /// Laplacian (`D - A`) eigenvalues, ascending.
    pub laplacian: Vec<f64>,
    pub even_closed_walk_proportion: f64,
    pub spectral_radius: f64,
    pub laplacian_spectral_radius: f64,
    pub energy: f64,
    pub std_adjacency_eigenvalues: f64,
    pub smallest_nonzero_laplacian: f64,
    /// 0 when fewer than two non-zero Laplacian eigenvalues exist.
    pub second_smallest_nonzero_laplacian: f64,
    pub second_largest_laplacian: f64,
    pub smallest_adjacency: f64,
    pub second_smallest_adjacency: f64,
    pub second_largest_adjacency: f64,
    pub gap_largest_second_largest_adjacency: f64,
    pub gap_largest_smallest_laplacian: f64,
}

/// Relative tolerance below which a Laplacian eigenvalue counts as zero.
pub const LAPLACIAN_ZERO_TOLERANCE: f64 = 1e-8;

fn sorted_eigenvalues(m: DMatrix<f64>) -> Result<Vec<f64>, FeatureError> {
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    if ev.iter().any(|v| !v.is_finite()) {
        return Err(FeatureError::NonConvergence(0));
    }
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Full dense eigendecomposition of `A` and `L = D - A`.
pub fn spectral_features(g: &Graph) -> Result<SpectralFeatures, FeatureError> {
    let n = g.node_count();
    if n < 2 {
        return Err(FeatureError::TooSmall(2));
    }
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut l = DMatrix::<f64>::zeros(n, n);
    for &(u, v) in g.edges() {
        a[(u, v)] = 1.0;
        a[(v, u)] = 1.0;
        l[(u, v)] = -1.0;
        l[(v, u)] = -1.0;
    }
    for v in 0..n {
        l[(v, v)] = g.degree(v) as f64;
    }
    let adjacency = sorted_eigenvalues(a)?;
    let laplacian = sorted_eigenvalues(l)?;

    let lambda_max = adjacency[n - 1];
    let lap_max = laplacian[n - 1];
    let zero_tol = LAPLACIAN_ZERO_TOLERANCE * lap_max.abs();
    let mut nonzero = laplacian.iter().copied().filter(|&v| v > zero_tol);
    let smallest_nonzero_laplacian = nonzero.next().unwrap_or(0.0);
    let second_smallest_nonzero_laplacian = nonzero.next().unwrap_or(0.0);

    Ok(SpectralFeatures {
        even_closed_walk_proportion: even_closed_walk_proportion(&adjacency),
        spectral_radius: lambda_max,
        laplacian_spectral_radius: lap_max,
        energy: adjacency.iter().map(|v| v.abs()).sum(),
        std_adjacency_eigenvalues: population_std(&adjacency),
        smallest_nonzero_laplacian,
        second_smallest_nonzero_laplacian,
        second_largest_laplacian: laplacian[n - 2],
        smallest_adjacency: adjacency[0],
        second_smallest_adjacency: adjacency[1],
        second_largest_adjacency: adjacency[n - 2],
        gap_largest_second_largest_adjacency: lambda_max - adjacency[n - 2],
        gap_largest_smallest_laplacian: lap_max - laplacian[0],
        adjacency,
        laplacian,
    })
}

/// `sum cosh(l) / sum exp(l)` over adjacency eigenvalues.
///
/// Evaluated with every exponent shifted by `-max(l)` so dense graphs with a
/// large spectral radius do not overflow.
pub fn even_closed_walk_proportion(eigenvalues: &[f64]) -> f64 {
    let shift = eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !shift.is_finite() {
        return 0.0;
    }
    let (mut even, mut all) = (0.0, 0.0);
    for &l in eigenvalues {
        let up = (l - shift).exp();
        let down = (-l - shift).exp();
        even += 0.5 * (up + down);
        all += up;
    }
    (even / all).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};

    #[test]
    fn triangle_spectra() {
        let s = spectral_features(&generate(GraphKind::Complete, 3, 0.0, 0).unwrap()).unwrap();
        assert!((s.smallest_adjacency + 1.0).abs() < 1e-12);
        assert!((s.second_largest_adjacency + 1.0).abs() < 1e-12);
        assert!((s.gap_largest_second_largest_adjacency - 3.0).abs() < 1e-12);
        assert!((s.gap_largest_smallest_laplacian - 3.0).abs() < 1e-12);
        assert!((s.smallest_nonzero_laplacian - 3.0).abs() < 1e-12);
        assert!((s.second_smallest_nonzero_laplacian - 3.0).abs() < 1e-12);
        // Hand evaluation: (cosh 2 + 2 cosh 1) / (e^2 + 2 e^-1).
        let expected = (2f64.cosh() + 2.0 * 1f64.cosh()) / (2f64.exp() + 2.0 * (-1f64).exp());
        assert!((s.even_closed_walk_proportion - expected).abs() < 1e-12);
        assert!((expected - 0.8429).abs() < 5e-5);
    }

    #[test]
    fn shifted_evaluation_survives_large_spectra() {
        let v = even_closed_walk_proportion(&[-1000.0, 0.0, 1000.0]);
        assert!((v - 1.0).abs() < 1e-12);
        let v = even_closed_walk_proportion(&[-1.0, -1.0, 1500.0]);
        assert!(v.is_finite() && v > 0.49 && v < 0.51);
    }

    #[test]
    fn single_edge() {
        let g = generate(GraphKind::Path, 2, 0.0, 0).unwrap();
        let s = spectral_features(&g).unwrap();
        assert!((s.smallest_nonzero_laplacian - 2.0).abs() < 1e-12);
        assert_eq!(s.second_smallest_nonzero_laplacian, 0.0);
    }
}
