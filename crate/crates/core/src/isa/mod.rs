//! The 2-D instance space.
//!
//! Normalization ([`fit_normalization`]), correlation-and-silhouette
//! feature selection ([`sifted_select`]), the linear projection
//! ([`ProjectionModel`]), the convex boundary of the projected corpus and
//! per-solver footprints ([`footprint`]), plus an SVG scatter for reports.

mod hull;
mod normalize;
mod projection;
mod report;
mod sifted;

use thiserror::Error;

pub use hull::{cloister_boundary, convex_hull, footprint, in_convex_polygon, polygon_area, Footprint, Point};
pub use normalize::{fit_normalization, signed_log, FeatureNorm, NormalizationParams, SKEW_LIMIT};
pub use projection::{
    fit_projection, fmt17, principal_components, read_matrix, Pca, ProjectionModel, ProjectionSource,
    DEGENERATE_VARIANCE,
};
pub use report::render_svg;
pub use sifted::{assign, k_medoids, mean_silhouette, sifted_select, SiftedResult, DEFAULT_THRESHOLD, MAX_CLUSTERS};

#[derive(Debug, Error)]
pub enum IsaError {
    #[error("need at least {needed} instances, got {got}")]
    TooFewInstances { needed: usize, got: usize },
    #[error("matrix dimensions do not line up")]
    Shape,
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("feature {0:?} is missing")]
    MissingFeature(String),
    #[error("fewer than two non-degenerate principal directions (variances {variances:?})")]
    RankDeficient { variances: Vec<f64> },
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("{0}")]
    InvalidParameter(String),
    #[error("model file: {0}")]
    Model(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Outcome of [`fit_instance_space`].
#[derive(Debug, Clone)]
pub struct InstanceSpace {
    pub model: ProjectionModel,
    pub sifted: SiftedResult,
    /// Names of the non-constant features the selection saw.
    pub candidates: Vec<String>,
    /// Threshold at which at least two features were selected.
    pub threshold: f64,
}

/// Normalize, select and project in one go.
///
/// `rows` hold raw feature values in `names` order, `y` the matching
/// performance rows. When fewer than two features reach `threshold` it is
/// lowered in steps of 0.1 until two do.
pub fn fit_instance_space(
    names: &[String],
    rows: &[Vec<f64>],
    y: &[Vec<f64>],
    threshold: f64,
) -> Result<InstanceSpace, IsaError> {
    let norm = fit_normalization(names, rows)?;
    let candidates = norm.names();
    let idx: Vec<usize> = candidates
        .iter()
        .map(|k| names.iter().position(|n| n == k).ok_or_else(|| IsaError::MissingFeature(k.clone())))
        .collect::<Result<_, _>>()?;
    let kept: Vec<Vec<f64>> = rows.iter().map(|r| idx.iter().map(|&j| r[j]).collect()).collect();
    let normalized = norm.apply_rows(&candidates, &kept)?;
    let mut threshold = threshold;
    let sifted = loop {
        let res = sifted_select(&candidates, &normalized, y, threshold)?;
        if res.selected.len() >= 2 || threshold <= 0.0 {
            break res;
        }
        let lower = ((threshold - 0.1) * 10.0).round().max(0.0) / 10.0;
        log::warn!(
            "{} feature(s) selected at correlation threshold {threshold}; retrying at {lower}",
            res.selected.len()
        );
        threshold = lower;
    };
    if sifted.selected.len() < 2 {
        return Err(IsaError::InvalidParameter(format!(
            "feature selection kept {} feature(s); a projection needs 2",
            sifted.selected.len()
        )));
    }
    let sel: Vec<usize> = sifted
        .selected
        .iter()
        .map(|s| candidates.iter().position(|k| k == s).expect("selected from candidates"))
        .collect();
    let sel_rows: Vec<Vec<f64>> = normalized.iter().map(|r| sel.iter().map(|&j| r[j]).collect()).collect();
    let model = fit_projection(&sifted.selected, &sel_rows, norm.restrict(&sifted.selected)?)?;
    Ok(InstanceSpace { model, sifted, candidates, threshold })
}
