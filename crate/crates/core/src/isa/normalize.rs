//! Per-feature normalization fitted on a training corpus.
//!
//! A column whose sample skewness exceeds [`SKEW_LIMIT`] in magnitude is
//! first mapped through `sign(x) * ln(1 + |x|)`. The (possibly transformed)
//! column is then centred on its median and divided by `IQR / 1.349`, which
//! equals the standard deviation for normal data. Constant columns are
//! dropped.

use crate::stats::{median, population_std, quantile_sorted, skewness};

use super::IsaError;

pub const SKEW_LIMIT: f64 = 2.0;

/// IQR of a standard normal distribution.
const NORMAL_IQR: f64 = 1.349;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureNorm {
    pub name: String,
    pub log_transform: bool,
    pub shift: f64,
    pub scale: f64,
}

impl FeatureNorm {
    /// Identity map for `name`.
    pub fn identity(name: &str) -> Self {
        FeatureNorm { name: name.to_string(), log_transform: false, shift: 0.0, scale: 1.0 }
    }

    pub fn apply(&self, x: f64) -> f64 {
        let x = if self.log_transform { signed_log(x) } else { x };
        (x - self.shift) / self.scale
    }
}

pub fn signed_log(x: f64) -> f64 {
    x.signum() * x.abs().ln_1p()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationParams {
    /// Retained features in input order.
    pub features: Vec<FeatureNorm>,
    /// Constant columns removed during fitting.
    pub dropped: Vec<String>,
}

impl NormalizationParams {
    pub fn identity(names: &[String]) -> Self {
        NormalizationParams { features: names.iter().map(|n| FeatureNorm::identity(n)).collect(), dropped: Vec::new() }
    }

    pub fn names(&self) -> Vec<String> {
        self.features.iter().map(|f| f.name.clone()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&FeatureNorm> {
        self.features.iter().find(|f| f.name == name)
    }

    /// Keep only `names`, in that order.
    pub fn restrict(&self, names: &[String]) -> Result<Self, IsaError> {
        let features = names
            .iter()
            .map(|n| self.get(n).cloned().ok_or_else(|| IsaError::MissingFeature(n.clone())))
            .collect::<Result<_, _>>()?;
        Ok(NormalizationParams { features, dropped: Vec::new() })
    }

    /// Normalize one instance given a lookup from feature name to raw value.
    pub fn apply_with<F: Fn(&str) -> Option<f64>>(&self, lookup: F) -> Result<Vec<f64>, IsaError> {
        self.features
            .iter()
            .map(|f| {
                let raw = lookup(&f.name).ok_or_else(|| IsaError::MissingFeature(f.name.clone()))?;
                if !raw.is_finite() {
                    return Err(IsaError::NonFinite(f.name.clone()));
                }
                Ok(f.apply(raw))
            })
            .collect()
    }

    /// Normalize rows laid out as `names` into the retained columns.
    pub fn apply_rows(&self, names: &[String], rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, IsaError> {
        rows.iter().map(|row| self.apply_with(|n| names.iter().position(|m| m == n).map(|i| row[i]))).collect()
    }
}

/// Fit normalization on the rows of an instances-by-features matrix.
pub fn fit_normalization(names: &[String], rows: &[Vec<f64>]) -> Result<NormalizationParams, IsaError> {
    if rows.len() < 2 {
        return Err(IsaError::TooFewInstances { needed: 2, got: rows.len() });
    }
    let mut features = Vec::new();
    let mut dropped = Vec::new();
    for (j, name) in names.iter().enumerate() {
        let mut column = Vec::with_capacity(rows.len());
        for row in rows {
            let v = *row.get(j).ok_or(IsaError::Shape)?;
            if !v.is_finite() {
                return Err(IsaError::NonFinite(name.clone()));
            }
            column.push(v);
        }
        if column.iter().all(|&v| v == column[0]) {
            log::info!("dropping constant feature {name}");
            dropped.push(name.clone());
            continue;
        }
        let log_transform = skewness(&column).abs() > SKEW_LIMIT;
        if log_transform {
            column.iter_mut().for_each(|v| *v = signed_log(*v));
        }
        let shift = median(&column);
        let mut sorted = column.clone();
        sorted.sort_by(f64::total_cmp);
        let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
        // A column can vary only in its tails; fall back to the spread of
        // the whole column then.
        let scale = if iqr > 0.0 { iqr / NORMAL_IQR } else { population_std(&column) };
        if !(scale > 0.0 && scale.is_finite()) {
            dropped.push(name.clone());
            continue;
        }
        features.push(FeatureNorm { name: name.clone(), log_transform, shift, scale });
    }
    Ok(NormalizationParams { features, dropped })
}
