//! Linear map from normalized features to the plane.
//!
//! `Z = Wᵀ x` where `x` is the normalized feature vector and `W` is `d × 2`.
//! There is no offset, so the zero vector always maps to the origin.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};

use super::normalize::{FeatureNorm, NormalizationParams};
use super::IsaError;

/// Relative size below which a principal variance counts as degenerate.
pub const DEGENERATE_VARIANCE: f64 = 1e-10;

const MODEL_MAGIC: &str = "mcpisa-projection";
const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionSource {
    FittedPca,
    LoadedExternal,
}

impl ProjectionSource {
    pub fn as_str(self) -> &'static str {
        match self {
            ProjectionSource::FittedPca => "fitted_pca",
            ProjectionSource::LoadedExternal => "loaded_external",
        }
    }
}

impl FromStr for ProjectionSource {
    type Err = IsaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fitted_pca" => Ok(ProjectionSource::FittedPca),
            "loaded_external" => Ok(ProjectionSource::LoadedExternal),
            other => Err(IsaError::Model(format!("unknown projection source {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionModel {
    /// Feature names, one per matrix row; also the order of `normalization`.
    pub selected: Vec<String>,
    pub matrix: Vec<[f64; 2]>,
    pub normalization: NormalizationParams,
    pub source: ProjectionSource,
}

/// Principal axes of a data matrix, largest variance first.
#[derive(Debug, Clone, PartialEq)]
pub struct Pca {
    /// Unit directions, each with its largest-magnitude loading positive.
    pub directions: Vec<Vec<f64>>,
    /// Variance along each direction.
    pub variances: Vec<f64>,
}

impl Pca {
    pub fn explained_ratio(&self) -> Vec<f64> {
        let total: f64 = self.variances.iter().sum();
        self.variances.iter().map(|v| if total > 0.0 { v / total } else { 0.0 }).collect()
    }

    /// Number of directions whose variance is not negligible.
    pub fn rank(&self) -> usize {
        let top = self.variances.first().copied().unwrap_or(0.0);
        self.variances.iter().filter(|&&v| top > 0.0 && v > DEGENERATE_VARIANCE * top).count()
    }
}

/// Eigen-decomposition of the (mean-centred) covariance matrix.
pub fn principal_components(rows: &[Vec<f64>]) -> Result<Pca, IsaError> {
    let n = rows.len();
    let d = rows.first().map_or(0, Vec::len);
    if n < 2 || d == 0 || rows.iter().any(|r| r.len() != d) {
        return Err(IsaError::Shape);
    }
    let means: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for r in rows {
        for a in 0..d {
            let da = r[a] - means[a];
            for b in a..d {
                cov[(a, b)] += da * (r[b] - means[b]);
            }
        }
    }
    for a in 0..d {
        for b in a..d {
            let v = cov[(a, b)] / n as f64;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let mut directions = Vec::with_capacity(d);
    let mut variances = Vec::with_capacity(d);
    for &k in &order {
        let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
        let mut lead = 0;
        for j in 1..d {
            if v[j].abs() > v[lead].abs() + 1e-12 {
                lead = j;
            }
        }
        if v[lead] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        directions.push(v);
        variances.push(eig.eigenvalues[k].max(0.0));
    }
    Ok(Pca { directions, variances })
}

/// Two-component PCA projection of already normalized, already selected
/// columns. `normalization` must list the same features as `selected`.
pub fn fit_projection(
    selected: &[String],
    rows: &[Vec<f64>],
    normalization: NormalizationParams,
) -> Result<ProjectionModel, IsaError> {
    if rows.len() < 3 {
        return Err(IsaError::TooFewInstances { needed: 3, got: rows.len() });
    }
    if selected.len() < 2 {
        return Err(IsaError::InvalidParameter(format!(
            "projection needs at least 2 features, got {}",
            selected.len()
        )));
    }
    if normalization.names() != selected {
        return Err(IsaError::InvalidParameter("normalization does not match the selected features".into()));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(IsaError::NonFinite("projection input".into()));
    }
    let pca = principal_components(rows)?;
    if pca.rank() < 2 {
        return Err(IsaError::RankDeficient { variances: pca.variances });
    }
    let matrix = (0..selected.len()).map(|j| [pca.directions[0][j], pca.directions[1][j]]).collect();
    Ok(ProjectionModel { selected: selected.to_vec(), matrix, normalization, source: ProjectionSource::FittedPca })
}

impl ProjectionModel {
    /// Wrap a user-supplied `d × 2` matrix. Without `normalization` the
    /// features are used as given.
    pub fn from_matrix(
        selected: &[String],
        matrix: Vec<[f64; 2]>,
        normalization: Option<NormalizationParams>,
    ) -> Result<Self, IsaError> {
        if selected.len() != matrix.len() || selected.is_empty() {
            return Err(IsaError::Shape);
        }
        if matrix.iter().flatten().any(|v| !v.is_finite()) {
            return Err(IsaError::NonFinite("projection matrix".into()));
        }
        for c in 0..2 {
            if matrix.iter().all(|row| row[c] == 0.0) {
                return Err(IsaError::Model(format!("projection column {} is zero", c + 1)));
            }
        }
        let normalization = match normalization {
            Some(n) if n.names() == selected => n,
            Some(_) => {
                return Err(IsaError::InvalidParameter("normalization does not match the selected features".into()))
            }
            None => NormalizationParams::identity(selected),
        };
        Ok(ProjectionModel {
            selected: selected.to_vec(),
            matrix,
            normalization,
            source: ProjectionSource::LoadedExternal,
        })
    }

    /// Multiply an already normalized vector by the matrix.
    pub fn project_normalized(&self, x: &[f64]) -> Result<(f64, f64), IsaError> {
        if x.len() != self.matrix.len() {
            return Err(IsaError::Shape);
        }
        let mut z = (0.0, 0.0);
        for (row, &v) in self.matrix.iter().zip(x) {
            if !v.is_finite() {
                return Err(IsaError::NonFinite("normalized input".into()));
            }
            z.0 += row[0] * v;
            z.1 += row[1] * v;
        }
        Ok(z)
    }

    /// Normalize raw feature values (looked up by name) and project them.
    pub fn project<F: Fn(&str) -> Option<f64>>(&self, lookup: F) -> Result<(f64, f64), IsaError> {
        let x = self.normalization.apply_with(lookup)?;
        self.project_normalized(&x)
    }

    /// Text serialization. `stamp` goes into a leading comment line.
    pub fn write<W: Write>(&self, mut out: W, stamp: &str) -> std::io::Result<()> {
        let mut s = String::new();
        if !stamp.is_empty() {
            let _ = writeln!(s, "# {stamp}");
        }
        let _ = writeln!(s, "{MODEL_MAGIC} {MODEL_VERSION}");
        let _ = writeln!(s, "source {}", self.source.as_str());
        let _ = writeln!(s, "features {}", self.selected.len());
        let _ = writeln!(s, "# name log_transform shift scale w1 w2");
        for (name, (norm, row)) in self.selected.iter().zip(self.normalization.features.iter().zip(&self.matrix)) {
            let _ = writeln!(
                s,
                "{name} {} {} {} {} {}",
                u8::from(norm.log_transform),
                fmt17(norm.shift),
                fmt17(norm.scale),
                fmt17(row[0]),
                fmt17(row[1])
            );
        }
        out.write_all(s.as_bytes())?;
        out.flush()
    }

    pub fn read<R: BufRead>(input: R) -> Result<Self, IsaError> {
        let mut lines = Vec::new();
        for line in input.lines() {
            let line = line?;
            let t = line.trim();
            if !t.is_empty() && !t.starts_with('#') {
                lines.push(t.to_string());
            }
        }
        let bad = |msg: &str| IsaError::Model(msg.to_string());
        let mut it = lines.iter();
        let header = it.next().ok_or_else(|| bad("empty model file"))?;
        if header != &format!("{MODEL_MAGIC} {MODEL_VERSION}") {
            return Err(bad(&format!("unsupported header {header:?}")));
        }
        let source: ProjectionSource =
            it.next().and_then(|l| l.strip_prefix("source ")).ok_or_else(|| bad("missing source line"))?.parse()?;
        let d: usize = it
            .next()
            .and_then(|l| l.strip_prefix("features "))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad("missing feature count"))?;
        let mut selected = Vec::with_capacity(d);
        let mut matrix = Vec::with_capacity(d);
        let mut norms = Vec::with_capacity(d);
        for _ in 0..d {
            let line = it.next().ok_or_else(|| bad("truncated feature table"))?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 6 {
                return Err(bad(&format!("bad feature line {line:?}")));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(&format!("bad number {s:?}")));
            selected.push(fields[0].to_string());
            norms.push(FeatureNorm {
                name: fields[0].to_string(),
                log_transform: fields[1] == "1",
                shift: num(fields[2])?,
                scale: num(fields[3])?,
            });
            matrix.push([num(fields[4])?, num(fields[5])?]);
        }
        if it.next().is_some() {
            return Err(bad("trailing content"));
        }
        let mut model = ProjectionModel::from_matrix(
            &selected,
            matrix,
            Some(NormalizationParams { features: norms, dropped: Vec::new() }),
        )?;
        model.source = source;
        Ok(model)
    }
}

/// 17 significant digits: enough to round-trip any f64.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Read a whitespace-separated `d × 2` matrix, one `name w1 w2` per line.
pub fn read_matrix<R: BufRead>(input: R) -> Result<(Vec<String>, Vec<[f64; 2]>), IsaError> {
    let mut names = Vec::new();
    let mut rows = Vec::new();
    for line in input.lines() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = t.split_whitespace().collect();
        let parsed = (f.len() == 3)
            .then(|| Some([f[1].parse::<f64>().ok()?, f[2].parse::<f64>().ok()?]))
            .flatten()
            .ok_or_else(|| IsaError::Model(format!("expected `name w1 w2`, got {t:?}")))?;
        names.push(f[0].to_string());
        rows.push(parsed);
    }
    Ok((names, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|i| format!("f{i}")).collect()
    }

    #[test]
    fn identity_matrix_passes_values_through() {
        let m = ProjectionModel::from_matrix(&names(2), vec![[1.0, 0.0], [0.0, 1.0]], None).unwrap();
        assert_eq!(m.project_normalized(&[0.3, -2.0]).unwrap(), (0.3, -2.0));
        assert_eq!(m.project_normalized(&[0.0, 0.0]).unwrap(), (0.0, 0.0));
        assert!(m.project(|n| (n == "f0").then_some(1.0)).is_err());
        assert!(m.project_normalized(&[f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn perfectly_correlated_pair_is_rank_one() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let pca = principal_components(&rows).unwrap();
        assert!((pca.explained_ratio()[0] - 1.0).abs() < 1e-12);
        assert_eq!(pca.rank(), 1);
        let err = fit_projection(&names(2), &rows, NormalizationParams::identity(&names(2))).unwrap_err();
        assert!(matches!(err, IsaError::RankDeficient { .. }));
    }

    #[test]
    fn model_file_round_trip() {
        let norm = NormalizationParams {
            features: vec![
                FeatureNorm { name: "a".into(), log_transform: true, shift: 0.1, scale: 1.0 / 3.0 },
                FeatureNorm { name: "b".into(), log_transform: false, shift: -2.5e-7, scale: 7.0 },
            ],
            dropped: vec![],
        };
        let sel = vec!["a".to_string(), "b".to_string()];
        let m =
            ProjectionModel::from_matrix(&sel, vec![[0.1, std::f64::consts::PI], [-1e-300, 2.0]], Some(norm)).unwrap();
        let mut buf = Vec::new();
        m.write(&mut buf, "stamp").unwrap();
        let back = ProjectionModel::read(&buf[..]).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn zero_column_is_rejected() {
        assert!(ProjectionModel::from_matrix(&names(2), vec![[1.0, 0.0], [2.0, 0.0]], None).is_err());
    }
}
