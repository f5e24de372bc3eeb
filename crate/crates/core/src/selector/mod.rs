//! Per-instance algorithm selection.
//!
//! One binary RBF classifier per solver predicts whether the solver is
//! "good" on an instance; solvers are ranked by decision value. A solver
//! with fewer than two examples of either label gets a constant classifier
//! whose score `2p − 1` (from its good-rate `p`) sits on the same side of
//! zero as a trained classifier would for a rare or dominant label.

mod model;
mod svm;

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::par::Parallelism;

pub use svm::{rbf, train_svm, Svm, SMO_MAX_ITERATIONS, SMO_TOLERANCE};

pub const DEFAULT_C_GRID: [f64; 4] = [0.1, 1.0, 10.0, 100.0];
pub const DEFAULT_GAMMA_GRID: [f64; 3] = [0.01, 0.1, 1.0];
pub const DEFAULT_FOLDS: usize = 5;
pub const MIN_TRAINING_INSTANCES: usize = 10;

#[derive(Debug, Error)]
pub enum SelectorError {
    #[error("need at least {needed} training instances, got {got}")]
    TooFewInstances { needed: usize, got: usize },
    #[error("every solver has degenerate labels")]
    DegenerateLabels,
    #[error("non-finite input value")]
    NonFinite,
    #[error("input has dimension {got}, model expects {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("inputs and labels do not line up")]
    Shape,
    #[error("empty test corpus")]
    EmptyTestSet,
    #[error("{0}")]
    InvalidParameter(String),
    #[error("model file: {0}")]
    Model(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// What the classifier inputs are.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputSpace {
    /// Projected coordinates `(Z1, Z2)`.
    Projected,
    /// Normalized selected features.
    Features,
}

impl InputSpace {
    pub fn as_str(self) -> &'static str {
        match self {
            InputSpace::Projected => "z",
            InputSpace::Features => "features",
        }
    }
}

impl FromStr for InputSpace {
    type Err = SelectorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "z" | "projected" => Ok(InputSpace::Projected),
            "features" => Ok(InputSpace::Features),
            other => Err(SelectorError::InvalidParameter(format!("unknown input space {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Classifier {
    Svm(Svm),
    /// Constant score `2 * rate - 1`.
    Prior {
        rate: f64,
    },
}

impl Classifier {
    pub fn decision(&self, x: &[f64]) -> f64 {
        match self {
            Classifier::Svm(m) => m.decision(x),
            Classifier::Prior { rate } => 2.0 * rate - 1.0,
        }
    }
}

/// Per-dimension z-scoring owned by the model, so that predictions do not
/// depend on the units of the inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(x: &[Vec<f64>]) -> Self {
        let d = x.first().map_or(0, Vec::len);
        let n = x.len().max(1) as f64;
        let mean: Vec<f64> = (0..d).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n).collect();
        let std = (0..d)
            .map(|j| {
                let v = x.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / n;
                if v > 0.0 {
                    v.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { mean, std }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(self.mean.iter().zip(&self.std)).map(|(v, (m, s))| (v - m) / s).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingMeta {
    pub corpus_hash: String,
    pub seed: u64,
    pub c_grid: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    pub folds: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectorModel {
    pub input_space: InputSpace,
    pub input_names: Vec<String>,
    pub standardizer: Standardizer,
    /// Sorted solver ids; `classifiers[a]` belongs to `solvers[a]`.
    pub solvers: Vec<String>,
    pub classifiers: Vec<Classifier>,
    pub meta: TrainingMeta,
}

#[derive(Debug, Clone)]
pub struct TrainOptions {
    pub c_grid: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    pub folds: usize,
    pub seed: u64,
    pub parallelism: Parallelism,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            c_grid: DEFAULT_C_GRID.to_vec(),
            gamma_grid: DEFAULT_GAMMA_GRID.to_vec(),
            folds: DEFAULT_FOLDS,
            seed: 0,
            parallelism: Parallelism::default(),
        }
    }
}

/// One cross-validation split: indices into the training set.
#[derive(Debug, Clone, PartialEq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

/// Cross-validation record of one solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverCv {
    pub solver_id: String,
    /// Empty for constant classifiers.
    pub folds: Vec<Fold>,
    /// `(C, γ, mean F1)` for every grid point, in grid order.
    pub scores: Vec<(f64, f64, f64)>,
    /// Chosen `(C, γ)`; `None` for constant classifiers.
    pub chosen: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub per_solver: Vec<SolverCv>,
}

/// Stratified `k`-fold split: each label class is shuffled with `seed` and
/// dealt round-robin over the folds.
pub fn stratified_folds(labels: &[bool], k: usize, seed: u64) -> Vec<Fold> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut validation: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut offset = 0;
    for class in [true, false] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut rng);
        for (r, i) in members.into_iter().enumerate() {
            validation[(r + offset) % k].push(i);
        }
        offset = labels.iter().filter(|&&l| l == class).count() % k;
    }
    validation
        .into_iter()
        .map(|mut v| {
            v.sort_unstable();
            let train = (0..labels.len()).filter(|i| v.binary_search(i).is_err()).collect();
            Fold { train, validation: v }
        })
        .collect()
}

/// F1 of predictions against truth; 1 when neither has a positive.
pub fn f1_score(truth: &[bool], predicted: &[bool]) -> f64 {
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for (&t, &p) in truth.iter().zip(predicted) {
        match (t, p) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            _ => {}
        }
    }
    if tp + fp + fn_ == 0 {
        1.0
    } else {
        2.0 * tp as f64 / (2 * tp + fp + fn_) as f64
    }
}

/// Inverse-frequency weights: each class carries half the total weight.
fn class_weights(labels: &[bool]) -> Vec<f64> {
    let n = labels.len() as f64;
    let pos = labels.iter().filter(|&&l| l).count() as f64;
    let neg = n - pos;
    labels.iter().map(|&l| if l { n / (2.0 * pos) } else { n / (2.0 * neg) }).collect()
}

/// Fit a classifier; falls back to the prior when one class is missing.
fn fit_binary(x: &[Vec<f64>], labels: &[bool], c: f64, gamma: f64) -> Classifier {
    let pos = labels.iter().filter(|&&l| l).count();
    if pos == 0 || pos == labels.len() {
        return Classifier::Prior { rate: pos as f64 / labels.len().max(1) as f64 };
    }
    Classifier::Svm(train_svm(x, labels, &class_weights(labels), c, gamma))
}

fn corpus_hash(x: &[Vec<f64>], labels: &[Vec<bool>]) -> String {
    let mut h = Sha256::new();
    for (row, l) in x.iter().zip(labels) {
        for v in row {
            h.update(v.to_bits().to_le_bytes());
        }
        for &b in l {
            h.update([u8::from(b)]);
        }
    }
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Train one classifier per solver. `labels[i][a]` is the good flag of
/// solver `solvers[a]` on instance `i`.
pub fn train(
    inputs: &[Vec<f64>],
    labels: &[Vec<bool>],
    solvers: &[String],
    input_space: InputSpace,
    input_names: &[String],
    options: &TrainOptions,
) -> Result<(SelectorModel, TrainReport), SelectorError> {
    let n = inputs.len();
    if n < MIN_TRAINING_INSTANCES {
        return Err(SelectorError::TooFewInstances { needed: MIN_TRAINING_INSTANCES, got: n });
    }
    let d = input_names.len();
    if labels.len() != n || inputs.iter().any(|r| r.len() != d) || labels.iter().any(|l| l.len() != solvers.len()) {
        return Err(SelectorError::Shape);
    }
    if inputs.iter().flatten().any(|v| !v.is_finite()) {
        return Err(SelectorError::NonFinite);
    }
    if options.folds < 2 || options.c_grid.is_empty() || options.gamma_grid.is_empty() {
        return Err(SelectorError::InvalidParameter("need at least 2 folds and a non-empty grid".into()));
    }

    let standardizer = Standardizer::fit(inputs);
    let x: Vec<Vec<f64>> = inputs.iter().map(|r| standardizer.apply(r)).collect();

    let mut order: Vec<usize> = (0..solvers.len()).collect();
    order.sort_by(|&a, &b| solvers[a].cmp(&solvers[b]));
    let columns: Vec<Vec<bool>> = order.iter().map(|&a| labels.iter().map(|l| l[a]).collect()).collect();
    let trainable = |col: &[bool]| {
        let pos = col.iter().filter(|&&l| l).count();
        pos >= 2 && n - pos >= 2
    };
    if !columns.iter().any(|c| trainable(c)) {
        return Err(SelectorError::DegenerateLabels);
    }

    let grid: Vec<(f64, f64)> =
        options.c_grid.iter().flat_map(|&c| options.gamma_grid.iter().map(move |&g| (c, g))).collect();
    let results: Vec<(Classifier, SolverCv)> = options.parallelism.map_range(columns.len(), |a| {
        let col = &columns[a];
        let solver_id = solvers[order[a]].clone();
        if !trainable(col) {
            let rate = col.iter().filter(|&&l| l).count() as f64 / n as f64;
            log::info!("solver {solver_id}: degenerate labels, constant prior {rate:.3}");
            return (
                Classifier::Prior { rate },
                SolverCv { solver_id, folds: Vec::new(), scores: Vec::new(), chosen: None },
            );
        }
        let folds = stratified_folds(col, options.folds, options.seed);
        let scores: Vec<(f64, f64, f64)> = options.parallelism.map(&grid, |&(c, gamma)| {
            let mut total = 0.0;
            for fold in &folds {
                let xt: Vec<Vec<f64>> = fold.train.iter().map(|&i| x[i].clone()).collect();
                let yt: Vec<bool> = fold.train.iter().map(|&i| col[i]).collect();
                let clf = fit_binary(&xt, &yt, c, gamma);
                let truth: Vec<bool> = fold.validation.iter().map(|&i| col[i]).collect();
                let pred: Vec<bool> = fold.validation.iter().map(|&i| clf.decision(&x[i]) > 0.0).collect();
                total += f1_score(&truth, &pred);
            }
            (c, gamma, total / folds.len() as f64)
        });
        let mut best = 0;
        for (k, s) in scores.iter().enumerate() {
            if s.2 > scores[best].2 {
                best = k;
            }
        }
        let (c, gamma, f1) = scores[best];
        log::debug!("solver {solver_id}: C={c} gamma={gamma} mean F1 {f1:.3}");
        (fit_binary(&x, col, c, gamma), SolverCv { solver_id, folds, scores, chosen: Some((c, gamma)) })
    });

    let (classifiers, per_solver): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let model = SelectorModel {
        input_space,
        input_names: input_names.to_vec(),
        standardizer,
        solvers: order.iter().map(|&a| solvers[a].clone()).collect(),
        classifiers,
        meta: TrainingMeta {
            corpus_hash: corpus_hash(inputs, labels),
            seed: options.seed,
            c_grid: options.c_grid.clone(),
            gamma_grid: options.gamma_grid.clone(),
            folds: options.folds,
        },
    };
    Ok((model, TrainReport { per_solver }))
}

impl SelectorModel {
    /// Solvers by descending decision value; ties keep id order.
    pub fn predict(&self, input: &[f64]) -> Result<Vec<(String, f64)>, SelectorError> {
        if input.len() != self.input_names.len() {
            return Err(SelectorError::Dimension { expected: self.input_names.len(), got: input.len() });
        }
        if input.iter().any(|v| !v.is_finite()) {
            return Err(SelectorError::NonFinite);
        }
        let x = self.standardizer.apply(input);
        let mut ranked: Vec<(String, f64)> =
            self.solvers.iter().zip(&self.classifiers).map(|(s, c)| (s.clone(), c.decision(&x))).collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
        Ok(ranked)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRow {
    pub instance_id: String,
    pub ranking: Vec<(String, f64)>,
    pub actual_best: String,
}

impl PredictionRow {
    pub fn top1(&self) -> &str {
        &self.ranking[0].0
    }

    pub fn in_top(&self, k: usize) -> bool {
        self.ranking.iter().take(k).any(|(s, _)| *s == self.actual_best)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionReport {
    pub rows: Vec<PredictionRow>,
    pub k: usize,
    pub topk_accuracy: f64,
    pub top1_accuracy: f64,
    pub top2_accuracy: f64,
}

/// Rank every test instance and score top-1, top-2 and top-`k` accuracy
/// against the observed best solvers.
pub fn evaluate_topk(
    model: &SelectorModel,
    ids: &[String],
    inputs: &[Vec<f64>],
    actual_best: &[String],
    k: usize,
) -> Result<PredictionReport, SelectorError> {
    if inputs.is_empty() {
        return Err(SelectorError::EmptyTestSet);
    }
    if ids.len() != inputs.len() || actual_best.len() != inputs.len() {
        return Err(SelectorError::Shape);
    }
    let rows = ids
        .iter()
        .zip(inputs)
        .zip(actual_best)
        .map(|((id, x), best)| {
            Ok(PredictionRow { instance_id: id.clone(), ranking: model.predict(x)?, actual_best: best.clone() })
        })
        .collect::<Result<Vec<_>, SelectorError>>()?;
    let acc = |k: usize| rows.iter().filter(|r| r.in_top(k)).count() as f64 / rows.len() as f64;
    Ok(PredictionReport { topk_accuracy: acc(k), top1_accuracy: acc(1), top2_accuracy: acc(2), k, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_clusters(n: usize) -> (Vec<Vec<f64>>, Vec<Vec<bool>>) {
        let mut x = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            let t = i as f64 * 0.37;
            let left = i % 2 == 0;
            let cx = if left { -3.0 } else { 3.0 };
            x.push(vec![cx + t.sin() * 0.5, t.cos() * 0.5]);
            labels.push(vec![left, !left]);
        }
        (x, labels)
    }

    fn names() -> (Vec<String>, Vec<String>) {
        (vec!["a".into(), "b".into()], vec!["z1".into(), "z2".into()])
    }

    #[test]
    fn folds_are_disjoint_and_stratified() {
        let labels: Vec<bool> = (0..23).map(|i| i % 3 == 0).collect();
        let folds = stratified_folds(&labels, 5, 9);
        let mut seen = vec![0; labels.len()];
        for f in &folds {
            for &i in &f.validation {
                seen[i] += 1;
                assert!(!f.train.contains(&i));
            }
            assert_eq!(f.train.len() + f.validation.len(), labels.len());
            let pos = f.validation.iter().filter(|&&i| labels[i]).count();
            assert!((1..=2).contains(&pos));
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn f1_edge_cases() {
        assert_eq!(f1_score(&[false, false], &[false, false]), 1.0);
        assert_eq!(f1_score(&[true, false], &[false, true]), 0.0);
        assert_eq!(f1_score(&[true, true, false], &[true, false, false]), 2.0 / 3.0);
    }

    #[test]
    fn separable_clusters_are_learned() {
        let (x, labels) = two_clusters(40);
        let (solvers, inputs) = names();
        let (model, report) =
            train(&x, &labels, &solvers, InputSpace::Projected, &inputs, &TrainOptions::default()).unwrap();
        assert_eq!(report.per_solver.len(), 2);
        for (xi, li) in x.iter().zip(&labels) {
            let top = &model.predict(xi).unwrap()[0].0;
            assert_eq!(top == "a", li[0]);
        }
    }

    #[test]
    fn degenerate_solver_gets_a_prior() {
        let (x, mut labels) = two_clusters(20);
        for l in &mut labels {
            l.push(false);
        }
        let solvers = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let (model, _) =
            train(&x, &labels, &solvers, InputSpace::Projected, &names().1, &TrainOptions::default()).unwrap();
        assert_eq!(model.classifiers[2], Classifier::Prior { rate: 0.0 });
        let ranking = model.predict(&x[0]).unwrap();
        assert_eq!(ranking.last().unwrap().0, "c");
    }

    #[test]
    fn training_errors() {
        let (x, labels) = two_clusters(8);
        let (s, i) = names();
        assert!(matches!(
            train(&x, &labels, &s, InputSpace::Projected, &i, &TrainOptions::default()),
            Err(SelectorError::TooFewInstances { .. })
        ));
        let (x, labels) = two_clusters(20);
        let all_good: Vec<Vec<bool>> = labels.iter().map(|_| vec![true, true]).collect();
        assert!(matches!(
            train(&x, &all_good, &s, InputSpace::Projected, &i, &TrainOptions::default()),
            Err(SelectorError::DegenerateLabels)
        ));
        let (model, _) = train(&x, &labels, &s, InputSpace::Projected, &i, &TrainOptions::default()).unwrap();
        assert!(matches!(model.predict(&[1.0]), Err(SelectorError::Dimension { .. })));
        assert!(matches!(model.predict(&[f64::NAN, 0.0]), Err(SelectorError::NonFinite)));
    }

    #[test]
    fn topk_at_portfolio_size_is_one() {
        let (x, labels) = two_clusters(20);
        let (s, i) = names();
        let (model, _) = train(&x, &labels, &s, InputSpace::Projected, &i, &TrainOptions::default()).unwrap();
        let ids: Vec<String> = (0..20).map(|k| format!("g{k}")).collect();
        let actual: Vec<String> = (0..20).map(|k| if k % 3 == 0 { "a" } else { "b" }.to_string()).collect();
        let r = evaluate_topk(&model, &ids, &x, &actual, 2).unwrap();
        assert_eq!(r.topk_accuracy, 1.0);
        assert!(evaluate_topk(&model, &[], &[], &[], 1).is_err());
    }
}
