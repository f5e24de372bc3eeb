//! Solver campaigns and the time/quality composite measure.
//!
//! For one instance and solver `a`,
//! `y(a) = (t_a / max_b t_b) / (s_a / max_b s_b)` with `t` the wall time and
//! `s` the clique size; lower is better. Times are clamped below at
//! [`MIN_SECONDS`]. Failed runs score `+inf` and are left out of both maxima.

mod campaign;
mod journal;

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use campaign::{instance_seed, run_campaign, CampaignConfig, CampaignOutcome, CorpusEntry};
pub use journal::{read_journal, Journal};

/// Lower clamp applied to wall times before scoring.
pub const MIN_SECONDS: f64 = 1e-3;

/// Default relative tolerance for the good/bad labels.
pub const DEFAULT_TOLERANCE: f64 = 0.05;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("no run records for the instance")]
    Empty,
    #[error("{solver} reported clique size 0 on {instance}")]
    ZeroCliqueSize { instance: String, solver: String },
    #[error("{solver} reported an invalid wall time {seconds} on {instance}")]
    InvalidTime { instance: String, solver: String, seconds: f64 },
    #[error("every run on {0} failed")]
    NoSuccessfulRun(String),
    #[error("journal {path}: {msg}")]
    Journal { path: String, msg: String },
    #[error("journal {path} was written for {found:?}, expected {expected:?}")]
    StampMismatch { path: String, expected: String, found: String },
    #[error("invalid campaign settings: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Outcome class of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    /// Finished within the budget.
    Ok,
    /// Budget expired; the record holds the incumbent at that point.
    Timeout,
    /// Crashed, produced no clique or returned an invalid one.
    Failed,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Ok => "ok",
            RunStatus::Timeout => "timeout",
            RunStatus::Failed => "failed",
        }
    }

    pub fn is_scored(self) -> bool {
        self != RunStatus::Failed
    }
}

impl FromStr for RunStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ok" => Ok(RunStatus::Ok),
            "timeout" => Ok(RunStatus::Timeout),
            "failed" => Ok(RunStatus::Failed),
            other => Err(format!("unknown run status {other:?}")),
        }
    }
}

/// One (instance, solver) execution; the journal row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance_id: String,
    pub solver_id: String,
    pub clique_size: usize,
    pub wall_seconds: f64,
    pub proven_optimal: bool,
    pub status: RunStatus,
}

impl RunRecord {
    pub fn new(instance_id: &str, solver_id: &str, clique_size: usize, wall_seconds: f64) -> Self {
        RunRecord {
            instance_id: instance_id.to_string(),
            solver_id: solver_id.to_string(),
            clique_size,
            wall_seconds,
            proven_optimal: false,
            status: RunStatus::Ok,
        }
    }

    pub fn failed(instance_id: &str, solver_id: &str, wall_seconds: f64) -> Self {
        RunRecord { status: RunStatus::Failed, ..RunRecord::new(instance_id, solver_id, 0, wall_seconds) }
    }
}

/// Composite measure of every record of one instance, in input order.
pub fn score_instance(records: &[RunRecord]) -> Result<Vec<f64>, BenchError> {
    let first = records.first().ok_or(BenchError::Empty)?;
    let mut t_max = 0.0f64;
    let mut s_max = 0usize;
    for r in records.iter().filter(|r| r.status.is_scored()) {
        if r.clique_size == 0 {
            return Err(BenchError::ZeroCliqueSize { instance: r.instance_id.clone(), solver: r.solver_id.clone() });
        }
        if !r.wall_seconds.is_finite() || r.wall_seconds < 0.0 {
            return Err(BenchError::InvalidTime {
                instance: r.instance_id.clone(),
                solver: r.solver_id.clone(),
                seconds: r.wall_seconds,
            });
        }
        t_max = t_max.max(r.wall_seconds.max(MIN_SECONDS));
        s_max = s_max.max(r.clique_size);
    }
    if s_max == 0 {
        return Err(BenchError::NoSuccessfulRun(first.instance_id.clone()));
    }
    Ok(records
        .iter()
        .map(|r| {
            if r.status.is_scored() {
                // (t / t_max) / (s / s_max), rearranged to round once.
                (r.wall_seconds.max(MIN_SECONDS) * s_max as f64) / (t_max * r.clique_size as f64)
            } else {
                f64::INFINITY
            }
        })
        .collect())
}

/// Scores, winners and labels of a whole campaign.
///
/// Instances and solvers are held in lexicographic order, so the first
/// minimum in a row is also the tie-break winner.
#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceMatrix {
    pub instances: Vec<String>,
    pub solvers: Vec<String>,
    /// `y[i][a]`; `+inf` for failed or missing runs.
    pub y: Vec<Vec<f64>>,
    /// Index into `solvers` of each instance's winner.
    pub best: Vec<usize>,
    pub good: Vec<Vec<bool>>,
    pub tolerance: f64,
    /// Instances left out because no run on them succeeded.
    pub skipped: Vec<String>,
}

impl PerformanceMatrix {
    /// Score `records` and label them at `tolerance`. A repeated
    /// (instance, solver) pair keeps its last record.
    pub fn from_records(records: &[RunRecord], tolerance: f64) -> Result<Self, BenchError> {
        let mut by_instance: BTreeMap<&str, BTreeMap<&str, &RunRecord>> = BTreeMap::new();
        let mut solver_set = std::collections::BTreeSet::new();
        for r in records {
            by_instance.entry(&r.instance_id).or_default().insert(&r.solver_id, r);
            solver_set.insert(r.solver_id.clone());
        }
        let solvers: Vec<String> = solver_set.into_iter().collect();
        let mut matrix = PerformanceMatrix {
            instances: Vec::new(),
            solvers,
            y: Vec::new(),
            best: Vec::new(),
            good: Vec::new(),
            tolerance,
            skipped: Vec::new(),
        };
        for (instance, runs) in by_instance {
            let row_records: Vec<RunRecord> = matrix
                .solvers
                .iter()
                .map(|s| match runs.get(s.as_str()) {
                    Some(r) => (*r).clone(),
                    None => RunRecord::failed(instance, s, 0.0),
                })
                .collect();
            let y = match score_instance(&row_records) {
                Ok(y) => y,
                Err(BenchError::NoSuccessfulRun(_)) => {
                    log::warn!("instance {instance}: no successful run, left out of the matrix");
                    matrix.skipped.push(instance.to_string());
                    continue;
                }
                Err(e) => return Err(e),
            };
            matrix.best.push(argmin_first(&y));
            matrix.instances.push(instance.to_string());
            matrix.y.push(y);
        }
        matrix.label_good(tolerance);
        Ok(matrix)
    }

    /// Relabel: `good(a, i) = y(a, i) <= (1 + tolerance) * min_b y(b, i)`.
    pub fn label_good(&mut self, tolerance: f64) {
        self.tolerance = tolerance;
        self.good = self
            .y
            .iter()
            .zip(&self.best)
            .map(|(row, &b)| {
                let threshold = (1.0 + tolerance) * row[b];
                row.iter().map(|&v| v.is_finite() && v <= threshold).collect()
            })
            .collect();
    }

    pub fn instance_index(&self, instance_id: &str) -> Option<usize> {
        self.instances.binary_search_by(|s| s.as_str().cmp(instance_id)).ok()
    }

    pub fn solver_index(&self, solver_id: &str) -> Option<usize> {
        self.solvers.binary_search_by(|s| s.as_str().cmp(solver_id)).ok()
    }

    pub fn best_solver(&self, instance: usize) -> &str {
        &self.solvers[self.best[instance]]
    }

    /// Fraction of instances on which each solver is labelled good.
    pub fn good_rates(&self) -> Vec<f64> {
        let n = self.instances.len().max(1) as f64;
        (0..self.solvers.len()).map(|a| self.good.iter().filter(|row| row[a]).count() as f64 / n).collect()
    }

    /// How many instances each solver wins.
    pub fn win_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.solvers.len()];
        for &b in &self.best {
            counts[b] += 1;
        }
        counts
    }
}

fn argmin_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    best
}
