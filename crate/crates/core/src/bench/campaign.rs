//! Running a portfolio over a corpus.

use std::collections::HashSet;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};

use super::{BenchError, Journal, PerformanceMatrix, RunRecord, RunStatus, DEFAULT_TOLERANCE};
use crate::graph::{load_path, Format, Graph};
use crate::par::Parallelism;
use crate::solvers::Solver;

/// An instance, either already in memory or still on disk.
#[derive(Debug, Clone)]
pub enum CorpusEntry {
    Graph(Graph),
    Path(PathBuf),
    /// A file read with a fixed format instead of the detected one.
    Typed(PathBuf, Format),
}

impl CorpusEntry {
    /// Graph name, or the file stem for unloaded entries.
    pub fn id(&self) -> String {
        match self {
            CorpusEntry::Graph(g) => g.name().to_string(),
            CorpusEntry::Path(p) | CorpusEntry::Typed(p, _) => {
                p.file_stem().and_then(|s| s.to_str()).unwrap_or("graph").to_string()
            }
        }
    }

    fn load(&self) -> Result<Graph, String> {
        match self {
            CorpusEntry::Graph(g) => Ok(g.clone()),
            CorpusEntry::Path(p) => load_path(p, None).map(|r| r.graph).map_err(|e| e.to_string()),
            CorpusEntry::Typed(p, f) => load_path(p, Some(*f)).map(|r| r.graph).map_err(|e| e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CampaignConfig {
    /// Per-run wall-clock budget.
    pub budget: Duration,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
    pub seed: u64,
    pub parallelism: Parallelism,
    pub tolerance: f64,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            budget: Duration::from_secs(1800),
            jobs: 0,
            seed: 0,
            parallelism: Parallelism::default(),
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CampaignOutcome {
    pub matrix: PerformanceMatrix,
    /// Resumed records followed by new ones, in corpus order.
    pub records: Vec<RunRecord>,
    /// Solver runs performed by this call.
    pub executed: usize,
    /// Pairs taken from the journal instead of being run.
    pub resumed: usize,
    /// Instances that could not be loaded, with the reason.
    pub load_failures: Vec<(String, String)>,
}

/// Seed handed to every solver on one instance: the campaign seed mixed
/// with a hash of the instance id.
pub fn instance_seed(seed: u64, instance_id: &str) -> u64 {
    let digest = Sha256::digest(instance_id.as_bytes());
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    seed ^ u64::from_le_bytes(bytes)
}

/// Run every (instance, solver) pair not already in `journal`.
///
/// Instances are spread over the worker pool; the solvers of one instance
/// run one after another on the same worker. A solver error becomes a
/// `failed` record rather than aborting the campaign.
pub fn run_campaign(
    corpus: &[CorpusEntry],
    portfolio: &[&dyn Solver],
    config: &CampaignConfig,
    journal: Option<&Journal>,
) -> Result<CampaignOutcome, BenchError> {
    if corpus.is_empty() {
        return Err(BenchError::Config("empty corpus".into()));
    }
    if portfolio.is_empty() {
        return Err(BenchError::Config("empty portfolio".into()));
    }
    if config.budget.is_zero() {
        return Err(BenchError::Config("budget must be positive".into()));
    }
    let done: HashSet<(&str, &str)> = journal
        .map(|j| j.completed().iter().map(|r| (r.instance_id.as_str(), r.solver_id.as_str())).collect())
        .unwrap_or_default();
    let executed = AtomicUsize::new(0);

    type InstanceResult = Result<(Vec<RunRecord>, Option<(String, String)>), BenchError>;
    let per_instance: Vec<InstanceResult> = config.parallelism.with_jobs(config.jobs, || {
        config.parallelism.map(corpus, |entry| {
            let id = entry.id();
            let pending: Vec<&&dyn Solver> =
                portfolio.iter().filter(|s| !done.contains(&(id.as_str(), s.id()))).collect();
            if pending.is_empty() {
                return Ok((Vec::new(), None));
            }
            let g = match entry.load() {
                Ok(g) => g,
                Err(msg) => {
                    log::warn!("skipping instance {id}: {msg}");
                    return Ok((Vec::new(), Some((id, msg))));
                }
            };
            let seed = instance_seed(config.seed, &id);
            let mut fresh = Vec::with_capacity(pending.len());
            for solver in pending {
                let record = run_one(&g, &id, *solver, config.budget, seed);
                executed.fetch_add(1, Ordering::Relaxed);
                if let Some(j) = journal {
                    j.append(&record)?;
                }
                fresh.push(record);
            }
            Ok((fresh, None))
        })
    });

    let mut records: Vec<RunRecord> = journal.map(|j| j.completed().to_vec()).unwrap_or_default();
    let resumed = records.len();
    let mut load_failures = Vec::new();
    for result in per_instance {
        let (fresh, failure) = result?;
        records.extend(fresh);
        load_failures.extend(failure);
    }
    let matrix = PerformanceMatrix::from_records(&records, config.tolerance)?;
    Ok(CampaignOutcome { matrix, records, executed: executed.into_inner(), resumed, load_failures })
}

fn run_one(g: &Graph, instance_id: &str, solver: &dyn Solver, budget: Duration, seed: u64) -> RunRecord {
    let start = Instant::now();
    match solver.solve(g, budget, seed) {
        Ok(r) if r.clique_size > 0 => {
            log::debug!("{instance_id}/{}: {} in {:.3}s", solver.id(), r.clique_size, r.wall_seconds);
            RunRecord {
                instance_id: instance_id.to_string(),
                solver_id: solver.id().to_string(),
                clique_size: r.clique_size,
                wall_seconds: r.wall_seconds,
                proven_optimal: r.proven_optimal,
                status: if r.budget_exhausted { RunStatus::Timeout } else { RunStatus::Ok },
            }
        }
        Ok(_) => {
            log::warn!("{instance_id}/{}: no clique reported", solver.id());
            RunRecord::failed(instance_id, solver.id(), start.elapsed().as_secs_f64())
        }
        Err(e) => {
            log::warn!("{instance_id}/{}: {e}", solver.id());
            RunRecord::failed(instance_id, solver.id(), start.elapsed().as_secs_f64())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};
    use crate::solvers::{SolveResult, SolverError};

    /// Reports a fixed clique after a fixed "time"; counts its calls.
    struct Stub {
        id: &'static str,
        seconds: f64,
        fail: bool,
        calls: AtomicUsize,
    }

    impl Stub {
        fn new(id: &'static str, seconds: f64) -> Self {
            Stub { id, seconds, fail: false, calls: AtomicUsize::new(0) }
        }
    }

    impl Solver for Stub {
        fn id(&self) -> &str {
            self.id
        }

        fn solve_unchecked(&self, _: &Graph, _: Duration, _: u64) -> Result<SolveResult, SolverError> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            if self.fail {
                return Err(SolverError::Parse("stub failure".into()));
            }
            Ok(SolveResult {
                clique: vec![0, 1],
                clique_size: 2,
                proven_optimal: false,
                wall_seconds: self.seconds,
                solver_id: String::new(),
                budget_exhausted: false,
            })
        }
    }

    fn corpus() -> Vec<CorpusEntry> {
        vec![
            CorpusEntry::Graph(generate(GraphKind::Complete, 4, 0.0, 0).unwrap()),
            CorpusEntry::Graph(generate(GraphKind::Cycle, 5, 0.0, 0).unwrap()),
        ]
    }

    #[test]
    fn two_by_two_campaign() {
        let (a, b) = (Stub::new("a", 1.0), Stub::new("b", 2.0));
        let out = run_campaign(&corpus(), &[&a, &b], &CampaignConfig::default(), None).unwrap();
        assert_eq!(out.records.len(), 4);
        assert_eq!(out.executed, 4);
        assert_eq!(out.matrix.best.len(), 2);
        assert!(out.matrix.best.iter().all(|&i| out.matrix.solvers[i] == "a"));
    }

    #[test]
    fn resume_skips_completed_pairs() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("runs.csv");
        let (a, b) = (Stub::new("a", 1.0), Stub::new("b", 2.0));
        {
            let j = Journal::open(&path, "s").unwrap();
            run_campaign(&corpus()[..1], &[&a, &b], &CampaignConfig::default(), Some(&j)).unwrap();
        }
        let j = Journal::open(&path, "s").unwrap();
        let out = run_campaign(&corpus(), &[&a, &b], &CampaignConfig::default(), Some(&j)).unwrap();
        assert_eq!((out.resumed, out.executed), (2, 2));
        assert_eq!(a.calls.load(Ordering::SeqCst), 2);
        drop(j);
        let j = Journal::open(&path, "s").unwrap();
        let again = run_campaign(&corpus(), &[&a, &b], &CampaignConfig::default(), Some(&j)).unwrap();
        assert_eq!(again.executed, 0);
        assert_eq!(again.matrix, out.matrix);
    }

    #[test]
    fn crashes_and_load_failures_are_recorded() {
        let a = Stub::new("a", 1.0);
        let mut b = Stub::new("b", 0.5);
        b.fail = true;
        let mut entries = corpus();
        entries.push(CorpusEntry::Path(PathBuf::from("/nonexistent/missing.clq")));
        let out = run_campaign(&entries, &[&a, &b], &CampaignConfig::default(), None).unwrap();
        assert_eq!(out.load_failures.len(), 1);
        assert_eq!(out.load_failures[0].0, "missing");
        let failed: Vec<_> = out.records.iter().filter(|r| r.status == RunStatus::Failed).collect();
        assert_eq!(failed.len(), 2);
        assert!(out.matrix.best.iter().all(|&i| out.matrix.solvers[i] == "a"));
        assert!(out.matrix.good.iter().all(|row| !row[1]));
    }

    #[test]
    fn faster_exact_solver_wins_on_k5() {
        use crate::solvers::BuiltinSolver;
        let exact: BuiltinSolver = "exact".parse().unwrap();
        let greedy: BuiltinSolver = "greedy".parse().unwrap();
        let k5 = CorpusEntry::Graph(generate(GraphKind::Complete, 5, 0.0, 0).unwrap());
        let out = run_campaign(&[k5], &[&exact, &greedy], &CampaignConfig::default(), None).unwrap();
        assert!(out.records.iter().all(|r| r.clique_size == 5));
        let t = |id: &str| {
            out.records.iter().find(|r| r.solver_id == id).unwrap().wall_seconds.max(super::super::MIN_SECONDS)
        };
        let expected = if t("exact") <= t("greedy") { "exact" } else { "greedy" };
        assert_eq!(out.matrix.best_solver(0), expected);
    }
}
