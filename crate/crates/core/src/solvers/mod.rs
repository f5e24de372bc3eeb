//! Maximum-clique solver portfolio.
//!
//! Built-in solvers: coloring-bounded branch-and-bound ([`solve_exact_bb`]),
//! restarted greedy ([`solve_greedy`]) and a FastWClq-style local search
//! ([`solve_local_search`]). External binaries plug in through
//! [`ExternalSolver`]; [`export_ilp`] writes the binary program for MILP
//! solvers. Every clique handed out through [`Solver::solve`] is checked
//! pairwise against the graph.

mod bitset;
mod exact;
mod external;
mod greedy;
mod ilp;
mod local_search;

use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph::Graph;

pub use exact::{solve_exact_bb, EXACT_ID};
pub use external::{ExternalSolver, OutputDialect, TMPDIR_ENV};
pub use greedy::{solve_greedy, GreedyVariant, GREEDY_ID, GREEDY_KARP_ID};
pub use ilp::{export_ilp, IlpEncoding};
pub use local_search::{solve_local_search, solve_local_search_with, LocalSearchParams, LOCAL_SEARCH_ID};

pub(crate) use bitset::BitSet;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("failed to start {command:?}: {source}")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },
    #[error("could not parse solver output: {0}")]
    Parse(String),
    #[error("solver exited with {status}: {stderr}")]
    Failed { status: String, stderr: String },
    #[error("solver {solver} returned an invalid clique {clique:?}")]
    InvalidClique { solver: String, clique: Vec<usize> },
    #[error("command template must contain {{instance}}: {0:?}")]
    Template(String),
    #[error("unknown solver {0:?}")]
    Unknown(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Outcome of one solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Sorted node ids; may be empty for external solvers that only report
    /// a size.
    pub clique: Vec<usize>,
    pub clique_size: usize,
    pub proven_optimal: bool,
    pub wall_seconds: f64,
    pub solver_id: String,
    pub budget_exhausted: bool,
}

impl SolveResult {
    pub(crate) fn new(
        solver_id: &str,
        clique: Vec<usize>,
        proven_optimal: bool,
        budget_exhausted: bool,
        elapsed: Duration,
    ) -> Self {
        SolveResult {
            clique_size: clique.len(),
            clique,
            proven_optimal,
            wall_seconds: elapsed.as_secs_f64(),
            solver_id: solver_id.to_string(),
            budget_exhausted,
        }
    }

    /// Pairwise-adjacency check of the reported clique.
    pub fn verify(&self, g: &Graph) -> Result<(), SolverError> {
        let consistent = self.clique.is_empty() || self.clique.len() == self.clique_size;
        if consistent && g.is_clique(&self.clique) && self.clique_size <= g.node_count() {
            Ok(())
        } else {
            Err(SolverError::InvalidClique { solver: self.solver_id.clone(), clique: self.clique.clone() })
        }
    }
}

/// Wall-clock budget; `None` means unlimited.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Deadline(Option<Instant>);

impl Deadline {
    pub(crate) fn new(start: Instant, budget: Option<Duration>) -> Self {
        Deadline(budget.and_then(|b| start.checked_add(b)))
    }

    #[inline]
    pub(crate) fn expired(&self) -> bool {
        self.0.is_some_and(|d| Instant::now() >= d)
    }
}

pub(crate) fn adjacency_bitsets(g: &Graph) -> Vec<BitSet> {
    (0..g.node_count())
        .map(|v| {
            let mut row = BitSet::new(g.node_count());
            for &w in g.neighbors(v) {
                row.insert(w);
            }
            row
        })
        .collect()
}

/// A member of the portfolio.
pub trait Solver: Send + Sync {
    fn id(&self) -> &str;

    /// Run without post-hoc validation.
    fn solve_unchecked(&self, g: &Graph, budget: Duration, seed: u64) -> Result<SolveResult, SolverError>;

    /// Run and reject any result whose clique is not pairwise adjacent.
    fn solve(&self, g: &Graph, budget: Duration, seed: u64) -> Result<SolveResult, SolverError> {
        let mut result = self.solve_unchecked(g, budget, seed)?;
        result.solver_id = self.id().to_string();
        result.verify(g)?;
        Ok(result)
    }
}

/// Built-in solvers addressable by id.
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinSolver {
    Exact,
    Greedy { variant: GreedyVariant, restarts: usize },
    LocalSearch(LocalSearchParams),
}

pub const DEFAULT_GREEDY_RESTARTS: usize = 10;

impl BuiltinSolver {
    pub const IDS: [&'static str; 4] = [EXACT_ID, GREEDY_ID, GREEDY_KARP_ID, LOCAL_SEARCH_ID];
}

impl FromStr for BuiltinSolver {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            EXACT_ID => BuiltinSolver::Exact,
            GREEDY_ID => BuiltinSolver::Greedy { variant: GreedyVariant::MaxDegree, restarts: DEFAULT_GREEDY_RESTARTS },
            GREEDY_KARP_ID => {
                BuiltinSolver::Greedy { variant: GreedyVariant::RandomKarp, restarts: DEFAULT_GREEDY_RESTARTS }
            }
            LOCAL_SEARCH_ID | "fastwclq" | "local-search" => BuiltinSolver::LocalSearch(LocalSearchParams::default()),
            other => return Err(SolverError::Unknown(other.to_string())),
        })
    }
}

impl Solver for BuiltinSolver {
    fn id(&self) -> &str {
        match self {
            BuiltinSolver::Exact => EXACT_ID,
            BuiltinSolver::Greedy { variant, .. } => variant.solver_id(),
            BuiltinSolver::LocalSearch(_) => LOCAL_SEARCH_ID,
        }
    }

    fn solve_unchecked(&self, g: &Graph, budget: Duration, seed: u64) -> Result<SolveResult, SolverError> {
        Ok(match self {
            BuiltinSolver::Exact => solve_exact_bb(g, Some(budget)),
            BuiltinSolver::Greedy { variant, restarts } => solve_greedy(g, *variant, seed, *restarts),
            BuiltinSolver::LocalSearch(params) => solve_local_search_with(g, budget, seed, params),
        })
    }
}
