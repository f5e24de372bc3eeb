//! Restarted greedy clique construction.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::bitset::BitSet;
use super::{adjacency_bitsets, SolveResult};
use crate::graph::Graph;

pub const GREEDY_ID: &str = "greedy";
pub const GREEDY_KARP_ID: &str = "greedy-karp";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreedyVariant {
    /// Next vertex drawn uniformly from the candidates.
    RandomKarp,
    /// Next vertex is the candidate with most neighbours among the
    /// candidates (ties by ascending id). Restart 0 starts from the full
    /// vertex set; later restarts start from a uniformly drawn vertex.
    MaxDegree,
}

impl GreedyVariant {
    pub fn solver_id(self) -> &'static str {
        match self {
            GreedyVariant::RandomKarp => GREEDY_KARP_ID,
            GreedyVariant::MaxDegree => GREEDY_ID,
        }
    }
}

pub fn solve_greedy(g: &Graph, variant: GreedyVariant, seed: u64, restarts: usize) -> SolveResult {
    let start = Instant::now();
    let n = g.node_count();
    let adj = adjacency_bitsets(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Vec<usize> = Vec::new();
    for restart in 0..restarts.max(1) {
        let mut cand = BitSet::full(n);
        let mut clique = Vec::new();
        loop {
            let members: Vec<usize> = cand.iter().collect();
            let pick = match variant {
                GreedyVariant::RandomKarp => members.choose(&mut rng).copied(),
                GreedyVariant::MaxDegree if restart > 0 && clique.is_empty() => members.choose(&mut rng).copied(),
                GreedyVariant::MaxDegree => {
                    let mut best_v = None;
                    let mut best_score = 0;
                    for &v in &members {
                        let score = adj[v].and_count(&cand);
                        if best_v.is_none() || score > best_score {
                            best_v = Some(v);
                            best_score = score;
                        }
                    }
                    best_v
                }
            };
            let Some(v) = pick else { break };
            clique.push(v);
            cand.and_assign(&adj[v]);
        }
        if clique.len() > best.len() {
            best = clique;
        }
    }
    best.sort_unstable();
    SolveResult::new(variant.solver_id(), best, false, false, start.elapsed())
}
