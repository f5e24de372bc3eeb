//! Unweighted FastWClq-style local search.
//!
//! Each round builds a clique from a random alive start vertex, adding
//! candidates chosen by best-from-multiple-selection (sample `t` candidates,
//! keep the one with most neighbours inside the candidate set). A
//! construction is abandoned once `|clique| + |candidates| <= |best|`. A
//! short tabu plateau walk (add moves, then one-for-one swaps) polishes
//! every completed construction. Whenever the best clique grows, every
//! vertex `v` with `deg(v) + 1 <= |best|` in the remaining graph is peeled
//! off, cascading. If peeling empties the graph no larger clique exists and
//! the result is reported as optimal.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::bitset::BitSet;
use super::{adjacency_bitsets, Deadline, SolveResult};
use crate::graph::Graph;

pub const LOCAL_SEARCH_ID: &str = "fastwclq-like";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalSearchParams {
    /// BMS sample sizes cycled through by successive constructions;
    /// `usize::MAX` scores every candidate.
    pub bms_schedule: [usize; 4],
    pub plateau_steps: usize,
    pub tabu_tenure: usize,
    /// Stop as soon as a clique of this size is found.
    pub target_size: Option<usize>,
}

impl Default for LocalSearchParams {
    fn default() -> Self {
        LocalSearchParams {
            bms_schedule: [usize::MAX, 64, 16, 4],
            plateau_steps: 100,
            tabu_tenure: 7,
            target_size: None,
        }
    }
}

struct State<'g> {
    g: &'g Graph,
    adj: Vec<BitSet>,
    alive: BitSet,
    alive_list: Vec<usize>,
    alive_degree: Vec<usize>,
    best: Vec<usize>,
    rng: ChaCha8Rng,
}

impl State<'_> {
    fn construct(&mut self, start: usize, samples: usize) -> Option<Vec<usize>> {
        let mut clique = vec![start];
        let mut cand = self.adj[start].intersection(&self.alive);
        loop {
            let members: Vec<usize> = cand.iter().collect();
            if members.is_empty() {
                return Some(clique);
            }
            if clique.len() + members.len() <= self.best.len() {
                return None;
            }
            let mut pick = usize::MAX;
            let mut pick_score = 0;
            let consider = |v: usize, pick: &mut usize, pick_score: &mut usize| {
                let score = self.adj[v].and_count(&cand);
                if *pick == usize::MAX || score > *pick_score || (score == *pick_score && v < *pick) {
                    *pick = v;
                    *pick_score = score;
                }
            };
            if samples >= members.len() {
                for &v in &members {
                    consider(v, &mut pick, &mut pick_score);
                }
            } else {
                for _ in 0..samples {
                    let v = members[self.rng.gen_range(0..members.len())];
                    consider(v, &mut pick, &mut pick_score);
                }
            }
            clique.push(pick);
            cand.and_assign(&self.adj[pick]);
        }
    }

    /// Tabu walk over add and swap moves; returns the largest clique seen.
    fn plateau(&mut self, clique: Vec<usize>, steps: usize, tenure: usize) -> Vec<usize> {
        let n = self.g.node_count();
        let mut in_clique = BitSet::new(n);
        for &v in &clique {
            in_clique.insert(v);
        }
        // miss[v]: members of the clique not adjacent to v.
        let mut miss = vec![usize::MAX; n];
        for &v in &self.alive_list {
            if !in_clique.contains(v) {
                miss[v] = clique.len() - self.adj[v].and_count(&in_clique);
            }
        }
        let mut current = clique;
        let mut best = current.clone();
        let mut tabu_until = vec![0usize; n];

        for step in 1..=steps {
            let adds: Vec<usize> =
                self.alive_list.iter().copied().filter(|&v| !in_clique.contains(v) && miss[v] == 0).collect();
            if let Some(&v) = adds.choose(&mut self.rng) {
                self.enter(v, &mut current, &mut in_clique, &mut miss);
            } else {
                let swaps: Vec<usize> = self
                    .alive_list
                    .iter()
                    .copied()
                    .filter(|&v| !in_clique.contains(v) && miss[v] == 1 && tabu_until[v] < step)
                    .collect();
                let Some(&v) = swaps.choose(&mut self.rng) else { break };
                let Some(pos) = current.iter().position(|&u| !self.adj[v].contains(u)) else { break };
                let u = current.swap_remove(pos);
                in_clique.remove(u);
                for &w in &self.alive_list {
                    if w != u && !in_clique.contains(w) && !self.adj[u].contains(w) {
                        miss[w] -= 1;
                    }
                }
                miss[u] = current.len() - self.adj[u].and_count(&in_clique);
                tabu_until[u] = step + tenure;
                self.enter(v, &mut current, &mut in_clique, &mut miss);
            }
            if current.len() > best.len() {
                best = current.clone();
            }
        }
        best
    }

    fn enter(&self, v: usize, current: &mut Vec<usize>, in_clique: &mut BitSet, miss: &mut [usize]) {
        current.push(v);
        in_clique.insert(v);
        for &w in &self.alive_list {
            if w != v && !in_clique.contains(w) && !self.adj[v].contains(w) {
                miss[w] += 1;
            }
        }
    }

    /// Peel every vertex that cannot belong to a clique larger than `best`.
    fn reduce(&mut self) {
        let bound = self.best.len();
        let mut stack: Vec<usize> =
            self.alive_list.iter().copied().filter(|&v| self.alive_degree[v] < bound).collect();
        while let Some(v) = stack.pop() {
            if !self.alive.contains(v) {
                continue;
            }
            self.alive.remove(v);
            for &w in self.g.neighbors(v) {
                if self.alive.contains(w) {
                    self.alive_degree[w] -= 1;
                    if self.alive_degree[w] < bound {
                        stack.push(w);
                    }
                }
            }
        }
        self.alive_list = self.alive.iter().collect();
    }
}

pub fn solve_local_search(g: &Graph, budget: Duration, seed: u64) -> SolveResult {
    solve_local_search_with(g, budget, seed, &LocalSearchParams::default())
}

pub fn solve_local_search_with(g: &Graph, budget: Duration, seed: u64, params: &LocalSearchParams) -> SolveResult {
    let start = Instant::now();
    let deadline = Deadline::new(start, Some(budget));
    let n = g.node_count();
    let mut state = State {
        g,
        adj: adjacency_bitsets(g),
        alive: BitSet::full(n),
        alive_list: (0..n).collect(),
        alive_degree: g.degrees(),
        best: Vec::new(),
        rng: ChaCha8Rng::seed_from_u64(seed),
    };
    let mut round = 0usize;
    let mut exhausted_budget = false;
    loop {
        if state.alive_list.is_empty() {
            break;
        }
        if deadline.expired() {
            exhausted_budget = true;
            break;
        }
        let samples = params.bms_schedule[round % params.bms_schedule.len()];
        round += 1;
        let v = state.alive_list[state.rng.gen_range(0..state.alive_list.len())];
        let Some(clique) = state.construct(v, samples) else { continue };
        let clique = state.plateau(clique, params.plateau_steps, params.tabu_tenure);
        if clique.len() > state.best.len() {
            state.best = clique;
            state.reduce();
            if params.target_size.is_some_and(|t| state.best.len() >= t) {
                break;
            }
        }
    }
    let proven = state.alive_list.is_empty();
    let mut best = state.best;
    best.sort_unstable();
    SolveResult::new(LOCAL_SEARCH_ID, best, proven, exhausted_budget, start.elapsed())
}
