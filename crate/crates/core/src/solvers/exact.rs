//! Branch-and-bound with greedy-colouring upper bounds.
//!
//! Vertices are renumbered by descending degree (ties by ascending id) so
//! that bit order is the branching order. At every node the candidate set is
//! partitioned into colour classes greedily; a vertex whose colour index is
//! `c` can extend the current clique by at most `c` vertices, so a branch is
//! cut as soon as `|current| + c <= |best|`.

use std::time::{Duration, Instant};

use super::bitset::BitSet;
use super::{Deadline, SolveResult};
use crate::features::greedy_clique;
use crate::graph::Graph;

pub const EXACT_ID: &str = "exact";

struct Search<'a> {
    adj: &'a [BitSet],
    n: usize,
    current: Vec<usize>,
    best: Vec<usize>,
    deadline: Deadline,
    nodes: u64,
    aborted: bool,
}

impl Search<'_> {
    /// Colour `cand` greedily; returns vertices in colour order with the
    /// colour index (1-based) of each.
    fn color_sort(&self, cand: &BitSet) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::with_capacity(cand.count());
        let mut colors = Vec::with_capacity(order.capacity());
        let mut uncolored = cand.clone();
        let mut color = 0;
        while !uncolored.is_empty() {
            color += 1;
            let mut class = uncolored.clone();
            while let Some(v) = class.first() {
                class.remove(v);
                class.and_not_assign(&self.adj[v]);
                uncolored.remove(v);
                order.push(v);
                colors.push(color);
            }
        }
        (order, colors)
    }

    fn expand(&mut self, mut cand: BitSet) {
        let (order, colors) = self.color_sort(&cand);
        for i in (0..order.len()).rev() {
            if self.current.len() + colors[i] <= self.best.len() {
                return;
            }
            self.nodes += 1;
            if self.nodes.is_multiple_of(256) && self.deadline.expired() {
                self.aborted = true;
            }
            if self.aborted {
                return;
            }
            let v = order[i];
            self.current.push(v);
            let next = cand.intersection(&self.adj[v]);
            if next.is_empty() {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
            cand.remove(v);
        }
    }
}

/// Anytime exact solver. `budget = None` searches to completion.
pub fn solve_exact_bb(g: &Graph, budget: Option<Duration>) -> SolveResult {
    let start = Instant::now();
    let n = g.node_count();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut rank = vec![0; n];
    for (i, &v) in perm.iter().enumerate() {
        rank[v] = i;
    }
    let adj: Vec<BitSet> = perm
        .iter()
        .map(|&v| {
            let mut row = BitSet::new(n);
            for &w in g.neighbors(v) {
                row.insert(rank[w]);
            }
            row
        })
        .collect();

    let initial: Vec<usize> = greedy_clique(g).into_iter().map(|v| rank[v]).collect();
    let mut search = Search {
        adj: &adj,
        n,
        current: Vec::new(),
        best: initial,
        deadline: Deadline::new(start, budget),
        nodes: 0,
        aborted: false,
    };
    search.expand(BitSet::full(search.n));

    let mut clique: Vec<usize> = search.best.iter().map(|&i| perm[i]).collect();
    clique.sort_unstable();
    SolveResult::new(EXACT_ID, clique, !search.aborted, search.aborted, start.elapsed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};

    #[test]
    fn small_fixtures() {
        let r = solve_exact_bb(&generate(GraphKind::Complete, 5, 0.0, 0).unwrap(), None);
        assert_eq!(r.clique_size, 5);
        assert!(r.proven_optimal);
        let r = solve_exact_bb(&generate(GraphKind::Cycle, 5, 0.0, 0).unwrap(), None);
        assert_eq!(r.clique_size, 2);
        assert!(r.proven_optimal);
        let r = solve_exact_bb(&Graph::new("iso", 3, []).unwrap(), None);
        assert_eq!(r.clique_size, 1);
    }

    #[test]
    fn zero_budget_returns_incumbent() {
        let g = generate(GraphKind::Gnp, 200, 0.9, 3).unwrap();
        let r = solve_exact_bb(&g, Some(Duration::ZERO));
        assert!(!r.proven_optimal);
        assert!(r.budget_exhausted);
        assert!(r.clique_size >= 2);
        assert!(g.is_clique(&r.clique));
    }
}
