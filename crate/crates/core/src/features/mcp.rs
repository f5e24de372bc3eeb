//! Clique-specific features: k-core number and the gap between a greedy
//! colouring and a greedy clique.

use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McpFeatures {
    pub k_core_number: usize,
    pub colors_used: usize,
    pub greedy_clique_size: usize,
    pub chromatic_minus_greedy_clique_gap: i64,
}

pub fn mcp_specific_features(g: &Graph) -> McpFeatures {
    let colors = largest_first_coloring(g);
    let colors_used = colors.iter().copied().max().map_or(0, |c| c + 1);
    let clique = greedy_clique(g);
    McpFeatures {
        k_core_number: k_core_number(g),
        colors_used,
        greedy_clique_size: clique.len(),
        chromatic_minus_greedy_clique_gap: colors_used as i64 - clique.len() as i64,
    }
}

/// Core numbers of every vertex by bucket peeling in `O(|V| + |E|)`.
pub fn core_numbers(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    let mut degree = g.degrees();
    let max_degree = degree.iter().copied().max().unwrap_or(0);

    // Vertices sorted by degree with bucket start offsets.
    let mut bin = vec![0usize; max_degree + 2];
    for &d in &degree {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut order = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[degree[v]];
        order[pos[v]] = v;
        bin[degree[v]] += 1;
    }
    for d in (1..bin.len()).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;

    for i in 0..n {
        let v = order[i];
        for &u in g.neighbors(v) {
            if degree[u] > degree[v] {
                let du = degree[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = order[pw];
                if u != w {
                    order.swap(pu, pw);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                bin[du] += 1;
                degree[u] -= 1;
            }
        }
    }
    degree
}

/// Largest `k` with a non-empty k-core.
pub fn k_core_number(g: &Graph) -> usize {
    core_numbers(g).into_iter().max().unwrap_or(0)
}

/// Greedy colouring in "largest first" order: vertices by descending degree,
/// ties by ascending id, each taking the smallest colour unused by its
/// already-coloured neighbours.
pub fn largest_first_coloring(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut color = vec![usize::MAX; n];
    let mut used = vec![usize::MAX; n + 1];
    for &v in &order {
        for &w in g.neighbors(v) {
            if color[w] != usize::MAX {
                used[color[w]] = v;
            }
        }
        color[v] = (0..=n).find(|&c| used[c] != v).unwrap_or(0);
    }
    color
}

/// Degree-descending greedy clique: repeatedly add the candidate of highest
/// degree in `G` (ties by ascending id) and keep only its neighbours as
/// candidates.
pub fn greedy_clique(g: &Graph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut clique: Vec<usize> = Vec::new();
    for v in order {
        if clique.iter().all(|&c| g.has_edge(c, v)) {
            clique.push(v);
        }
    }
    clique
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};

    #[test]
    fn complete_graph() {
        let m = mcp_specific_features(&generate(GraphKind::Complete, 5, 0.0, 0).unwrap());
        assert_eq!(m.k_core_number, 4);
        assert_eq!(m.colors_used, 5);
        assert_eq!(m.greedy_clique_size, 5);
        assert_eq!(m.chromatic_minus_greedy_clique_gap, 0);
    }

    #[test]
    fn five_cycle_by_hand() {
        // Colouring in id order: 0->0, 1->1, 2->0, 3->1, 4->2. Clique {0, 1}.
        let c5 = generate(GraphKind::Cycle, 5, 0.0, 0).unwrap();
        assert_eq!(largest_first_coloring(&c5), vec![0, 1, 0, 1, 2]);
        assert_eq!(greedy_clique(&c5), vec![0, 1]);
        let m = mcp_specific_features(&c5);
        assert_eq!((m.k_core_number, m.colors_used, m.greedy_clique_size), (2, 3, 2));
        assert_eq!(m.chromatic_minus_greedy_clique_gap, 1);
    }

    #[test]
    fn star_core() {
        assert_eq!(k_core_number(&generate(GraphKind::Star, 7, 0.0, 0).unwrap()), 1);
    }

    #[test]
    fn coloring_is_proper() {
        for seed in 0..20 {
            let g = generate(GraphKind::Gnp, 30, 0.4, seed).unwrap();
            let c = largest_first_coloring(&g);
            assert!(g.edges().iter().all(|&(u, v)| c[u] != c[v]));
            assert!(g.is_clique(&greedy_clique(&g)));
        }
    }
}
