//! Undirected simple graphs, file ingestion and deterministic generators.

mod generate;
mod io;

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

pub use generate::{generate, hamming, GraphKind};
pub use io::{detect_format, load_path, parse_graph, write_graph, Format, IngestReport};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("edge ({u}, {v}) references a node outside [0, {n})")]
    NodeOutOfRange { u: usize, v: usize, n: usize },
    #[error("graph has no nodes")]
    Empty,
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Immutable undirected simple graph with dense 0-based node ids.
///
/// Edges are stored once as `(u, v)` with `u < v`, sorted; adjacency lists
/// are sorted and mirror the edge set exactly.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    name: String,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

/// Result of canonicalizing a raw edge list.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct Dropped {
    pub self_loops: usize,
    pub duplicates: usize,
}

impl Graph {
    /// Build a graph from raw edges, dropping self-loops and duplicates.
    pub fn from_edges(
        name: impl Into<String>,
        node_count: usize,
        raw: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<(Graph, Dropped), GraphError> {
        if node_count == 0 {
            return Err(GraphError::Empty);
        }
        let mut dropped = Dropped::default();
        let mut edges = Vec::new();
        for (u, v) in raw {
            if u >= node_count || v >= node_count {
                return Err(GraphError::NodeOutOfRange { u, v, n: node_count });
            }
            if u == v {
                dropped.self_loops += 1;
                continue;
            }
            edges.push((u.min(v), u.max(v)));
        }
        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        dropped.duplicates = before - edges.len();

        let mut adjacency = vec![Vec::new(); node_count];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok((Graph { name: name.into(), edges, adjacency }, dropped))
    }

    /// Like [`Graph::from_edges`] but discards the drop counts.
    pub fn new(
        name: impl Into<String>,
        node_count: usize,
        raw: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Graph, GraphError> {
        Self::from_edges(name, node_count, raw).map(|(g, _)| g)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical `(u, v)` edges with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// `2|E| / (|V|(|V|-1))`, or 0 for a single node.
    pub fn density(&self) -> f64 {
        let n = self.node_count() as f64;
        if self.node_count() < 2 {
            return 0.0;
        }
        2.0 * self.edge_count() as f64 / (n * (n - 1.0))
    }

    /// `true` iff a traversal from node 0 reaches every node.
    pub fn is_connected(&self) -> bool {
        validate_connected(self)
    }

    /// Every pair of `nodes` is adjacent (and no node repeats).
    pub fn is_clique(&self, nodes: &[usize]) -> bool {
        for (i, &u) in nodes.iter().enumerate() {
            if u >= self.node_count() {
                return false;
            }
            for &v in &nodes[i + 1..] {
                if !self.has_edge(u, v) {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("name", &self.name)
            .field("nodes", &self.node_count())
            .field("edges", &self.edge_count())
            .finish()
    }
}

/// Breadth-first reachability from node 0.
pub fn validate_connected(g: &Graph) -> bool {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut reached = 1;
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                reached += 1;
                queue.push_back(w);
            }
        }
    }
    reached == n
}
