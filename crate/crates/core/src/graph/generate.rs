use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, GraphError};

/// Synthetic graph families used for fixtures and smoke corpora.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphKind {
    Complete,
    Cycle,
    Path,
    /// Node 0 joined to `n - 1` leaves.
    Star,
    /// Erdős–Rényi G(n, p).
    Gnp,
}

impl std::str::FromStr for GraphKind {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "complete" => GraphKind::Complete,
            "cycle" => GraphKind::Cycle,
            "path" => GraphKind::Path,
            "star" => GraphKind::Star,
            "gnp" => GraphKind::Gnp,
            other => return Err(GraphError::InvalidParameters(format!("unknown kind {other:?}"))),
        })
    }
}

/// Deterministic generator.
///
/// `gnp` draws one `f64` in `[0, 1)` per unordered pair `(u, v)`, `u < v`, in
/// lexicographic order from a ChaCha8 stream seeded with `seed`; the pair is
/// an edge iff the draw is `< p`. ChaCha8 output is specified bit-for-bit, so
/// fixtures are identical across platforms. `p` and `seed` are ignored by the
/// other kinds.
pub fn generate(kind: GraphKind, n: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    if n == 0 {
        return Err(GraphError::InvalidParameters("n must be >= 1".into()));
    }
    let mut edges = Vec::new();
    let name = match kind {
        GraphKind::Complete => {
            for u in 0..n {
                for v in u + 1..n {
                    edges.push((u, v));
                }
            }
            format!("complete_{n}")
        }
        GraphKind::Cycle => {
            if n < 3 {
                return Err(GraphError::InvalidParameters("cycle needs n >= 3".into()));
            }
            edges.extend((0..n).map(|u| (u, (u + 1) % n)));
            format!("cycle_{n}")
        }
        GraphKind::Path => {
            edges.extend((1..n).map(|u| (u - 1, u)));
            format!("path_{n}")
        }
        GraphKind::Star => {
            edges.extend((1..n).map(|u| (0, u)));
            format!("star_{n}")
        }
        GraphKind::Gnp => {
            if !(0.0..=1.0).contains(&p) {
                return Err(GraphError::InvalidParameters(format!("p = {p} outside [0, 1]")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen::<f64>() < p {
                        edges.push((u, v));
                    }
                }
            }
            format!("gnp_{n}_{p}_{seed}")
        }
    };
    Graph::new(name, n, edges)
}

/// Hamming graph `H(bits, d)`: words of length `bits`, adjacent when their
/// Hamming distance is at least `min_distance` (DIMACS `hammingB-D`).
pub fn hamming(bits: u32, min_distance: u32) -> Result<Graph, GraphError> {
    if bits == 0 || bits > 20 {
        return Err(GraphError::InvalidParameters(format!("bits = {bits} outside 1..=20")));
    }
    let n = 1usize << bits;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if ((u ^ v) as u32).count_ones() >= min_distance {
                edges.push((u, v));
            }
        }
    }
    Graph::new(format!("hamming{bits}-{min_distance}"), n, edges)
}
