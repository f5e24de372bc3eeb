//! Binary program for the maximum clique:
//! maximize `sum x_i` subject to `x_i + x_j <= 1` for every non-edge.

use std::io::Write;

use crate::graph::Graph;

/// Terms per line in the objective and the binaries section.
const TERMS_PER_LINE: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IlpEncoding {
    pub name: String,
    pub variables: usize,
    /// Non-edges `(i, j)`, `i < j`, in lexicographic order.
    pub constraints: Vec<(usize, usize)>,
}

pub fn export_ilp(g: &Graph) -> IlpEncoding {
    let n = g.node_count();
    let mut constraints = Vec::with_capacity(n * n.saturating_sub(1) / 2 - g.edge_count());
    for u in 0..n {
        let neighbors = g.neighbors(u);
        let mut k = neighbors.partition_point(|&w| w <= u);
        for v in u + 1..n {
            if k < neighbors.len() && neighbors[k] == v {
                k += 1;
            } else {
                constraints.push((u, v));
            }
        }
    }
    IlpEncoding { name: g.name().to_string(), variables: n, constraints }
}

impl IlpEncoding {
    /// Write in CPLEX LP syntax. Output is byte-stable for a given graph.
    pub fn write_lp<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "\\ Maximum clique of {}", self.name)?;
        writeln!(out, "Maximize")?;
        write!(out, " obj:")?;
        for i in 0..self.variables {
            if i > 0 && i % TERMS_PER_LINE == 0 {
                write!(out, "\n     ")?;
            }
            if i == 0 {
                write!(out, " x{i}")?;
            } else {
                write!(out, " + x{i}")?;
            }
        }
        writeln!(out)?;
        writeln!(out, "Subject To")?;
        for (k, &(i, j)) in self.constraints.iter().enumerate() {
            writeln!(out, " c{k}: x{i} + x{j} <= 1")?;
        }
        writeln!(out, "Binary")?;
        for chunk in (0..self.variables).collect::<Vec<_>>().chunks(TERMS_PER_LINE) {
            let names: Vec<String> = chunk.iter().map(|i| format!("x{i}")).collect();
            writeln!(out, " {}", names.join(" "))?;
        }
        writeln!(out, "End")?;
        out.flush()
    }

    pub fn to_lp_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_lp(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("LP output is ASCII")
    }
}
