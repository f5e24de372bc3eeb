//! Readers and writers for DIMACS `.clq`, whitespace edge lists and
//! Matrix Market symmetric pattern files.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use super::{Dropped, Graph, GraphError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    DimacsClq,
    EdgeList,
    MatrixMarket,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::DimacsClq => "dimacs",
            Format::EdgeList => "edgelist",
            Format::MatrixMarket => "mtx",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Format::DimacsClq => "clq",
            Format::EdgeList => "txt",
            Format::MatrixMarket => "mtx",
        }
    }
}

impl FromStr for Format {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dimacs" | "clq" | "col" => Ok(Format::DimacsClq),
            "edgelist" | "edges" | "txt" => Ok(Format::EdgeList),
            "mtx" | "matrix-market" | "matrixmarket" => Ok(Format::MatrixMarket),
            other => Err(GraphError::InvalidParameters(format!("unknown format {other:?}"))),
        }
    }
}

/// Outcome of reading one graph file.
#[derive(Debug, Clone)]
pub struct IngestReport {
    pub graph: Graph,
    pub warnings: Vec<String>,
    pub connected: bool,
    pub format: Format,
}

/// Guess the format from a file extension; unknown extensions are edge lists.
pub fn detect_format(path: &Path) -> Format {
    match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
        Some("clq") | Some("col") | Some("dimacs") => Format::DimacsClq,
        Some("mtx") => Format::MatrixMarket,
        _ => Format::EdgeList,
    }
}

/// Read a graph file; `format` overrides extension-based detection.
pub fn load_path(path: &Path, format: Option<Format>) -> Result<IngestReport, GraphError> {
    let format = format.unwrap_or_else(|| detect_format(path));
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("graph").to_string();
    let file = File::open(path)?;
    parse_graph(BufReader::new(file), format, &name)
}

/// Parse a byte stream into a canonical graph.
pub fn parse_graph<R: Read>(reader: R, format: Format, name: &str) -> Result<IngestReport, GraphError> {
    let reader = BufReader::new(reader);
    let mut warnings = Vec::new();
    let (graph, dropped) = match format {
        Format::DimacsClq => parse_dimacs(reader, name, &mut warnings)?,
        Format::EdgeList => parse_edge_list(reader, name)?,
        Format::MatrixMarket => parse_matrix_market(reader, name, &mut warnings)?,
    };
    if dropped.self_loops > 0 {
        warnings.push(format!("dropped {} self-loop(s)", dropped.self_loops));
    }
    if dropped.duplicates > 0 {
        warnings.push(format!("dropped {} duplicate edge(s)", dropped.duplicates));
    }
    let connected = graph.is_connected();
    Ok(IngestReport { graph, warnings, connected, format })
}

fn parse_index(token: Option<&str>, line: usize) -> Result<usize, GraphError> {
    let token = token.ok_or_else(|| GraphError::Parse { line, msg: "missing node id".into() })?;
    token.parse().map_err(|_| GraphError::Parse { line, msg: format!("invalid node id {token:?}") })
}

/// Convert a 1-based id, rejecting 0 and ids above `n`.
fn one_based(id: usize, other: usize, n: usize) -> Result<usize, GraphError> {
    if id == 0 || id > n {
        return Err(GraphError::NodeOutOfRange { u: id.wrapping_sub(1), v: other.wrapping_sub(1), n });
    }
    Ok(id - 1)
}

fn parse_dimacs<R: BufRead>(reader: R, name: &str, warnings: &mut Vec<String>) -> Result<(Graph, Dropped), GraphError> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            None | Some("c") => {}
            Some(t) if t.starts_with('c') => {}
            Some("p") => {
                if header.is_some() {
                    return Err(GraphError::MalformedHeader(format!("second problem line at line {line_no}")));
                }
                let kind = tokens.next();
                if !matches!(kind, Some("edge") | Some("col") | Some("clq")) {
                    return Err(GraphError::MalformedHeader(line.trim().to_string()));
                }
                let n = tokens.next().and_then(|t| t.parse::<usize>().ok());
                let m = tokens.next().and_then(|t| t.parse::<usize>().ok());
                match (n, m) {
                    (Some(n), Some(m)) => header = Some((n, m)),
                    _ => return Err(GraphError::MalformedHeader(line.trim().to_string())),
                }
            }
            Some("e") => {
                let Some((n, _)) = header else {
                    return Err(GraphError::MalformedHeader(format!("edge line {line_no} before the problem line")));
                };
                let u = parse_index(tokens.next(), line_no)?;
                let v = parse_index(tokens.next(), line_no)?;
                edges.push((one_based(u, v, n)?, one_based(v, u, n)?));
            }
            Some(other) => {
                return Err(GraphError::Parse { line: line_no, msg: format!("unexpected line tag {other:?}") })
            }
        }
    }
    let (n, m) = header.ok_or_else(|| GraphError::MalformedHeader("missing 'p edge N M' line".into()))?;
    if n == 0 {
        return Err(GraphError::Empty);
    }
    let (graph, dropped) = Graph::from_edges(name, n, edges)?;
    if graph.edge_count() != m {
        warnings.push(format!("header declares {m} edges, {} distinct edges read", graph.edge_count()));
    }
    Ok((graph, dropped))
}

fn parse_edge_list<R: BufRead>(reader: R, name: &str) -> Result<(Graph, Dropped), GraphError> {
    let mut declared_nodes: Option<usize> = None;
    let mut edges = Vec::new();
    let mut max_id: Option<usize> = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        let (content, comment) = match line.find('#') {
            Some(pos) => (&line[..pos], Some(&line[pos + 1..])),
            None => (line.as_str(), None),
        };
        if let Some(c) = comment {
            if let Some(rest) = c.trim().strip_prefix("nodes:") {
                declared_nodes = Some(rest.trim().parse().map_err(|_| GraphError::Parse {
                    line: line_no,
                    msg: format!("invalid node count {:?}", rest.trim()),
                })?);
            }
        }
        let mut tokens = content.split_whitespace();
        let Some(first) = tokens.next() else { continue };
        let u = parse_index(Some(first), line_no)?;
        let v = parse_index(tokens.next(), line_no)?;
        if tokens.next().is_some() {
            return Err(GraphError::Parse { line: line_no, msg: "expected exactly two node ids".into() });
        }
        max_id = Some(max_id.unwrap_or(0).max(u).max(v));
        edges.push((u, v));
    }
    let n = match (declared_nodes, max_id) {
        (Some(n), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => return Err(GraphError::Empty),
    };
    Graph::from_edges(name, n, edges)
}

fn parse_matrix_market<R: BufRead>(
    reader: R,
    name: &str,
    warnings: &mut Vec<String>,
) -> Result<(Graph, Dropped), GraphError> {
    let mut lines = reader.lines().enumerate();
    let banner = match lines.next() {
        Some((_, l)) => l?,
        None => return Err(GraphError::Empty),
    };
    let lower = banner.to_ascii_lowercase();
    let fields: Vec<&str> = lower.split_whitespace().collect();
    if fields.len() < 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" || fields[2] != "coordinate" {
        return Err(GraphError::MalformedHeader(banner));
    }
    if fields[3] != "pattern" {
        return Err(GraphError::MalformedHeader(format!("only pattern matrices are supported, got {:?}", fields[3])));
    }
    if !matches!(fields[4], "symmetric" | "general") {
        return Err(GraphError::MalformedHeader(format!("unsupported symmetry {:?}", fields[4])));
    }

    let mut size: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (i, line) in lines {
        let line = line?;
        let line_no = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        match size {
            None => {
                let dims: Vec<usize> = tokens
                    .map(|t| t.parse())
                    .collect::<Result<_, _>>()
                    .map_err(|_| GraphError::MalformedHeader(trimmed.to_string()))?;
                if dims.len() != 3 || dims[0] != dims[1] {
                    return Err(GraphError::MalformedHeader(format!("size line {trimmed:?}")));
                }
                size = Some((dims[0], dims[2]));
            }
            Some((n, _)) => {
                let r = parse_index(tokens.next(), line_no)?;
                let c = parse_index(tokens.next(), line_no)?;
                edges.push((one_based(r, c, n)?, one_based(c, r, n)?));
            }
        }
    }
    let (n, nnz) = size.ok_or_else(|| GraphError::MalformedHeader("missing size line".into()))?;
    if n == 0 {
        return Err(GraphError::Empty);
    }
    if edges.len() != nnz {
        warnings.push(format!("size line declares {nnz} entries, {} read", edges.len()));
    }
    Graph::from_edges(name, n, edges)
}

/// Serialize in the given format. 1-based ids for DIMACS and Matrix Market.
pub fn write_graph<W: Write>(g: &Graph, format: Format, mut out: W) -> std::io::Result<()> {
    match format {
        Format::DimacsClq => {
            writeln!(out, "c {}", g.name())?;
            writeln!(out, "p edge {} {}", g.node_count(), g.edge_count())?;
            for &(u, v) in g.edges() {
                writeln!(out, "e {} {}", u + 1, v + 1)?;
            }
        }
        Format::EdgeList => {
            writeln!(out, "# {}", g.name())?;
            writeln!(out, "# nodes: {}", g.node_count())?;
            for &(u, v) in g.edges() {
                writeln!(out, "{u} {v}")?;
            }
        }
        Format::MatrixMarket => {
            writeln!(out, "%%MatrixMarket matrix coordinate pattern symmetric")?;
            writeln!(out, "% {}", g.name())?;
            writeln!(out, "{} {} {}", g.node_count(), g.node_count(), g.edge_count())?;
            for &(u, v) in g.edges() {
                writeln!(out, "{} {}", v + 1, u + 1)?;
            }
        }
    }
    out.flush()
}
