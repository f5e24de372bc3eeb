//! Stamped CSV artifacts.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::PipelineError;

/// First-line `# ...` stamp of an artifact, `None` when the file is absent.
pub fn read_stamp(path: &Path) -> Result<Option<String>, PipelineError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let mut first = String::new();
    BufReader::new(file).read_line(&mut first)?;
    Ok(first.strip_prefix("# ").map(|s| s.trim_end().to_string()))
}

/// Write through a temporary file in the same directory and rename it into
/// place, so a crash never leaves a half-written artifact.
pub(crate) fn write_atomic(
    path: &Path,
    f: impl FnOnce(&mut dyn Write) -> Result<(), PipelineError>,
) -> Result<(), PipelineError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        f(&mut w)?;
        w.flush()?;
    }
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Stamp line followed by a CSV table of serializable rows.
pub(crate) fn write_stamped_csv<T: Serialize>(path: &Path, stamp: &str, rows: &[T]) -> Result<(), PipelineError> {
    write_atomic(path, |out| {
        writeln!(out, "# {stamp}")?;
        let mut w = csv::Writer::from_writer(out);
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    })
}

pub(crate) fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, PipelineError> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    let mut rows = Vec::new();
    for row in r.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

/// One line of `ingest.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestRow {
    pub instance_id: String,
    pub path: String,
    pub format: String,
    pub nodes: usize,
    pub edges: usize,
    pub density: f64,
    pub connected: bool,
    /// `ok` or `error`.
    pub status: String,
    /// Edge-list hash for loaded graphs, the error text otherwise.
    pub detail: String,
    pub warnings: String,
}

impl IngestRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

pub fn read_ingest(path: &Path) -> Result<Vec<IngestRow>, PipelineError> {
    read_csv(path)
}

/// One line of `projection.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionRow {
    pub instance_id: String,
    pub z1: f64,
    pub z2: f64,
    /// Empty when the instance was not benchmarked.
    pub best_solver: String,
}

pub fn read_projection_csv(path: &Path) -> Result<Vec<ProjectionRow>, PipelineError> {
    read_csv(path)
}
