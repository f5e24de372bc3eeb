//! Append-only CSV journal of run records.
//!
//! Layout: an optional `# <stamp>` line identifying the campaign settings,
//! the header `instance_id,solver_id,clique_size,wall_seconds,proven_optimal,status`
//! and one row per finished run. Every row is flushed as soon as it is
//! written, so a killed campaign loses at most the row being written; a
//! torn final line is cut off when the journal is reopened.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use super::{BenchError, RunRecord};

pub const JOURNAL_HEADER: &str = "instance_id,solver_id,clique_size,wall_seconds,proven_optimal,status";

pub struct Journal {
    path: PathBuf,
    completed: Vec<RunRecord>,
    writer: Mutex<csv::Writer<File>>,
}

impl Journal {
    /// Open `path` for appending, creating it if needed. An existing journal
    /// whose stamp differs from `stamp` is refused.
    pub fn open(path: &Path, stamp: &str) -> Result<Journal, BenchError> {
        let exists = path.metadata().map(|m| m.len() > 0).unwrap_or(false);
        let completed = if exists {
            let found = Self::stamp_of(path)?.unwrap_or_default();
            if found != stamp {
                return Err(BenchError::StampMismatch {
                    path: path.display().to_string(),
                    expected: stamp.to_string(),
                    found,
                });
            }
            truncate_torn_line(path)?;
            read_journal(path)?
        } else {
            Vec::new()
        };
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        if !exists {
            if !stamp.is_empty() {
                writeln!(file, "# {stamp}")?;
            }
            writeln!(file, "{JOURNAL_HEADER}")?;
            file.flush()?;
        }
        let writer = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        Ok(Journal { path: path.to_path_buf(), completed, writer: Mutex::new(writer) })
    }

    /// Stamp line of an existing journal, if any.
    pub fn stamp_of(path: &Path) -> Result<Option<String>, BenchError> {
        let mut first = String::new();
        BufReader::new(File::open(path)?).read_line(&mut first)?;
        Ok(first.strip_prefix('#').map(|s| s.trim().to_string()))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Records present when the journal was opened.
    pub fn completed(&self) -> &[RunRecord] {
        &self.completed
    }

    /// Append and flush one record. Safe to call from several threads.
    pub fn append(&self, record: &RunRecord) -> Result<(), BenchError> {
        let mut w = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        w.serialize(record).map_err(|e| self.error(e))?;
        w.flush()?;
        Ok(())
    }

    fn error(&self, e: csv::Error) -> BenchError {
        BenchError::Journal { path: self.path.display().to_string(), msg: e.to_string() }
    }
}

/// All records of a journal file.
pub fn read_journal(path: &Path) -> Result<Vec<RunRecord>, BenchError> {
    parse_journal(File::open(path)?).map_err(|msg| BenchError::Journal { path: path.display().to_string(), msg })
}

fn parse_journal<R: Read>(input: R) -> Result<Vec<RunRecord>, String> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let header = r.headers().map_err(|e| e.to_string())?;
    let header: Vec<&str> = header.iter().collect();
    if header.join(",") != JOURNAL_HEADER {
        return Err(format!("unexpected header {header:?}"));
    }
    r.deserialize().map(|row| row.map_err(|e| e.to_string())).collect()
}

fn truncate_torn_line(path: &Path) -> std::io::Result<()> {
    let mut file = OpenOptions::new().read(true).write(true).open(path)?;
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes)?;
    if bytes.last().is_some_and(|&b| b != b'\n') {
        let keep = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
        log::warn!("{}: dropping torn final line", path.display());
        file.set_len(keep as u64)?;
        file.seek(SeekFrom::End(0))?;
    }
    Ok(())
}
