//! Adapter for external maximum-clique binaries.
//!
//! The instance is written to a private temporary directory in the format
//! the binary expects (conversion time is not charged to the solver), the
//! command template is expanded and run through `sh -c`, and the process
//! group is killed when the budget expires. The reported clique size and
//! solve time are scraped from stdout according to an [`OutputDialect`].
//!
//! Template placeholders: `{instance}` (required), `{budget}` (seconds) and
//! `{seed}`.

use std::fs::File;
use std::io::{BufWriter, Read};
use std::process::{Child, Command, Stdio};
use std::str::FromStr;
use std::thread;
use std::time::{Duration, Instant};

use super::{SolveResult, Solver, SolverError};
use crate::graph::{write_graph, Format, Graph};

/// Environment variable naming the parent directory for solver scratch dirs.
pub const TMPDIR_ENV: &str = "MCPISA_TMPDIR";

const POLL_INTERVAL: Duration = Duration::from_millis(5);

/// How to read a solver's stdout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputDialect {
    /// `clique <size>` and `time <seconds>` tokens; optional `vertices v1 v2 ...`
    /// with 1-based ids. The last occurrence of each wins, so a solver can
    /// stream improving incumbents.
    Generic,
    /// Size under `omega`, `w` or `clique`; solve time is the sum of the
    /// `ts`, `tr` and `tp` fields.
    CliSat,
}

impl FromStr for OutputDialect {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "generic" => Ok(OutputDialect::Generic),
            "clisat" => Ok(OutputDialect::CliSat),
            other => Err(SolverError::Parse(format!("unknown output dialect {other:?}"))),
        }
    }
}

#[derive(Debug, Default, PartialEq)]
struct ParsedOutput {
    size: Option<usize>,
    seconds: Option<f64>,
    vertices: Option<Vec<usize>>,
}

fn parse_seconds(token: &str) -> Option<f64> {
    token.trim_end_matches('s').parse().ok().filter(|v: &f64| v.is_finite() && *v >= 0.0)
}

fn parse_output(text: &str, dialect: OutputDialect) -> Result<ParsedOutput, SolverError> {
    let mut out = ParsedOutput::default();
    let mut parts = [None::<f64>; 3];
    for line in text.lines() {
        let cleaned: String = line.chars().map(|c| if matches!(c, '=' | ':' | ',' | ';') { ' ' } else { c }).collect();
        let tokens: Vec<String> = cleaned.split_whitespace().map(str::to_ascii_lowercase).collect();
        for (i, key) in tokens.iter().enumerate() {
            let next = tokens.get(i + 1).map(String::as_str);
            match (dialect, key.as_str()) {
                (_, "vertices") => {
                    let ids = tokens[i + 1..]
                        .iter()
                        .map(|t| t.parse::<usize>())
                        .take_while(Result::is_ok)
                        .map(Result::unwrap)
                        .map(|v| {
                            v.checked_sub(1).ok_or_else(|| SolverError::Parse("vertex id 0 in 1-based list".into()))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    out.vertices = Some(ids);
                }
                (OutputDialect::Generic, "clique") | (OutputDialect::CliSat, "clique" | "omega" | "w") => {
                    if let Some(size) = next.and_then(|t| t.parse().ok()) {
                        out.size = Some(size);
                    }
                }
                (OutputDialect::Generic, "time") => {
                    if let Some(s) = next.and_then(parse_seconds) {
                        out.seconds = Some(s);
                    }
                }
                (OutputDialect::CliSat, k @ ("ts" | "tr" | "tp")) => {
                    let slot = match k {
                        "ts" => 0,
                        "tr" => 1,
                        _ => 2,
                    };
                    if let Some(s) = next.and_then(parse_seconds) {
                        parts[slot] = Some(s);
                    }
                }
                _ => {}
            }
        }
    }
    if dialect == OutputDialect::CliSat && parts.iter().any(Option::is_some) {
        out.seconds = Some(parts.iter().flatten().sum());
    }
    if out.size.is_none() {
        out.size = out.vertices.as_ref().map(Vec::len);
    }
    Ok(out)
}

/// An external binary driven through a command template.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalSolver {
    pub id: String,
    pub command: String,
    pub dialect: OutputDialect,
    pub input_format: Format,
}

impl ExternalSolver {
    pub fn new(
        id: impl Into<String>,
        command: impl Into<String>,
        dialect: OutputDialect,
        input_format: Format,
    ) -> Result<Self, SolverError> {
        let command = command.into();
        if !command.contains("{instance}") {
            return Err(SolverError::Template(command));
        }
        Ok(ExternalSolver { id: id.into(), command, dialect, input_format })
    }

    fn scratch_dir() -> std::io::Result<tempfile::TempDir> {
        let mut builder = tempfile::Builder::new();
        builder.prefix("mcpisa-");
        match std::env::var_os(TMPDIR_ENV) {
            Some(dir) => {
                std::fs::create_dir_all(&dir)?;
                builder.tempdir_in(dir)
            }
            None => builder.tempdir(),
        }
    }

    /// Run the binary once on `g`.
    pub fn run(&self, g: &Graph, budget: Duration, seed: u64) -> Result<SolveResult, SolverError> {
        let dir = Self::scratch_dir()?;
        let path = dir.path().join(format!("instance.{}", self.input_format.extension()));
        {
            let file = BufWriter::new(File::create(&path)?);
            write_graph(g, self.input_format, file)?;
        }
        let command = self
            .command
            .replace("{instance}", &path.to_string_lossy())
            .replace("{budget}", &budget.as_secs_f64().to_string())
            .replace("{seed}", &seed.to_string());

        let mut cmd = Command::new("sh");
        cmd.arg("-c").arg(&command).stdin(Stdio::null()).stdout(Stdio::piped()).stderr(Stdio::piped());
        #[cfg(unix)]
        {
            use std::os::unix::process::CommandExt;
            cmd.process_group(0);
        }
        let start = Instant::now();
        let mut child = cmd.spawn().map_err(|source| SolverError::Spawn { command: command.clone(), source })?;
        let stdout = drain(child.stdout.take());
        let stderr = drain(child.stderr.take());

        let mut killed = false;
        let status = loop {
            if let Some(status) = child.try_wait()? {
                break status;
            }
            if start.elapsed() >= budget {
                kill_group(&mut child);
                killed = true;
                break child.wait()?;
            }
            thread::sleep(POLL_INTERVAL);
        };
        let elapsed = start.elapsed();
        let stdout = stdout.join().unwrap_or_default();
        let stderr = stderr.join().unwrap_or_default();

        let parsed = parse_output(&stdout, self.dialect)?;
        if !killed && !status.success() {
            return Err(SolverError::Failed { status: status.to_string(), stderr: stderr.trim().to_string() });
        }
        let clique = parsed.vertices.clone().unwrap_or_default();
        let size = match parsed.size {
            Some(s) => s,
            None if killed => 0,
            None => return Err(SolverError::Parse(format!("no clique size in output of {:?}", self.id))),
        };
        let wall_seconds = if killed { elapsed.as_secs_f64() } else { parsed.seconds.unwrap_or(elapsed.as_secs_f64()) };
        let mut clique = clique;
        clique.sort_unstable();
        Ok(SolveResult {
            clique,
            clique_size: size,
            proven_optimal: false,
            wall_seconds,
            solver_id: self.id.clone(),
            budget_exhausted: killed,
        })
    }
}

impl Solver for ExternalSolver {
    fn id(&self) -> &str {
        &self.id
    }

    fn solve_unchecked(&self, g: &Graph, budget: Duration, seed: u64) -> Result<SolveResult, SolverError> {
        self.run(g, budget, seed)
    }
}

fn drain<R: Read + Send + 'static>(pipe: Option<R>) -> thread::JoinHandle<String> {
    thread::spawn(move || {
        let mut buf = Vec::new();
        if let Some(mut p) = pipe {
            let _ = p.read_to_end(&mut buf);
        }
        String::from_utf8_lossy(&buf).into_owned()
    })
}

fn kill_group(child: &mut Child) {
    #[cfg(unix)]
    {
        // SAFETY: plain signal delivery to the process group we created.
        unsafe {
            libc::kill(-(child.id() as libc::pid_t), libc::SIGKILL);
        }
    }
    let _ = child.kill();
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generic_dialect() {
        let p = parse_output("starting\nclique 5\nclique 7 time 0.5\n", OutputDialect::Generic).unwrap();
        assert_eq!(p.size, Some(7));
        assert_eq!(p.seconds, Some(0.5));
        let p = parse_output("vertices 1 3 4\n", OutputDialect::Generic).unwrap();
        assert_eq!(p.vertices, Some(vec![0, 2, 3]));
        assert_eq!(p.size, Some(3));
        assert!(parse_output("vertices 0 1\n", OutputDialect::Generic).is_err());
    }

    #[test]
    fn clisat_dialect_sums_phases() {
        let p = parse_output("w = 12\nts=1.0 tr=0.2 tp=0.1\n", OutputDialect::CliSat).unwrap();
        assert_eq!(p.size, Some(12));
        assert!((p.seconds.unwrap() - 1.3).abs() < 1e-12);
    }

    #[test]
    fn template_requires_instance() {
        assert!(
            ExternalSolver::new("x", "solver --budget {budget}", OutputDialect::Generic, Format::DimacsClq).is_err()
        );
    }
}
