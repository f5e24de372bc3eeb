//! Declarative campaign configuration (TOML).
//!
//! ```toml
//! [corpus]
//! paths = ["graphs/*.clq", "more/*.txt"]
//!
//! [portfolio]
//! builtin = ["exact", "greedy", "fastwclq-like"]
//! [[portfolio.external]]
//! id = "clisat"
//! command = "clisat {instance} -t {budget}"
//! dialect = "clisat"
//! format = "dimacs"
//!
//! [budgets]
//! solver_secs = 1800
//! feature_secs = 120
//!
//! [thresholds]
//! correlation = 0.8
//! tolerance = 0.05
//!
//! [output]
//! dir = "out"
//!
//! [run]
//! seed = 0
//! jobs = 0
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::PipelineError;
use crate::graph::Format;
use crate::solvers::{BuiltinSolver, ExternalSolver, OutputDialect, Solver};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub corpus: CorpusConfig,
    #[serde(default)]
    pub portfolio: PortfolioConfig,
    #[serde(default)]
    pub budgets: BudgetConfig,
    #[serde(default)]
    pub thresholds: ThresholdConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub projection: ProjectionConfig,
    #[serde(default)]
    pub selector: SelectorConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusConfig {
    /// Files or glob patterns.
    pub paths: Vec<String>,
    /// Force one format instead of detecting it from the extension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PortfolioConfig {
    pub builtin: Vec<String>,
    pub external: Vec<ExternalConfig>,
}

impl Default for PortfolioConfig {
    fn default() -> Self {
        PortfolioConfig { builtin: vec!["exact".into(), "greedy".into(), "fastwclq-like".into()], external: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalConfig {
    pub id: String,
    pub command: String,
    #[serde(default = "default_dialect")]
    pub dialect: String,
    #[serde(default = "default_format")]
    pub format: String,
}

fn default_dialect() -> String {
    "generic".into()
}

fn default_format() -> String {
    "dimacs".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetConfig {
    pub solver_secs: f64,
    pub feature_secs: f64,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        BudgetConfig { solver_secs: 1800.0, feature_secs: 120.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThresholdConfig {
    pub correlation: f64,
    pub tolerance: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig { correlation: crate::isa::DEFAULT_THRESHOLD, tolerance: crate::bench::DEFAULT_TOLERANCE }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("mcpisa-out") }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ProjectionConfig {
    /// `name w1 w2` matrix file used instead of fitting a projection.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelectorConfig {
    /// `z` for projected coordinates, `features` for the selected features.
    pub input_space: String,
    pub c_grid: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    pub folds: usize,
}

impl Default for SelectorConfig {
    fn default() -> Self {
        SelectorConfig {
            input_space: "z".into(),
            c_grid: crate::selector::DEFAULT_C_GRID.to_vec(),
            gamma_grid: crate::selector::DEFAULT_GAMMA_GRID.to_vec(),
            folds: crate::selector::DEFAULT_FOLDS,
        }
    }
}

fn config_error(field: &str, msg: impl Into<String>) -> PipelineError {
    PipelineError::Config { field: field.to_string(), msg: msg.into() }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        let config: PipelineConfig = toml::from_str(text).map_err(|e| {
            let field = e.span().map(|s| format!("byte {}..{}", s.start, s.end)).unwrap_or_default();
            config_error(&field, e.message().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Parse `path` and resolve relative paths against its directory.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| config_error("config", format!("{}: {e}", path.display())))?;
        let mut config = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.resolve_relative_to(base);
        Ok(config)
    }

    pub fn resolve_relative_to(&mut self, base: &Path) {
        let fix = |p: &Path| if p.is_relative() { base.join(p) } else { p.to_path_buf() };
        self.corpus.paths =
            self.corpus.paths.iter().map(|p| fix(Path::new(p)).to_string_lossy().into_owned()).collect();
        self.output.dir = fix(&self.output.dir);
        if let Some(m) = &self.projection.matrix {
            self.projection.matrix = Some(fix(m));
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.corpus.paths.is_empty() {
            return Err(config_error("corpus.paths", "no corpus paths"));
        }
        if let Some(f) = &self.corpus.format {
            f.parse::<Format>().map_err(|e| config_error("corpus.format", e.to_string()))?;
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.budgets.solver_secs) {
            return Err(config_error("budgets.solver_secs", "must be a positive number of seconds"));
        }
        if !positive(self.budgets.feature_secs) {
            return Err(config_error("budgets.feature_secs", "must be a positive number of seconds"));
        }
        if !(0.0..=1.0).contains(&self.thresholds.correlation) {
            return Err(config_error("thresholds.correlation", "must lie in [0, 1]"));
        }
        if !(self.thresholds.tolerance.is_finite() && self.thresholds.tolerance >= 0.0) {
            return Err(config_error("thresholds.tolerance", "must be a non-negative fraction"));
        }
        if self.portfolio.builtin.is_empty() && self.portfolio.external.is_empty() {
            return Err(config_error("portfolio", "no solvers configured"));
        }
        for id in &self.portfolio.builtin {
            id.parse::<BuiltinSolver>().map_err(|e| config_error("portfolio.builtin", e.to_string()))?;
        }
        for (k, ext) in self.portfolio.external.iter().enumerate() {
            let field = format!("portfolio.external[{k}]");
            if ext.id.is_empty() || ext.id.contains(char::is_whitespace) || ext.id.contains(',') {
                return Err(config_error(&field, "id must be non-empty without spaces or commas"));
            }
            self.external_solver(ext).map_err(|e| match e {
                PipelineError::Config { msg, .. } => config_error(&field, msg),
                other => other,
            })?;
        }
        let ids = self.solver_ids();
        let mut unique = ids.clone();
        unique.sort();
        unique.dedup();
        if unique.len() != ids.len() {
            return Err(config_error("portfolio", "duplicate solver ids"));
        }
        self.selector
            .input_space
            .parse::<crate::selector::InputSpace>()
            .map_err(|e| config_error("selector.input_space", e.to_string()))?;
        if self.selector.folds < 2 {
            return Err(config_error("selector.folds", "need at least 2 folds"));
        }
        let grid_ok = |g: &[f64]| !g.is_empty() && g.iter().all(|&v| positive(v));
        if !grid_ok(&self.selector.c_grid) {
            return Err(config_error("selector.c_grid", "values must be positive"));
        }
        if !grid_ok(&self.selector.gamma_grid) {
            return Err(config_error("selector.gamma_grid", "values must be positive"));
        }
        Ok(())
    }

    fn external_solver(&self, ext: &ExternalConfig) -> Result<ExternalSolver, PipelineError> {
        let dialect: OutputDialect =
            ext.dialect.parse().map_err(|e: crate::solvers::SolverError| config_error("dialect", e.to_string()))?;
        let format: Format =
            ext.format.parse().map_err(|e: crate::graph::GraphError| config_error("format", e.to_string()))?;
        ExternalSolver::new(ext.id.clone(), ext.command.clone(), dialect, format)
            .map_err(|e| config_error("command", e.to_string()))
    }

    pub fn solver_ids(&self) -> Vec<String> {
        self.portfolio.builtin.iter().cloned().chain(self.portfolio.external.iter().map(|e| e.id.clone())).collect()
    }

    /// Instantiate the portfolio.
    pub fn solvers(&self) -> Result<Vec<Box<dyn Solver>>, PipelineError> {
        let mut out: Vec<Box<dyn Solver>> = Vec::new();
        for id in &self.portfolio.builtin {
            let s: BuiltinSolver = id
                .parse()
                .map_err(|e: crate::solvers::SolverError| config_error("portfolio.builtin", e.to_string()))?;
            out.push(Box::new(s));
        }
        for ext in &self.portfolio.external {
            out.push(Box::new(self.external_solver(ext)?));
        }
        Ok(out)
    }

    /// Hash of every setting that can change a result. The output directory
    /// and the thread count are left out.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output.dir = PathBuf::new();
        canonical.run.jobs = 0;
        let text = toml::to_string(&canonical).unwrap_or_default();
        hex16(&Sha256::digest(text.as_bytes()))
    }
}

pub(crate) fn hex16(bytes: &[u8]) -> String {
    bytes.iter().take(8).map(|b| format!("{b:02x}")).collect()
}
