//! End-to-end campaign driven by a [`PipelineConfig`].
//!
//! Stages read their inputs from, and write their outputs to, one output
//! directory. Every artifact starts with a `# mcpisa <version> config=<hash>
//! corpus=<hash>` line; a stage whose output already carries the current
//! stamp is skipped, and the solver journal resumes pair by pair.
//!
//! | stage           | reads                              | writes                                  |
//! |-----------------|------------------------------------|-----------------------------------------|
//! | `ingest`        | corpus files                       | `ingest.csv`                            |
//! | `features`      | `ingest.csv`                       | `features.csv`, `feature_failures.csv`  |
//! | `bench`         | `ingest.csv`                       | `runs.csv`, `performance.csv`           |
//! | `isa-fit`       | `features.csv`, `runs.csv`         | `projection.model`, `sifted.csv`        |
//! | `isa-project`   | `projection.model`, `features.csv` | `projection.csv`                        |
//! | `isa-footprint` | `projection.csv`, `runs.csv`       | `footprints.csv`                        |
//! | `train`         | `projection.csv` or `features.csv` | `selector.model`, `selector_cv.csv`     |
//! | `predict`       | `selector.model`                   | `predictions.csv`                       |
//! | `report`        | all of the above                   | `report.csv`, `report.svg`              |

mod artifacts;
mod config;
mod stages;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

pub use artifacts::{read_ingest, read_projection_csv, read_stamp, IngestRow, ProjectionRow};
pub use config::{
    BudgetConfig, CorpusConfig, ExternalConfig, OutputConfig, PipelineConfig, PortfolioConfig, ProjectionConfig,
    RunConfig, SelectorConfig, ThresholdConfig,
};
pub use stages::{resolve_corpus, StageReport};

use crate::Parallelism;

pub const INGEST_CSV: &str = "ingest.csv";
pub const FEATURES_CSV: &str = "features.csv";
pub const FEATURE_FAILURES_CSV: &str = "feature_failures.csv";
pub const RUNS_CSV: &str = "runs.csv";
pub const PERFORMANCE_CSV: &str = "performance.csv";
pub const PROJECTION_MODEL: &str = "projection.model";
pub const SIFTED_CSV: &str = "sifted.csv";
pub const PROJECTION_CSV: &str = "projection.csv";
pub const FOOTPRINTS_CSV: &str = "footprints.csv";
pub const SELECTOR_MODEL: &str = "selector.model";
pub const SELECTOR_CV_CSV: &str = "selector_cv.csv";
pub const PREDICTIONS_CSV: &str = "predictions.csv";
pub const REPORT_CSV: &str = "report.csv";
pub const REPORT_SVG: &str = "report.svg";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config error in {field}: {msg}")]
    Config { field: String, msg: String },
    #[error("{0}")]
    Data(String),
    #[error("{} is missing; run the {stage} stage first", path.display())]
    MissingArtifact { path: PathBuf, stage: Stage },
    #[error("{} was produced by {found:?}, expected {expected:?}; re-run the {stage} stage", path.display())]
    Stale { path: PathBuf, expected: String, found: String, stage: Stage },
    #[error("budget-wide failure: {0}")]
    Budget(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl PipelineError {
    /// Process exit code: 2 config, 3 data, 4 budget-wide failure, 1 other.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config { .. } => 2,
            PipelineError::Data(_) | PipelineError::MissingArtifact { .. } | PipelineError::Stale { .. } => 3,
            PipelineError::Budget(_) => 4,
            PipelineError::Io(_) => 1,
        }
    }
}

macro_rules! data_error_from {
    ($($t:ty),*) => {
        $(impl From<$t> for PipelineError {
            fn from(e: $t) -> Self {
                PipelineError::Data(e.to_string())
            }
        })*
    };
}

data_error_from!(
    crate::graph::GraphError,
    crate::features::FeatureError,
    crate::isa::IsaError,
    crate::selector::SelectorError,
    csv::Error
);

impl From<crate::bench::BenchError> for PipelineError {
    fn from(e: crate::bench::BenchError) -> Self {
        match e {
            crate::bench::BenchError::Io(e) => PipelineError::Io(e),
            other => PipelineError::Data(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    Ingest,
    Features,
    Bench,
    IsaFit,
    IsaProject,
    IsaFootprint,
    Train,
    Predict,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 9] = [
        Stage::Ingest,
        Stage::Features,
        Stage::Bench,
        Stage::IsaFit,
        Stage::IsaProject,
        Stage::IsaFootprint,
        Stage::Train,
        Stage::Predict,
        Stage::Report,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Features => "features",
            Stage::Bench => "bench",
            Stage::IsaFit => "isa-fit",
            Stage::IsaProject => "isa-project",
            Stage::IsaFootprint => "isa-footprint",
            Stage::Train => "train",
            Stage::Predict => "predict",
            Stage::Report => "report",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| PipelineError::Config { field: "stage".into(), msg: format!("unknown stage {s:?}") })
    }
}

/// A validated configuration bound to an output directory.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub config: PipelineConfig,
    pub parallelism: Parallelism,
    config_hash: String,
}

impl Pipeline {
    pub fn new(config: PipelineConfig, parallelism: Parallelism) -> Result<Self, PipelineError> {
        config.validate()?;
        let config_hash = config.hash();
        Ok(Pipeline { config, parallelism, config_hash })
    }

    pub fn from_file(path: &Path, parallelism: Parallelism) -> Result<Self, PipelineError> {
        Self::new(PipelineConfig::load(path)?, parallelism)
    }

    pub fn config_hash(&self) -> &str {
        &self.config_hash
    }

    pub fn out_dir(&self) -> &Path {
        &self.config.output.dir
    }

    pub fn artifact(&self, name: &str) -> PathBuf {
        self.out_dir().join(name)
    }

    pub fn stamp_for(&self, corpus_hash: &str) -> String {
        format!("mcpisa {} config={} corpus={corpus_hash}", env!("CARGO_PKG_VERSION"), self.config_hash)
    }

    /// Stamp of the current ingest, checked against this configuration.
    pub fn stamp(&self) -> Result<String, PipelineError> {
        let path = self.artifact(INGEST_CSV);
        let found =
            read_stamp(&path)?.ok_or(PipelineError::MissingArtifact { path: path.clone(), stage: Stage::Ingest })?;
        let prefix = self.stamp_for("");
        if !found.starts_with(&prefix) {
            return Err(PipelineError::Stale { path, expected: format!("{prefix}..."), found, stage: Stage::Ingest });
        }
        Ok(found)
    }

    /// Run `stages` in pipeline order.
    pub fn run_stages(&self, stages: &[Stage]) -> Result<Vec<StageReport>, PipelineError> {
        let mut ordered = stages.to_vec();
        ordered.sort();
        ordered.dedup();
        let mut reports = Vec::new();
        for stage in ordered {
            log::info!("stage {stage}");
            let report = self.run_stage(stage)?;
            log::info!("{stage}: {}", report.message);
            reports.push(report);
        }
        Ok(reports)
    }

    pub fn run_all(&self) -> Result<Vec<StageReport>, PipelineError> {
        self.run_stages(&Stage::ALL)
    }

    pub fn run_stage(&self, stage: Stage) -> Result<StageReport, PipelineError> {
        std::fs::create_dir_all(self.out_dir())?;
        match stage {
            Stage::Ingest => self.ingest(),
            Stage::Features => self.features(),
            Stage::Bench => self.bench(),
            Stage::IsaFit => self.isa_fit(),
            Stage::IsaProject => self.isa_project(),
            Stage::IsaFootprint => self.isa_footprint(),
            Stage::Train => self.train(),
            Stage::Predict => self.predict(),
            Stage::Report => self.report(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let cfg = PipelineError::Config { field: "x".into(), msg: "y".into() };
        assert_eq!(cfg.exit_code(), 2);
        assert_eq!(PipelineError::Data("d".into()).exit_code(), 3);
        assert_eq!(PipelineError::Budget("b".into()).exit_code(), 4);
        assert_eq!(PipelineError::Io(std::io::Error::other("x")).exit_code(), 1);
    }

    #[test]
    fn stage_names_round_trip() {
        for s in Stage::ALL {
            assert_eq!(s.as_str().parse::<Stage>().unwrap(), s);
        }
        assert!("fit".parse::<Stage>().is_err());
    }
}
