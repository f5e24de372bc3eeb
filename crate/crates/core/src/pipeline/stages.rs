use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::artifacts::{read_csv, write_atomic, write_stamped_csv};
use super::config::hex16;
use super::{
    read_ingest, read_projection_csv, read_stamp, IngestRow, Pipeline, PipelineError, ProjectionRow, Stage,
    FEATURES_CSV, FEATURE_FAILURES_CSV, FOOTPRINTS_CSV, INGEST_CSV, PERFORMANCE_CSV, PREDICTIONS_CSV, PROJECTION_CSV,
    PROJECTION_MODEL, REPORT_CSV, REPORT_SVG, RUNS_CSV, SELECTOR_CV_CSV, SELECTOR_MODEL, SIFTED_CSV,
};
use crate::bench::{read_journal, run_campaign, CampaignConfig, CorpusEntry, Journal, PerformanceMatrix};
use crate::features::{
    compute_features_with, read_features_csv, write_features_csv, Feature, FeatureError, FeatureVector,
};
use crate::graph::{load_path, Format, Graph};
use crate::isa::{
    cloister_boundary, fit_instance_space, fit_normalization, fmt17, footprint, polygon_area, read_matrix, render_svg,
    Point, ProjectionModel,
};
use crate::selector::{train, InputSpace, SelectorModel, TrainOptions};
use crate::solvers::Solver;
use crate::Parallelism;

/// What a stage did.
#[derive(Debug, Clone, PartialEq)]
pub struct StageReport {
    pub stage: Stage,
    /// Units of work performed (instances, solver runs, ...).
    pub executed: usize,
    /// `true` when existing output was reused untouched.
    pub skipped: bool,
    pub message: String,
}

impl StageReport {
    fn new(stage: Stage, executed: usize, message: String) -> Self {
        StageReport { stage, executed, skipped: false, message }
    }

    fn skipped(stage: Stage, message: String) -> Self {
        StageReport { stage, executed: 0, skipped: true, message }
    }
}

/// Expand files, directories and glob patterns into a sorted, deduplicated
/// file list.
pub fn resolve_corpus(patterns: &[String]) -> Result<Vec<PathBuf>, PipelineError> {
    let mut files = Vec::new();
    for pattern in patterns {
        let p = Path::new(pattern);
        if p.is_dir() {
            for entry in std::fs::read_dir(p)? {
                let path = entry?.path();
                if path.is_file() {
                    files.push(path);
                }
            }
            continue;
        }
        let matches = glob::glob(pattern)
            .map_err(|e| PipelineError::Config { field: "corpus.paths".into(), msg: format!("{pattern:?}: {e}") })?;
        let before = files.len();
        for m in matches {
            let path = m.map_err(|e| PipelineError::Io(e.into()))?;
            if path.is_file() {
                files.push(path);
            }
        }
        if files.len() == before {
            log::warn!("corpus pattern {pattern:?} matched no files");
        }
    }
    files.sort();
    files.dedup();
    Ok(files)
}

fn graph_hash(g: &Graph) -> String {
    let mut h = Sha256::new();
    h.update((g.node_count() as u64).to_le_bytes());
    for &(u, v) in g.edges() {
        h.update((u as u64).to_le_bytes());
        h.update((v as u64).to_le_bytes());
    }
    hex16(&h.finalize())
}

#[derive(Serialize)]
struct FailureRow<'a> {
    instance_id: &'a str,
    reason: String,
}

#[derive(Serialize)]
struct PerformanceRow<'a> {
    instance_id: &'a str,
    solver_id: &'a str,
    y: f64,
    good: bool,
    best: bool,
}

#[derive(Serialize)]
struct SiftedRow<'a> {
    feature: &'a str,
    max_abs_correlation: f64,
    passed: bool,
    selected: bool,
}

#[derive(Serialize)]
struct FootprintRow<'a> {
    solver_id: &'a str,
    area: f64,
    boundary_area: f64,
    density: f64,
    purity: f64,
    good_count: usize,
    enclosed_count: usize,
    polygon: String,
}

#[derive(Serialize)]
struct CvRow<'a> {
    solver_id: &'a str,
    c: f64,
    gamma: f64,
    mean_f1: f64,
    chosen: bool,
}

#[derive(Serialize, serde::Deserialize)]
struct PredictionCsvRow {
    instance_id: String,
    predicted_best: String,
    second_best: String,
    actual_best: String,
    in_top1: bool,
    in_top2: bool,
    ranking: String,
}

#[derive(Serialize)]
struct ReportRow<'a> {
    instance_id: &'a str,
    z1: f64,
    z2: f64,
    best_solver: &'a str,
    predicted_best: &'a str,
}

impl Pipeline {
    fn format_override(&self) -> Option<Format> {
        self.config.corpus.format.as_deref().and_then(|f| f.parse().ok())
    }

    fn jobs(&self) -> usize {
        self.config.run.jobs
    }

    fn ok_instances(&self) -> Result<Vec<IngestRow>, PipelineError> {
        self.stamp()?;
        Ok(read_ingest(&self.artifact(INGEST_CSV))?.into_iter().filter(IngestRow::is_ok).collect())
    }

    /// Check that an existing artifact carries the current stamp.
    fn check_stamp(&self, name: &str, stage: Stage, stamp: &str) -> Result<PathBuf, PipelineError> {
        let path = self.artifact(name);
        let found = read_stamp(&path)?.ok_or(PipelineError::MissingArtifact { path: path.clone(), stage })?;
        if found != stamp {
            return Err(PipelineError::Stale { path, expected: stamp.to_string(), found, stage });
        }
        Ok(path)
    }

    pub(super) fn ingest(&self) -> Result<StageReport, PipelineError> {
        let files = resolve_corpus(&self.config.corpus.paths)?;
        if files.is_empty() {
            return Err(PipelineError::Config { field: "corpus.paths".into(), msg: "no files matched".into() });
        }
        let format = self.format_override();
        let rows: Vec<IngestRow> = self.parallelism.with_jobs(self.jobs(), || {
            self.parallelism.map(&files, |path| {
                let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or("graph").to_string();
                let display = path.to_string_lossy().into_owned();
                match load_path(path, format) {
                    Ok(r) => IngestRow {
                        instance_id: id,
                        path: display,
                        format: r.format.as_str().to_string(),
                        nodes: r.graph.node_count(),
                        edges: r.graph.edge_count(),
                        density: r.graph.density(),
                        connected: r.connected,
                        status: "ok".into(),
                        detail: graph_hash(&r.graph),
                        warnings: r.warnings.join("; "),
                    },
                    Err(e) => IngestRow {
                        instance_id: id,
                        path: display,
                        format: format.map(|f| f.as_str()).unwrap_or("").to_string(),
                        nodes: 0,
                        edges: 0,
                        density: 0.0,
                        connected: false,
                        status: "error".into(),
                        detail: e.to_string(),
                        warnings: String::new(),
                    },
                }
            })
        });
        let mut seen: HashMap<&str, &str> = HashMap::new();
        for r in rows.iter().filter(|r| r.is_ok()) {
            if let Some(other) = seen.insert(&r.instance_id, &r.path) {
                return Err(PipelineError::Data(format!(
                    "instance id {:?} is used by both {other} and {}",
                    r.instance_id, r.path
                )));
            }
        }
        let ok: Vec<&IngestRow> = rows.iter().filter(|r| r.is_ok()).collect();
        for r in rows.iter().filter(|r| !r.is_ok()) {
            log::warn!("skipping {}: {}", r.path, r.detail);
        }
        if ok.is_empty() {
            return Err(PipelineError::Data("no corpus file could be parsed".into()));
        }
        let mut hasher = Sha256::new();
        let mut sorted = ok.clone();
        sorted.sort_by(|a, b| a.instance_id.cmp(&b.instance_id));
        for r in &sorted {
            hasher.update(r.instance_id.as_bytes());
            hasher.update([0]);
            hasher.update(r.detail.as_bytes());
            hasher.update(b"\n");
        }
        let stamp = self.stamp_for(&hex16(&hasher.finalize()));
        write_stamped_csv(&self.artifact(INGEST_CSV), &stamp, &rows)?;
        let disconnected = ok.iter().filter(|r| !r.connected).count();
        Ok(StageReport::new(
            Stage::Ingest,
            rows.len(),
            format!(
                "{} files, {} loaded, {} failed, {} disconnected",
                rows.len(),
                ok.len(),
                rows.len() - ok.len(),
                disconnected
            ),
        ))
    }

    pub(super) fn features(&self) -> Result<StageReport, PipelineError> {
        let stamp = self.stamp()?;
        let out = self.artifact(FEATURES_CSV);
        if read_stamp(&out)?.as_deref() == Some(stamp.as_str()) {
            return Ok(StageReport::skipped(Stage::Features, "features.csv is up to date".into()));
        }
        let rows = self.ok_instances()?;
        let timeout = Duration::from_secs_f64(self.config.budgets.feature_secs);
        let format = self.format_override();
        // Instances run in parallel; a lone instance parallelizes internally.
        let inner = if rows.len() > 1 { Parallelism::Sequential } else { self.parallelism };
        let results: Vec<Result<FeatureVector, (bool, String)>> = self.parallelism.with_jobs(self.jobs(), || {
            self.parallelism.map(&rows, |r| {
                let g = load_path(Path::new(&r.path), format).map_err(|e| (false, e.to_string()))?.graph;
                compute_features_with(&g, timeout, inner)
                    .map_err(|e| (matches!(e, FeatureError::Timeout { .. }), e.to_string()))
            })
        });
        let mut vectors = Vec::new();
        let mut failures = Vec::new();
        let mut timeouts = 0;
        for (r, res) in rows.iter().zip(results) {
            match res {
                Ok(fv) => vectors.push(fv),
                Err((timed_out, reason)) => {
                    timeouts += timed_out as usize;
                    log::warn!("no features for {}: {reason}", r.instance_id);
                    failures.push(FailureRow { instance_id: &r.instance_id, reason });
                }
            }
        }
        if vectors.is_empty() {
            let msg = format!("no instance produced features ({timeouts} timed out)");
            return Err(if timeouts == failures.len() && timeouts > 0 {
                PipelineError::Budget(msg)
            } else {
                PipelineError::Data(msg)
            });
        }
        write_stamped_csv(&self.artifact(FEATURE_FAILURES_CSV), &stamp, &failures)?;
        write_atomic(&out, |w| {
            writeln!(w, "# {stamp}")?;
            write_features_csv(w, &vectors)?;
            Ok(())
        })?;
        Ok(StageReport::new(
            Stage::Features,
            rows.len(),
            format!("{} feature vectors, {} failures", vectors.len(), failures.len()),
        ))
    }

    pub(super) fn bench(&self) -> Result<StageReport, PipelineError> {
        let stamp = self.stamp()?;
        let rows = self.ok_instances()?;
        let path = self.artifact(RUNS_CSV);
        if let Some(old) = read_stamp(&path)? {
            if old != stamp {
                let aside = self.artifact(&format!("{RUNS_CSV}.stale"));
                log::warn!("{} belongs to another configuration; moving it to {}", path.display(), aside.display());
                std::fs::rename(&path, &aside)?;
            }
        }
        let journal = Journal::open(&path, &stamp)?;
        let format = self.format_override();
        let corpus: Vec<CorpusEntry> = rows
            .iter()
            .map(|r| match format {
                Some(f) => CorpusEntry::Typed(PathBuf::from(&r.path), f),
                None => CorpusEntry::Path(PathBuf::from(&r.path)),
            })
            .collect();
        let solvers = self.config.solvers()?;
        let portfolio: Vec<&dyn Solver> = solvers.iter().map(|s| s.as_ref()).collect();
        let campaign = CampaignConfig {
            budget: Duration::from_secs_f64(self.config.budgets.solver_secs),
            jobs: self.jobs(),
            seed: self.config.run.seed,
            parallelism: self.parallelism,
            tolerance: self.config.thresholds.tolerance,
        };
        let outcome = run_campaign(&corpus, &portfolio, &campaign, Some(&journal))?;
        let matrix = &outcome.matrix;
        if matrix.instances.is_empty() {
            return Err(PipelineError::Budget("no solver succeeded on any instance".into()));
        }
        let mut perf = Vec::new();
        for (i, inst) in matrix.instances.iter().enumerate() {
            for (a, s) in matrix.solvers.iter().enumerate() {
                perf.push(PerformanceRow {
                    instance_id: inst,
                    solver_id: s,
                    y: matrix.y[i][a],
                    good: matrix.good[i][a],
                    best: matrix.best[i] == a,
                });
            }
        }
        write_stamped_csv(&self.artifact(PERFORMANCE_CSV), &stamp, &perf)?;
        let failed = outcome.records.iter().filter(|r| !r.status.is_scored()).count();
        let message = format!(
            "{} runs executed, {} resumed, {} failed, {} instances scored, {} skipped",
            outcome.executed,
            outcome.resumed,
            failed,
            matrix.instances.len(),
            matrix.skipped.len()
        );
        let report = StageReport::new(Stage::Bench, outcome.executed, message);
        if outcome.resumed > 0 && outcome.executed == 0 {
            return Ok(StageReport { skipped: true, ..report });
        }
        Ok(report)
    }

    /// Performance matrix rebuilt from the journal.
    pub fn load_matrix(&self) -> Result<PerformanceMatrix, PipelineError> {
        let stamp = self.stamp()?;
        let path = self.check_stamp(RUNS_CSV, Stage::Bench, &stamp)?;
        let records = read_journal(&path)?;
        Ok(PerformanceMatrix::from_records(&records, self.config.thresholds.tolerance)?)
    }

    pub fn load_features(&self) -> Result<Vec<FeatureVector>, PipelineError> {
        let stamp = self.stamp()?;
        let path = self.check_stamp(FEATURES_CSV, Stage::Features, &stamp)?;
        Ok(read_features_csv(std::fs::File::open(path)?)?)
    }

    pub fn load_projection(&self) -> Result<ProjectionModel, PipelineError> {
        let stamp = self.stamp()?;
        let path = self.check_stamp(PROJECTION_MODEL, Stage::IsaFit, &stamp)?;
        Ok(ProjectionModel::read(std::io::BufReader::new(std::fs::File::open(path)?))?)
    }

    pub fn load_selector(&self) -> Result<SelectorModel, PipelineError> {
        let stamp = self.stamp()?;
        let path = self.check_stamp(SELECTOR_MODEL, Stage::Train, &stamp)?;
        Ok(SelectorModel::read(std::io::BufReader::new(std::fs::File::open(path)?))?)
    }

    pub(super) fn isa_fit(&self) -> Result<StageReport, PipelineError> {
        let stamp = self.stamp()?;
        let features = self.load_features()?;
        let matrix = self.load_matrix()?;
        let aligned: Vec<(&FeatureVector, usize)> =
            features.iter().filter_map(|fv| matrix.instance_index(&fv.instance_id).map(|i| (fv, i))).collect();
        if aligned.len() < 3 {
            return Err(PipelineError::Data(format!(
                "only {} instances have both features and solver runs; need 3",
                aligned.len()
            )));
        }
        let names: Vec<String> = Feature::ALL.iter().map(|f| f.name().to_string()).collect();
        let raw: Vec<Vec<f64>> = aligned.iter().map(|(fv, _)| fv.values().to_vec()).collect();
        let y: Vec<Vec<f64>> = aligned.iter().map(|&(_, i)| matrix.y[i].clone()).collect();
        let (model, message) = if let Some(matrix_path) = &self.config.projection.matrix {
            let norm = fit_normalization(&names, &raw)?;
            let (selected, weights) = read_matrix(std::io::BufReader::new(std::fs::File::open(matrix_path)?))?;
            let restricted = norm.restrict(&selected)?;
            let model = ProjectionModel::from_matrix(&selected, weights, Some(restricted))?;
            (model, format!("loaded a {}-feature projection matrix", selected.len()))
        } else {
            let space = fit_instance_space(&names, &raw, &y, self.config.thresholds.correlation)?;
            let sifted = &space.sifted;
            let sifted_rows: Vec<SiftedRow> = space
                .candidates
                .iter()
                .enumerate()
                .map(|(j, k)| SiftedRow {
                    feature: k,
                    max_abs_correlation: sifted.max_abs_correlation[j],
                    passed: sifted.passed.contains(k),
                    selected: sifted.selected.contains(k),
                })
                .collect();
            write_stamped_csv(&self.artifact(SIFTED_CSV), &stamp, &sifted_rows)?;
            let msg = format!(
                "selected {} of {} features at threshold {} (k = {}, silhouette {:.3})",
                sifted.selected.len(),
                space.candidates.len(),
                space.threshold,
                sifted.k,
                sifted.silhouette
            );
            (space.model, msg)
        };
        write_atomic(&self.artifact(PROJECTION_MODEL), |w| Ok(model.write(w, &stamp)?))?;
        Ok(StageReport::new(Stage::IsaFit, aligned.len(), message))
    }

    pub(super) fn isa_project(&self) -> Result<StageReport, PipelineError> {
        let stamp = self.stamp()?;
        let model = self.load_projection()?;
        let features = self.load_features()?;
        let matrix = self.load_matrix().ok();
        let mut rows = Vec::new();
        for fv in &features {
            match model.project(|name| fv.by_name(name)) {
                Ok((z1, z2)) => {
                    let best_solver = matrix
                        .as_ref()
                        .and_then(|m| m.instance_index(&fv.instance_id).map(|i| m.best_solver(i).to_string()))
                        .unwrap_or_default();
                    rows.push(ProjectionRow { instance_id: fv.instance_id.clone(), z1, z2, best_solver });
                }
                Err(e) => log::warn!("cannot project {}: {e}", fv.instance_id),
            }
        }
        if rows.is_empty() {
            return Err(PipelineError::Data("no instance could be projected".into()));
        }
        write_stamped_csv(&self.artifact(PROJECTION_CSV), &stamp, &rows)?;
        Ok(StageReport::new(Stage::IsaProject, rows.len(), format!("projected {} instances", rows.len())))
    }

    fn load_projection_rows(&self) -> Result<Vec<ProjectionRow>, PipelineError> {
        let stamp = self.stamp()?;
        let path = self.check_stamp(PROJECTION_CSV, Stage::IsaProject, &stamp)?;
        read_projection_csv(&path)
    }

    pub(super) fn isa_footprint(&self) -> Result<StageReport, PipelineError> {
        let stamp = self.stamp()?;
        let rows = self.load_projection_rows()?;
        let matrix = self.load_matrix()?;
        let mut points: Vec<Point> = Vec::new();
        let mut good_rows: Vec<&Vec<bool>> = Vec::new();
        for r in &rows {
            if let Some(i) = matrix.instance_index(&r.instance_id) {
                points.push([r.z1, r.z2]);
                good_rows.push(&matrix.good[i]);
            }
        }
        let boundary = cloister_boundary(&points)?;
        let boundary_area = polygon_area(&boundary);
        let mut out = Vec::new();
        let mut footprints = Vec::new();
        for (a, s) in matrix.solvers.iter().enumerate() {
            let good: Vec<bool> = good_rows.iter().map(|g| g[a]).collect();
            footprints.push((s, footprint(s, &points, &good)?));
        }
        for (s, fp) in &footprints {
            out.push(FootprintRow {
                solver_id: s,
                area: fp.area,
                boundary_area,
                density: fp.density,
                purity: fp.purity,
                good_count: fp.good_count,
                enclosed_count: fp.enclosed_count,
                polygon: fp
                    .polygon
                    .iter()
                    .map(|p| format!("{} {}", fmt17(p[0]), fmt17(p[1])))
                    .collect::<Vec<_>>()
                    .join(";"),
            });
        }
        write_stamped_csv(&self.artifact(FOOTPRINTS_CSV), &stamp, &out)?;
        let summary: Vec<String> =
            footprints.iter().map(|(s, fp)| format!("{s}: area {:.3}, purity {:.2}", fp.area, fp.purity)).collect();
        Ok(StageReport::new(
            Stage::IsaFootprint,
            footprints.len(),
            format!("boundary area {boundary_area:.3}; {}", summary.join(", ")),
        ))
    }

    /// Classifier inputs per instance id for the configured input space.
    fn selector_inputs(&self, space: InputSpace) -> Result<(Vec<String>, BTreeMap<String, Vec<f64>>), PipelineError> {
        match space {
            InputSpace::Projected => {
                let rows = self.load_projection_rows()?;
                let map = rows.into_iter().map(|r| (r.instance_id, vec![r.z1, r.z2])).collect();
                Ok((vec!["z1".into(), "z2".into()], map))
            }
            InputSpace::Features => {
                let model = self.load_projection()?;
                let features = self.load_features()?;
                let mut map = BTreeMap::new();
                for fv in &features {
                    match model.normalization.apply_with(|n| fv.by_name(n)) {
                        Ok(x) => {
                            map.insert(fv.instance_id.clone(), x);
                        }
                        Err(e) => log::warn!("no selector input for {}: {e}", fv.instance_id),
                    }
                }
                Ok((model.selected.clone(), map))
            }
        }
    }

    fn input_space(&self) -> Result<InputSpace, PipelineError> {
        self.config.selector.input_space.parse().map_err(|e: crate::selector::SelectorError| PipelineError::Config {
            field: "selector.input_space".into(),
            msg: e.to_string(),
        })
    }

    pub(super) fn train(&self) -> Result<StageReport, PipelineError> {
        let stamp = self.stamp()?;
        let space = self.input_space()?;
        let (names, inputs) = self.selector_inputs(space)?;
        let matrix = self.load_matrix()?;
        let mut x = Vec::new();
        let mut labels = Vec::new();
        for (i, inst) in matrix.instances.iter().enumerate() {
            if let Some(v) = inputs.get(inst) {
                x.push(v.clone());
                labels.push(matrix.good[i].clone());
            }
        }
        let options = TrainOptions {
            c_grid: self.config.selector.c_grid.clone(),
            gamma_grid: self.config.selector.gamma_grid.clone(),
            folds: self.config.selector.folds,
            seed: self.config.run.seed,
            parallelism: self.parallelism,
        };
        let (mut model, report) =
            self.parallelism.with_jobs(self.jobs(), || train(&x, &labels, &matrix.solvers, space, &names, &options))?;
        model.meta.corpus_hash = stamp.rsplit("corpus=").next().unwrap_or_default().to_string();
        let mut cv = Vec::new();
        for s in &report.per_solver {
            for &(c, gamma, mean_f1) in &s.scores {
                cv.push(CvRow { solver_id: &s.solver_id, c, gamma, mean_f1, chosen: s.chosen == Some((c, gamma)) });
            }
        }
        write_stamped_csv(&self.artifact(SELECTOR_CV_CSV), &stamp, &cv)?;
        write_atomic(&self.artifact(SELECTOR_MODEL), |w| Ok(model.write(w, &stamp)?))?;
        let constant = report.per_solver.iter().filter(|s| s.chosen.is_none()).count();
        Ok(StageReport::new(
            Stage::Train,
            x.len(),
            format!(
                "trained on {} instances, {} SVM and {constant} constant classifiers",
                x.len(),
                report.per_solver.len() - constant
            ),
        ))
    }

    pub(super) fn predict(&self) -> Result<StageReport, PipelineError> {
        let stamp = self.stamp()?;
        let model = self.load_selector()?;
        let (_, inputs) = self.selector_inputs(model.input_space)?;
        let matrix = self.load_matrix().ok();
        let mut rows = Vec::new();
        let (mut top1, mut top2, mut scored) = (0usize, 0usize, 0usize);
        for (id, x) in &inputs {
            let ranking = model.predict(x)?;
            let actual = matrix
                .as_ref()
                .and_then(|m| m.instance_index(id).map(|i| m.best_solver(i).to_string()))
                .unwrap_or_default();
            let in_top = |k: usize| !actual.is_empty() && ranking.iter().take(k).any(|(s, _)| *s == actual);
            if !actual.is_empty() {
                scored += 1;
                top1 += in_top(1) as usize;
                top2 += in_top(2) as usize;
            }
            rows.push(PredictionCsvRow {
                instance_id: id.clone(),
                predicted_best: ranking[0].0.clone(),
                second_best: ranking.get(1).map(|r| r.0.clone()).unwrap_or_default(),
                in_top1: in_top(1),
                in_top2: in_top(2),
                actual_best: actual,
                ranking: ranking.iter().map(|(s, d)| format!("{s}:{}", fmt17(*d))).collect::<Vec<_>>().join(";"),
            });
        }
        write_stamped_csv(&self.artifact(PREDICTIONS_CSV), &stamp, &rows)?;
        let acc = |hits: usize| if scored > 0 { hits as f64 / scored as f64 } else { f64::NAN };
        Ok(StageReport::new(
            Stage::Predict,
            rows.len(),
            format!("ranked {} instances; in-sample top-1 {:.3}, top-2 {:.3}", rows.len(), acc(top1), acc(top2)),
        ))
    }

    pub(super) fn report(&self) -> Result<StageReport, PipelineError> {
        let stamp = self.stamp()?;
        // Every artifact present must come from the same run.
        for (name, stage) in [
            (FEATURES_CSV, Stage::Features),
            (RUNS_CSV, Stage::Bench),
            (PROJECTION_MODEL, Stage::IsaFit),
            (PROJECTION_CSV, Stage::IsaProject),
            (FOOTPRINTS_CSV, Stage::IsaFootprint),
            (SELECTOR_MODEL, Stage::Train),
            (PREDICTIONS_CSV, Stage::Predict),
        ] {
            let path = self.artifact(name);
            if let Some(found) = read_stamp(&path)? {
                if found != stamp {
                    return Err(PipelineError::Data(format!(
                        "refusing to report mixed inputs: {} was produced by {found:?}, current run is {stamp:?}; re-run the {stage} stage",
                        path.display()
                    )));
                }
            }
        }
        let rows = self.load_projection_rows()?;
        let predictions: HashMap<String, String> = if self.artifact(PREDICTIONS_CSV).exists() {
            read_csv::<PredictionCsvRow>(&self.artifact(PREDICTIONS_CSV))?
                .into_iter()
                .map(|r| (r.instance_id, r.predicted_best))
                .collect()
        } else {
            HashMap::new()
        };
        let report: Vec<ReportRow> = rows
            .iter()
            .map(|r| ReportRow {
                instance_id: &r.instance_id,
                z1: r.z1,
                z2: r.z2,
                best_solver: &r.best_solver,
                predicted_best: predictions.get(&r.instance_id).map(String::as_str).unwrap_or(""),
            })
            .collect();
        write_stamped_csv(&self.artifact(REPORT_CSV), &stamp, &report)?;

        let mut classes: Vec<String> = rows.iter().map(|r| r.best_solver.clone()).collect();
        classes.sort();
        classes.dedup();
        let points: Vec<Point> = rows.iter().map(|r| [r.z1, r.z2]).collect();
        let labels: Vec<usize> = rows.iter().map(|r| classes.binary_search(&r.best_solver).unwrap_or(0)).collect();
        let legend: Vec<String> =
            classes.iter().map(|c| if c.is_empty() { "(not benchmarked)".to_string() } else { c.clone() }).collect();
        let boundary = cloister_boundary(&points).unwrap_or_default();
        let svg = render_svg("Instance space: best solver", &points, &labels, &legend, &boundary);
        write_atomic(&self.artifact(REPORT_SVG), |w| Ok(w.write_all(svg.as_bytes())?))?;
        Ok(StageReport::new(Stage::Report, rows.len(), format!("wrote {} and {}", REPORT_CSV, REPORT_SVG)))
    }
}
