use std::path::Path;

use mcpisa::graph::{generate, write_graph, Format, GraphKind};
use mcpisa::pipeline::{
    read_projection_csv, read_stamp, Pipeline, PipelineConfig, PipelineError, Stage, FEATURES_CSV, PREDICTIONS_CSV,
    PROJECTION_CSV, REPORT_SVG, RUNS_CSV, SELECTOR_MODEL,
};
use mcpisa::Parallelism;

fn write_corpus(dir: &Path, count: usize) {
    std::fs::create_dir_all(dir).unwrap();
    let mut written = 0;
    let mut seed = 0;
    while written < count {
        let n = 20 + (seed as usize * 37) % 110;
        let p = 0.15 + 0.7 * ((seed as f64 * 0.37).fract());
        seed += 1;
        let g = generate(GraphKind::Gnp, n, p, seed).unwrap();
        if !g.is_connected() {
            continue;
        }
        let file = std::fs::File::create(dir.join(format!("g{written:03}.clq"))).unwrap();
        write_graph(&g, Format::DimacsClq, file).unwrap();
        written += 1;
    }
    // One unreadable file must be skipped, not fatal.
    std::fs::write(dir.join("broken.clq"), "p edge x y\n").unwrap();
}

fn config(root: &Path, seed: u64) -> PipelineConfig {
    let text = format!(
        r#"
[corpus]
paths = ["corpus/*.clq"]

[portfolio]
builtin = ["exact", "greedy", "fastwclq-like"]

[budgets]
solver_secs = 0.05
feature_secs = 30

[output]
dir = "out"

[run]
seed = {seed}
"#
    );
    let mut c = PipelineConfig::from_toml(&text).unwrap();
    c.resolve_relative_to(root);
    c
}

#[test]
fn full_run_then_idempotent_rerun() {
    let root = tempfile::tempdir().unwrap();
    write_corpus(&root.path().join("corpus"), 16);
    let pipeline = Pipeline::new(config(root.path(), 0), Parallelism::default()).unwrap();

    let first = pipeline.run_all().unwrap();
    assert_eq!(first.len(), Stage::ALL.len());
    let bench = first.iter().find(|r| r.stage == Stage::Bench).unwrap();
    assert_eq!(bench.executed, 16 * 3);
    for name in [FEATURES_CSV, RUNS_CSV, PROJECTION_CSV, SELECTOR_MODEL, PREDICTIONS_CSV, REPORT_SVG] {
        assert!(pipeline.artifact(name).exists(), "{name} missing");
    }
    let projection = read_projection_csv(&pipeline.artifact(PROJECTION_CSV)).unwrap();
    assert_eq!(projection.len(), 16);
    assert!(projection.iter().all(|r| r.z1.is_finite() && r.z2.is_finite() && !r.best_solver.is_empty()));

    let second = pipeline.run_all().unwrap();
    let stage = |s: Stage| second.iter().find(|r| r.stage == s).unwrap();
    assert_eq!(stage(Stage::Bench).executed, 0);
    assert!(stage(Stage::Features).skipped);
}

#[test]
fn config_change_invalidates_downstream_artifacts() {
    let root = tempfile::tempdir().unwrap();
    write_corpus(&root.path().join("corpus"), 12);
    let a = Pipeline::new(config(root.path(), 0), Parallelism::Sequential).unwrap();
    a.run_stages(&[Stage::Ingest, Stage::Features, Stage::Bench]).unwrap();
    let old = read_stamp(&a.artifact(RUNS_CSV)).unwrap().unwrap();

    let b = Pipeline::new(config(root.path(), 7), Parallelism::Sequential).unwrap();
    assert_ne!(a.config_hash(), b.config_hash());
    // Old ingest belongs to another configuration.
    assert!(matches!(b.run_stage(Stage::Features), Err(PipelineError::Stale { .. })));
    b.run_stage(Stage::Ingest).unwrap();
    // Features from the old run are stale for the new one.
    assert!(matches!(b.run_stage(Stage::IsaFit), Err(PipelineError::Stale { .. })));
    let report = b.run_stage(Stage::Bench).unwrap();
    assert_eq!(report.executed, 12 * 3);
    assert!(b.artifact("runs.csv.stale").exists());
    assert_ne!(read_stamp(&b.artifact(RUNS_CSV)).unwrap().unwrap(), old);
}

#[test]
fn missing_inputs_are_data_errors() {
    let root = tempfile::tempdir().unwrap();
    write_corpus(&root.path().join("corpus"), 3);
    let p = Pipeline::new(config(root.path(), 0), Parallelism::Sequential).unwrap();
    let err = p.run_stage(Stage::Train).unwrap_err();
    assert_eq!(err.exit_code(), 3);
    p.run_stage(Stage::Ingest).unwrap();
    let err = p.run_stage(Stage::IsaFit).unwrap_err();
    assert!(matches!(err, PipelineError::MissingArtifact { stage: Stage::Features, .. }), "{err}");
}
