//! `mcpisa` command-line driver.
//!
//! With `--config` every stage subcommand runs that stage of the campaign
//! described by the file. Without it, `features`, `solve`, `bench`,
//! `isa-footprint` and `predict` work directly on files given as arguments.
//!
//! Exit codes: 0 success, 1 other failure, 2 configuration error,
//! 3 data error, 4 budget-wide failure.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use mcpisa::bench::{run_campaign, CampaignConfig, CorpusEntry, Journal, DEFAULT_TOLERANCE};
use mcpisa::features::{compute_features_with, read_features_csv, write_features_csv};
use mcpisa::graph::{generate, load_path, write_graph, Format, GraphKind};
use mcpisa::isa::ProjectionModel;
use mcpisa::pipeline::{Pipeline, PipelineError, Stage, FOOTPRINTS_CSV};
use mcpisa::selector::{InputSpace, SelectorModel};
use mcpisa::solvers::{export_ilp, BuiltinSolver, ExternalSolver, OutputDialect, Solver};
use mcpisa::Parallelism;

#[derive(Parser)]
#[command(name = "mcpisa", version, about = "Instance space analysis for maximum clique solvers")]
struct Cli {
    /// Campaign configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads; 0 uses every core. Overrides `run.jobs`.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Run every batch loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse the corpus and record sizes, connectivity and hashes.
    Ingest,
    /// Compute the 35 features.
    Features(FeaturesArgs),
    /// Run one solver on one graph.
    Solve(SolveArgs),
    /// Run every solver of a portfolio on every instance.
    Bench(BenchArgs),
    /// Select features and fit the 2-D projection.
    IsaFit,
    /// Project every instance.
    IsaProject,
    /// Compute solver footprints.
    IsaFootprint(FootprintArgs),
    /// Train the per-solver classifiers.
    Train,
    /// Rank the portfolio per instance.
    Predict(PredictArgs),
    /// Write the report CSV and SVG scatter.
    Report,
    /// Run every stage in order.
    Run,
    /// Write a synthetic graph.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct FeaturesArgs {
    /// Graph files (ignored with --config).
    graphs: Vec<PathBuf>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long, default_value_t = 120.0)]
    timeout_secs: f64,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    graph: PathBuf,
    /// exact, greedy, greedy-karp, fastwclq-like or external.
    #[arg(long, default_value = "exact")]
    solver: String,
    #[arg(long, default_value_t = 1800.0)]
    budget_secs: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    format: Option<String>,
    /// Command template for `--solver external`; must contain {instance}.
    #[arg(long)]
    command: Option<String>,
    #[arg(long, default_value = "generic")]
    dialect: String,
    /// Format the external binary reads.
    #[arg(long, default_value = "dimacs")]
    input_format: String,
    /// Also write the 0/1 integer program as an LP file.
    #[arg(long)]
    lp_out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Graph files (ignored with --config).
    graphs: Vec<PathBuf>,
    /// Comma-separated built-in solver ids.
    #[arg(long, value_delimiter = ',', default_value = "exact,greedy,fastwclq-like")]
    portfolio: Vec<String>,
    #[arg(long, default_value_t = 1800.0)]
    budget_secs: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[arg(long, default_value = "runs.csv")]
    journal: PathBuf,
}

#[derive(Args)]
struct FootprintArgs {
    /// Print only this solver's footprint.
    #[arg(long)]
    solver: Option<String>,
}

#[derive(Args)]
struct PredictArgs {
    /// Selector model (standalone mode).
    #[arg(long)]
    model: Option<PathBuf>,
    /// features.csv to rank (standalone mode).
    #[arg(long)]
    features: Option<PathBuf>,
    /// Projection model of the same campaign (standalone mode).
    #[arg(long)]
    projection: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    top: usize,
}

#[derive(Args)]
struct GenerateArgs {
    /// complete, cycle, path, star or gnp.
    #[arg(long, default_value = "gnp")]
    kind: String,
    #[arg(long)]
    nodes: usize,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "dimacs")]
    format: String,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<PipelineError>().map(PipelineError::exit_code).unwrap_or(1);
            ExitCode::from(code as u8)
        }
    }
}

fn parallelism(cli: &Cli) -> Parallelism {
    if cli.sequential {
        Parallelism::Sequential
    } else {
        Parallelism::Rayon
    }
}

fn pipeline(cli: &Cli) -> Result<Option<Pipeline>> {
    let Some(path) = &cli.config else { return Ok(None) };
    let mut config = mcpisa::pipeline::PipelineConfig::load(path)?;
    if let Some(jobs) = cli.jobs {
        config.run.jobs = jobs;
    }
    Ok(Some(Pipeline::new(config, parallelism(cli))?))
}

fn require_config(cli: &Cli, stage: Stage) -> Result<Pipeline> {
    match pipeline(cli)? {
        Some(p) => Ok(p),
        None => Err(PipelineError::Config {
            field: "--config".into(),
            msg: format!("the {stage} stage needs a campaign configuration"),
        }
        .into()),
    }
}

fn run_stage(p: &Pipeline, stage: Stage) -> Result<()> {
    let report = p.run_stage(stage)?;
    let note = if report.skipped { " (up to date)" } else { "" };
    println!("{stage}: {}{note}", report.message);
    Ok(())
}

fn config_error(field: &str, msg: impl std::fmt::Display) -> anyhow::Error {
    PipelineError::Config { field: field.into(), msg: msg.to_string() }.into()
}

fn parse_format(s: Option<&str>) -> Result<Option<Format>> {
    s.map(|f| f.parse::<Format>().map_err(|e| config_error("--format", e))).transpose()
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Ingest => run_stage(&require_config(&cli, Stage::Ingest)?, Stage::Ingest),
        Command::IsaFit => run_stage(&require_config(&cli, Stage::IsaFit)?, Stage::IsaFit),
        Command::IsaProject => run_stage(&require_config(&cli, Stage::IsaProject)?, Stage::IsaProject),
        Command::Train => run_stage(&require_config(&cli, Stage::Train)?, Stage::Train),
        Command::Report => run_stage(&require_config(&cli, Stage::Report)?, Stage::Report),
        Command::Run => {
            let p = require_config(&cli, Stage::Ingest)?;
            for stage in Stage::ALL {
                run_stage(&p, stage)?;
            }
            println!("artifacts in {}", p.out_dir().display());
            Ok(())
        }
        Command::Features(args) => match pipeline(&cli)? {
            Some(p) => run_stage(&p, Stage::Features),
            None => features(&cli, args),
        },
        Command::Bench(args) => match pipeline(&cli)? {
            Some(p) => run_stage(&p, Stage::Bench),
            None => bench(&cli, args),
        },
        Command::IsaFootprint(args) => {
            let p = require_config(&cli, Stage::IsaFootprint)?;
            match &args.solver {
                None => run_stage(&p, Stage::IsaFootprint),
                Some(id) => print_footprint(&p, id),
            }
        }
        Command::Predict(args) => match (&args.model, pipeline(&cli)?) {
            (None, Some(p)) => run_stage(&p, Stage::Predict),
            (Some(_), _) => predict(args),
            (None, None) => Err(config_error("--model", "give --config or --model with --features")),
        },
        Command::Solve(args) => solve(args),
        Command::Generate(args) => {
            let kind: GraphKind = args.kind.parse().map_err(|e| config_error("--kind", e))?;
            let format: Format = args.format.parse().map_err(|e| config_error("--format", e))?;
            let g = generate(kind, args.nodes, args.p, args.seed).map_err(|e| config_error("--nodes", e))?;
            let name = args.out.file_stem().and_then(|s| s.to_str()).unwrap_or("graph").to_string();
            let file = File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
            write_graph(&g.with_name(name), format, std::io::BufWriter::new(file))?;
            Ok(())
        }
    }
}

fn features(cli: &Cli, args: &FeaturesArgs) -> Result<()> {
    if args.graphs.is_empty() {
        return Err(config_error("graphs", "no graph files given"));
    }
    let format = parse_format(args.format.as_deref())?;
    if !(args.timeout_secs.is_finite() && args.timeout_secs > 0.0) {
        return Err(config_error("--timeout-secs", "must be positive"));
    }
    let timeout = Duration::from_secs_f64(args.timeout_secs);
    let par = parallelism(cli);
    let inner = if args.graphs.len() > 1 { Parallelism::Sequential } else { par };
    let results = par.with_jobs(cli.jobs.unwrap_or(0), || {
        par.map(&args.graphs, |path| {
            let g = load_path(path, format).map_err(|e| e.to_string())?.graph;
            compute_features_with(&g, timeout, inner).map_err(|e| e.to_string())
        })
    });
    let mut rows = Vec::new();
    for (path, r) in args.graphs.iter().zip(results) {
        match r {
            Ok(fv) => rows.push(fv),
            Err(e) => log::warn!("{}: {e}", path.display()),
        }
    }
    if rows.is_empty() {
        return Err(PipelineError::Data("no graph produced features".into()).into());
    }
    match &args.out {
        Some(out) => write_features_csv(File::create(out)?, &rows)?,
        None => write_features_csv(std::io::stdout().lock(), &rows)?,
    }
    Ok(())
}

fn solve(args: &SolveArgs) -> Result<()> {
    let format = parse_format(args.format.as_deref())?;
    if !(args.budget_secs.is_finite() && args.budget_secs > 0.0) {
        return Err(config_error("--budget-secs", "must be positive"));
    }
    let solver: Box<dyn Solver> = if args.solver == "external" {
        let command = args.command.clone().ok_or_else(|| config_error("--command", "required for external solvers"))?;
        let dialect: OutputDialect = args.dialect.parse().map_err(|e| config_error("--dialect", e))?;
        let input: Format = args.input_format.parse().map_err(|e| config_error("--input-format", e))?;
        Box::new(ExternalSolver::new("external", command, dialect, input).map_err(|e| config_error("--command", e))?)
    } else {
        Box::new(args.solver.parse::<BuiltinSolver>().map_err(|e| config_error("--solver", e))?)
    };
    let g = load_path(&args.graph, format)
        .map_err(|e| PipelineError::Data(format!("{}: {e}", args.graph.display())))?
        .graph;
    if let Some(lp) = &args.lp_out {
        export_ilp(&g).write_lp(File::create(lp)?)?;
    }
    let r = solver
        .solve(&g, Duration::from_secs_f64(args.budget_secs), args.seed)
        .map_err(|e| PipelineError::Data(e.to_string()))?;
    let clique: Vec<String> = r.clique.iter().map(|v| (v + 1).to_string()).collect();
    println!("instance,solver_id,clique_size,wall_seconds,proven_optimal,budget_exhausted,clique");
    println!(
        "{},{},{},{},{},{},{}",
        g.name(),
        r.solver_id,
        r.clique_size,
        r.wall_seconds,
        r.proven_optimal,
        r.budget_exhausted,
        clique.join(" ")
    );
    Ok(())
}

fn bench(cli: &Cli, args: &BenchArgs) -> Result<()> {
    if args.graphs.is_empty() {
        return Err(config_error("graphs", "no graph files given"));
    }
    if !(args.budget_secs.is_finite() && args.budget_secs > 0.0) {
        return Err(config_error("--budget-secs", "must be positive"));
    }
    let solvers = args
        .portfolio
        .iter()
        .map(|id| id.parse::<BuiltinSolver>().map_err(|e| config_error("--portfolio", e)))
        .collect::<Result<Vec<_>>>()?;
    let portfolio: Vec<&dyn Solver> = solvers.iter().map(|s| s as &dyn Solver).collect();
    let stamp = format!(
        "mcpisa {} bench portfolio={} budget={} seed={}",
        env!("CARGO_PKG_VERSION"),
        args.portfolio.join(","),
        args.budget_secs,
        args.seed
    );
    let journal = Journal::open(&args.journal, &stamp).map_err(|e| PipelineError::Data(e.to_string()))?;
    let corpus: Vec<CorpusEntry> = args.graphs.iter().cloned().map(CorpusEntry::Path).collect();
    let config = CampaignConfig {
        budget: Duration::from_secs_f64(args.budget_secs),
        jobs: cli.jobs.unwrap_or(0),
        seed: args.seed,
        parallelism: parallelism(cli),
        tolerance: args.tolerance,
    };
    let outcome =
        run_campaign(&corpus, &portfolio, &config, Some(&journal)).map_err(|e| PipelineError::Data(e.to_string()))?;
    let m = &outcome.matrix;
    println!("{} runs executed, {} resumed; journal {}", outcome.executed, outcome.resumed, args.journal.display());
    println!("solver_id,wins,good_rate");
    let rates = m.good_rates();
    for ((s, w), r) in m.solvers.iter().zip(m.win_counts()).zip(rates) {
        println!("{s},{w},{r}");
    }
    if m.instances.is_empty() {
        return Err(PipelineError::Budget("no solver succeeded on any instance".into()).into());
    }
    Ok(())
}

fn print_footprint(p: &Pipeline, solver: &str) -> Result<()> {
    let path = p.artifact(FOOTPRINTS_CSV);
    if !path.exists() {
        p.run_stage(Stage::IsaFootprint)?;
    }
    let text = std::fs::read_to_string(&path)?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap_or_default();
    let row = lines
        .find(|l| l.split(',').next() == Some(solver))
        .ok_or_else(|| config_error("--solver", format!("no footprint for {solver:?}")))?;
    println!("{header}\n{row}");
    Ok(())
}

fn predict(args: &PredictArgs) -> Result<()> {
    let model_path = args.model.as_deref().expect("checked by caller");
    let features_path = args.features.as_deref().ok_or_else(|| config_error("--features", "required with --model"))?;
    if args.top == 0 {
        return Err(config_error("--top", "must be at least 1"));
    }
    let model =
        SelectorModel::read(BufReader::new(open(model_path)?)).map_err(|e| PipelineError::Data(e.to_string()))?;
    let rows = read_features_csv(open(features_path)?).map_err(|e| PipelineError::Data(e.to_string()))?;
    // Both input spaces need the fitted normalization, so the projection
    // model is always required.
    let projection_path =
        args.projection.as_deref().ok_or_else(|| config_error("--projection", "required with --model"))?;
    let projection = ProjectionModel::read(BufReader::new(open(projection_path)?))
        .map_err(|e| PipelineError::Data(e.to_string()))?;
    let mut out = std::io::stdout().lock();
    let heads: Vec<String> = (1..=args.top).map(|k| format!("rank{k}")).collect();
    writeln!(out, "instance_id,{}", heads.join(","))?;
    for fv in &rows {
        let lookup = |n: &str| fv.by_name(n);
        let x = match model.input_space {
            InputSpace::Projected => projection.project(lookup).map(|(a, b)| vec![a, b]),
            InputSpace::Features => projection.normalization.apply_with(lookup),
        };
        let x = match x {
            Ok(x) => x,
            Err(e) => {
                log::warn!("skipping {}: {e}", fv.instance_id);
                continue;
            }
        };
        let ranking = model.predict(&x).map_err(|e| PipelineError::Data(e.to_string()))?;
        let top: Vec<&str> = ranking.iter().take(args.top).map(|(s, _)| s.as_str()).collect();
        writeln!(out, "{},{}", fv.instance_id, top.join(","))?;
    }
    Ok(())
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| PipelineError::Data(format!("{}: {e}", path.display())).into())
}
