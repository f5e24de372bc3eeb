//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the verdict lines always reach the
//! output. The process fails if a criterion fails on its merits; a
//! criterion whose input data is not present on this machine is printed as
//! FAIL with the reason but does not fail the run.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use mcpisa::bench::{run_campaign, score_instance, CampaignConfig, CorpusEntry, PerformanceMatrix, RunRecord};
use mcpisa::features::{compute_features_with, spectral_features, Feature};
use mcpisa::graph::{generate, hamming, load_path, write_graph, Format, GraphKind};
use mcpisa::isa::{
    cloister_boundary, fit_instance_space, fit_normalization, footprint, polygon_area, read_matrix, sifted_select,
    Point, ProjectionModel,
};
use mcpisa::pipeline::{Pipeline, PipelineConfig, Stage};
use mcpisa::selector::{evaluate_topk, train, InputSpace, TrainOptions};
use mcpisa::solvers::{solve_exact_bb, solve_local_search_with, BuiltinSolver, LocalSearchParams, Solver};
use mcpisa::{Graph, Parallelism};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

enum Verdict {
    Pass(String),
    Fail(String),
    /// Required input data is absent from this machine.
    Unavailable(String),
}

use Verdict::{Fail, Pass, Unavailable};

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Pass(detail)
    } else {
        Fail(detail)
    }
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("exact solver matches enumeration oracle", c1_exact_oracle),
        ("composite performance fixture", c2_score_fixture),
        ("spectral fixtures and trace identities", c3_spectral),
        ("benchmark instances with local search", c4_benchmarks),
        ("published projection matrix", c5_projection),
        ("feature selection properties", c6_sifted),
        ("selector properties", c7_selector),
        ("footprint and boundary properties", c8_footprints),
        ("end-to-end pipeline smoke", c9_end_to_end),
    ];
    let mut failed = 0;
    let mut unavailable = 0;
    for (k, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Fail(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match verdict {
            Pass(d) => ("PASS", d),
            Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Unavailable(d) => {
                unavailable += 1;
                ("FAIL", format!("{d} [input data unavailable]"))
            }
        };
        println!("{tag} criterion {}: {title} | {detail} [{secs:.1}s]", k + 1);
    }
    println!(
        "acceptance: {} passed, {failed} failed, {unavailable} without input data",
        criteria.len() - failed - unavailable
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

// ---------------------------------------------------------------------------
// 1

/// Bron–Kerbosch with pivoting over `u32` neighbourhood masks.
fn bron_kerbosch(r: usize, mut p: u32, mut x: u32, adj: &[u32], best: &mut usize) {
    if p == 0 && x == 0 {
        *best = (*best).max(r);
        return;
    }
    let pivot = (0..adj.len()).filter(|&u| (p | x) >> u & 1 == 1).max_by_key(|&u| (p & adj[u]).count_ones()).unwrap();
    let mut candidates = p & !adj[pivot];
    while candidates != 0 {
        let v = candidates.trailing_zeros() as usize;
        candidates &= candidates - 1;
        bron_kerbosch(r + 1, p & adj[v], x & adj[v], adj, best);
        p &= !(1 << v);
        x |= 1 << v;
    }
}

fn oracle_clique_number(g: &Graph) -> usize {
    let n = g.node_count();
    let mut adj = vec![0u32; n];
    for &(u, v) in g.edges() {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    let mut best = 0;
    bron_kerbosch(0, (1u32 << n) - 1, 0, &adj, &mut best);
    best
}

fn c1_exact_oracle() -> Verdict {
    let start = Instant::now();
    let mut cases = Vec::new();
    for seed in 0..34u64 {
        for n in [10, 15, 20] {
            for p in [0.2, 0.5, 0.8] {
                if cases.len() < 300 {
                    cases.push((n, p, seed));
                }
            }
        }
    }
    let mut mismatches = Vec::new();
    for &(n, p, seed) in &cases {
        let g = generate(GraphKind::Gnp, n, p, seed).unwrap();
        let r = solve_exact_bb(&g, None);
        let want = oracle_clique_number(&g);
        if r.clique_size != want || !r.proven_optimal || !g.is_clique(&r.clique) {
            mismatches.push(format!("n={n} p={p} seed={seed}: {} vs {want}", r.clique_size));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        mismatches.is_empty() && secs < 120.0,
        format!("{} graphs, {} mismatches {:?}, {secs:.2}s (limit 120s)", cases.len(), mismatches.len(), mismatches),
    )
}

// ---------------------------------------------------------------------------
// 2

fn c2_score_fixture() -> Verdict {
    let y = score_instance(&[RunRecord::new("i", "a", 80, 80.0), RunRecord::new("i", "b", 100, 160.0)]).unwrap();
    check(y == [0.625, 1.0], format!("y = {y:?}, expected [0.625, 1.0]"))
}

// ---------------------------------------------------------------------------
// 3

fn c3_spectral() -> Verdict {
    let k3 = spectral_features(&generate(GraphKind::Complete, 3, 0.0, 0).unwrap()).unwrap();
    let c4 = spectral_features(&generate(GraphKind::Cycle, 4, 0.0, 0).unwrap()).unwrap();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9;
    let fixtures = close(k3.spectral_radius, 2.0)
        && close(k3.energy, 4.0)
        && close(k3.laplacian_spectral_radius, 3.0)
        && close(c4.even_closed_walk_proportion, 1.0);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_adj: f64 = 0.0;
    let mut worst_lap: f64 = 0.0;
    for seed in 0..100 {
        let n = rng.gen_range(5..=60);
        let p = rng.gen_range(0.05..0.95);
        let g = generate(GraphKind::Gnp, n, p, seed).unwrap();
        if g.edge_count() == 0 {
            continue;
        }
        let s = spectral_features(&g).unwrap();
        let sum: f64 = s.adjacency.iter().sum();
        let scale = s.adjacency.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        worst_adj = worst_adj.max(sum.abs() / scale);
        let two_m = 2.0 * g.edge_count() as f64;
        let lap: f64 = s.laplacian.iter().sum();
        worst_lap = worst_lap.max((lap - two_m).abs() / two_m);
    }
    check(
        fixtures && worst_adj <= 1e-6 && worst_lap <= 1e-6,
        format!(
            "K3 radius {:.12} energy {:.12} laplacian radius {:.12}; C4 even-walk {:.12}; worst relative trace error {worst_adj:.1e} (A), {worst_lap:.1e} (L)",
            k3.spectral_radius, k3.energy, k3.laplacian_spectral_radius, c4.even_closed_walk_proportion
        ),
    )
}

// ---------------------------------------------------------------------------
// 4

fn local_search_to(g: &Graph, target: usize, budget: Duration) -> (usize, f64) {
    let params = LocalSearchParams { target_size: Some(target), ..LocalSearchParams::default() };
    let r = solve_local_search_with(g, budget, 1, &params);
    assert!(g.is_clique(&r.clique));
    (r.clique_size, r.wall_seconds)
}

fn c4_benchmarks() -> Verdict {
    let budget = Duration::from_secs(60);
    let h = hamming(10, 2).unwrap();
    let (h_size, h_secs) = local_search_to(&h, 512, budget);
    let hamming_ok = h.node_count() == 1024 && h.edge_count() == 518_656 && h_size >= 512 && h_secs <= 60.0;
    let hamming_detail =
        format!("hamming10-2 ({} nodes, {} edges): clique {h_size} in {h_secs:.2}s", h.node_count(), h.edge_count());

    let path = std::env::var_os("MCPISA_BROCK200_1")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/brock200_1.clq"));
    if !path.exists() {
        let d = format!(
            "{hamming_detail} ({}); brock200_1 not found at {} (set MCPISA_BROCK200_1)",
            if hamming_ok { "ok" } else { "FAILED" },
            path.display()
        );
        return if hamming_ok { Unavailable(d) } else { Fail(d) };
    }
    let b = match load_path(&path, None) {
        Ok(r) => r.graph,
        Err(e) => return Fail(format!("{hamming_detail}; brock200_1: {e}")),
    };
    let parse_ok = b.node_count() == 200 && b.edge_count() == 14_834 && (b.density() - 0.7454).abs() <= 5e-5;
    let (b_size, b_secs) = local_search_to(&b, 21, budget);
    check(
        hamming_ok && parse_ok && b_size >= 19 && b_secs <= 60.0,
        format!(
            "{hamming_detail}; brock200_1 ({}, {}, density {:.5}): clique {b_size} in {b_secs:.2}s",
            b.node_count(),
            b.edge_count(),
            b.density()
        ),
    )
}

// ---------------------------------------------------------------------------
// 5

fn c5_projection() -> Verdict {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/projection_matrix.txt");
    let (names, matrix) = read_matrix(std::io::BufReader::new(std::fs::File::open(path).unwrap())).unwrap();
    let model = ProjectionModel::from_matrix(&names, matrix, None).unwrap();
    // Column sums of the printed matrix, added up by hand.
    let expected = (0.1719, 0.4110);
    let ones = model.project(|_| Some(1.0)).unwrap();
    let zero = model.project(|_| Some(0.0)).unwrap();
    check(
        (ones.0 - expected.0).abs() <= 1e-4 && (ones.1 - expected.1).abs() <= 1e-4 && zero == (0.0, 0.0),
        format!("ones -> ({:.6}, {:.6}), zero -> {zero:?}", ones.0, ones.1),
    )
}

// ---------------------------------------------------------------------------
// 6

fn normal_column(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let d = Normal::new(0.0, 1.0).unwrap();
    (0..n).map(|_| d.sample(rng)).collect()
}

fn c6_sifted() -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 300;
        let y: Vec<Vec<f64>> = (0..n).map(|_| (0..3).map(|_| rng.gen_range(0.0f64..1.0).exp()).collect()).collect();
        let ya: Vec<f64> = y.iter().map(|r| r[0]).collect();
        let mut shuffled = ya.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(1000 + seed));
        let mut names = vec!["y_copy".to_string(), "y_shuffled".to_string()];
        let mut columns = vec![ya.clone(), shuffled];
        for j in 0..3 {
            let noise = normal_column(&mut rng, n);
            columns.push(y.iter().zip(&noise).map(|(r, e)| r[1] + 0.02 * e).collect());
            names.push(format!("b{j}"));
        }
        for j in 0..5 {
            columns.push(normal_column(&mut rng, n));
            names.push(format!("noise{j}"));
        }
        let rows: Vec<Vec<f64>> = (0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
        let res = sifted_select(&names, &rows, &y, 0.8).unwrap();
        let has_copy = res.selected.iter().any(|s| s == "y_copy");
        let shuffled_rejected = !res.passed.iter().any(|s| s == "y_shuffled");

        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(2000 + seed));
        let rows_p: Vec<Vec<f64>> = order.iter().map(|&i| rows[i].clone()).collect();
        let y_p: Vec<Vec<f64>> = order.iter().map(|&i| y[i].clone()).collect();
        let res_p = sifted_select(&names, &rows_p, &y_p, 0.8).unwrap();
        let invariant = res_p.selected == res.selected;
        if !(has_copy && shuffled_rejected && invariant) {
            ok = false;
            notes.push(format!("seed {seed}: selected {:?}, permuted {:?}", res.selected, res_p.selected));
        }
    }

    // Corpus-sized timing run.
    let mut rng = ChaCha8Rng::seed_from_u64(6138);
    let (n, m) = (6138, 5);
    let y: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| rng.gen_range(0.0f64..2.0).exp()).collect()).collect();
    let mut columns = Vec::new();
    for j in 0..35 {
        let noise = normal_column(&mut rng, n);
        let col = if j < 15 { y.iter().zip(&noise).map(|(r, e)| r[j % m] + 0.1 * e).collect() } else { noise };
        columns.push(col);
    }
    let names: Vec<String> = Feature::ALL.iter().map(|f| f.name().to_string()).collect();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
    let start = Instant::now();
    let norm = fit_normalization(&names, &rows).unwrap();
    let normalized = norm.apply_rows(&names, &rows).unwrap();
    let big = sifted_select(&names, &normalized, &y, 0.8).unwrap();
    let secs = start.elapsed().as_secs_f64();
    check(
        ok && secs < 10.0,
        format!(
            "10 seeds: copy of y selected, shuffled copy rejected, order invariant{}; 6138x35 in {secs:.2}s ({} passed, {} selected, k = {})",
            if notes.is_empty() { String::new() } else { format!(" except {notes:?}") },
            big.passed.len(),
            big.selected.len(),
            big.k
        ),
    )
}

// ---------------------------------------------------------------------------
// 7

fn z_names() -> Vec<String> {
    vec!["z1".into(), "z2".into()]
}

fn best_of(labels: &[bool], solvers: &[String]) -> String {
    solvers[labels.iter().position(|&g| g).unwrap()].clone()
}

/// Accuracy of always predicting the most frequent training winner.
fn majority_baseline(train_best: &[String], test_best: &[String]) -> (String, f64) {
    let mut counts: std::collections::BTreeMap<&str, usize> = Default::default();
    for b in train_best {
        *counts.entry(b).or_default() += 1;
    }
    let majority = counts.iter().max_by_key(|(_, &c)| c).unwrap().0.to_string();
    let acc = test_best.iter().filter(|b| **b == majority).count() as f64 / test_best.len() as f64;
    (majority, acc)
}

/// Random connected G(n, p) graphs spanning easy to hard for the portfolio.
fn mixed_corpus(count: usize, seed: u64) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.gen_range(20..=200);
        let p = rng.gen_range(0.1..0.9);
        let g = generate(GraphKind::Gnp, n, p, rng.gen()).unwrap();
        if g.is_connected() {
            out.push(g.with_name(format!("m{:03}", out.len())));
        }
    }
    out
}

fn c7_selector() -> Verdict {
    let solvers = vec!["a".to_string(), "b".to_string()];
    let opts = TrainOptions::default();
    let d = Normal::new(0.0, 0.7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut cluster = |n: usize| -> (Vec<Vec<f64>>, Vec<Vec<bool>>) {
        let mut x = Vec::new();
        let mut l = Vec::new();
        for i in 0..n {
            let c = if i % 2 == 0 { -3.0 } else { 3.0 };
            x.push(vec![c + d.sample(&mut rng), c + d.sample(&mut rng)]);
            l.push(vec![i % 2 == 0, i % 2 == 1]);
        }
        (x, l)
    };
    let (x_train, l_train) = cluster(120);
    let (x_test, l_test) = cluster(100);
    let ids: Vec<String> = (0..x_test.len()).map(|i| format!("t{i}")).collect();
    let best_test: Vec<String> = l_test.iter().map(|l| best_of(l, &solvers)).collect();
    let (model, _) = train(&x_train, &l_train, &solvers, InputSpace::Projected, &z_names(), &opts).unwrap();
    let sep = evaluate_topk(&model, &ids, &x_test, &best_test, solvers.len()).unwrap();

    // Shuffled labels: nothing to learn, so accuracy should look like the
    // majority rule.
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let n = 600;
    let x: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)]).collect();
    let mut labels: Vec<Vec<bool>> = x.iter().map(|p| vec![p[0] > 0.0, p[0] <= 0.0]).collect();
    labels.shuffle(&mut rng);
    let (xs_train, xs_test) = x.split_at(200);
    let (ls_train, ls_test) = labels.split_at(200);
    let (model_s, _) = train(xs_train, ls_train, &solvers, InputSpace::Projected, &z_names(), &opts).unwrap();
    let train_best: Vec<String> = ls_train.iter().map(|l| best_of(l, &solvers)).collect();
    let test_best: Vec<String> = ls_test.iter().map(|l| best_of(l, &solvers)).collect();
    let ids_s: Vec<String> = (0..xs_test.len()).map(|i| format!("s{i}")).collect();
    let shuf = evaluate_topk(&model_s, &ids_s, xs_test, &test_best, solvers.len()).unwrap();
    let (_, base) = majority_baseline(&train_best, &test_best);
    let sigma = (base * (1.0 - base) / xs_test.len() as f64).sqrt();
    let shuffled_ok = (shuf.top1_accuracy - base).abs() <= 3.0 * sigma;

    let e2e = held_out_protocol();
    let (e2e_ok, e2e_detail) = match &e2e {
        Ok((top1, top2, base, n_test)) => (
            *top1 > *base && *base < 1.0,
            format!("held-out split ({n_test} test graphs): top-1 {top1:.3}, top-2 {top2:.3}, majority {base:.3}"),
        ),
        Err(e) => (false, format!("held-out split failed: {e}")),
    };
    check(
        sep.top1_accuracy == 1.0 && sep.topk_accuracy == 1.0 && shuf.topk_accuracy == 1.0 && shuffled_ok && e2e_ok,
        format!(
            "separable top-1 {:.3}; shuffled top-1 {:.3} vs majority {base:.3} (3 sigma = {:.3}); top-{} {:.3}/{:.3}; {e2e_detail}",
            sep.top1_accuracy,
            shuf.top1_accuracy,
            3.0 * sigma,
            solvers.len(),
            sep.topk_accuracy,
            shuf.topk_accuracy
        ),
    )
}

/// Benchmark a synthetic corpus with the built-in portfolio, fit the space
/// and selector on a training split and score the held-out part.
fn held_out_protocol() -> Result<(f64, f64, f64, usize), String> {
    let graphs = mixed_corpus(60, 70);
    let portfolio_owned: Vec<BuiltinSolver> =
        ["exact", "greedy", "fastwclq-like"].iter().map(|s| s.parse().unwrap()).collect();
    let portfolio: Vec<&dyn Solver> = portfolio_owned.iter().map(|s| s as &dyn Solver).collect();
    let entries: Vec<CorpusEntry> = graphs.iter().cloned().map(CorpusEntry::Graph).collect();
    let config = CampaignConfig { budget: Duration::from_millis(300), seed: 7, ..CampaignConfig::default() };
    let outcome = run_campaign(&entries, &portfolio, &config, None).map_err(|e| e.to_string())?;
    let matrix: &PerformanceMatrix = &outcome.matrix;
    let features = Parallelism::default().map(&graphs, |g| {
        compute_features_with(g, Duration::from_secs(60), Parallelism::Sequential).map_err(|e| e.to_string())
    });

    let mut order: Vec<usize> = (0..graphs.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(71));
    let (train_idx, test_idx) = order.split_at(40);
    let names: Vec<String> = Feature::ALL.iter().map(|f| f.name().to_string()).collect();
    let gather = |idx: &[usize]| {
        let mut raw = Vec::new();
        let mut y = Vec::new();
        let mut good = Vec::new();
        let mut best = Vec::new();
        let mut ids = Vec::new();
        for &k in idx {
            let (Ok(fv), Some(i)) = (&features[k], matrix.instance_index(graphs[k].name())) else { continue };
            raw.push(fv.values().to_vec());
            y.push(matrix.y[i].clone());
            good.push(matrix.good[i].clone());
            best.push(matrix.best_solver(i).to_string());
            ids.push(graphs[k].name().to_string());
        }
        (raw, y, good, best, ids)
    };
    let (raw_tr, y_tr, good_tr, best_tr, _) = gather(train_idx);
    let (raw_te, _, _, best_te, ids_te) = gather(test_idx);
    let space = fit_instance_space(&names, &raw_tr, &y_tr, 0.8).map_err(|e| e.to_string())?;
    let project = |raw: &[Vec<f64>]| -> Result<Vec<Vec<f64>>, String> {
        raw.iter()
            .map(|r| {
                let z =
                    space.model.project(|n| Feature::from_name(n).map(|f| r[f.index()])).map_err(|e| e.to_string())?;
                Ok(vec![z.0, z.1])
            })
            .collect()
    };
    let z_tr = project(&raw_tr)?;
    let z_te = project(&raw_te)?;
    let (model, _) =
        train(&z_tr, &good_tr, &matrix.solvers, InputSpace::Projected, &z_names(), &TrainOptions::default())
            .map_err(|e| e.to_string())?;
    let report = evaluate_topk(&model, &ids_te, &z_te, &best_te, 2).map_err(|e| e.to_string())?;
    let (_, base) = majority_baseline(&best_tr, &best_te);
    Ok((report.top1_accuracy, report.top2_accuracy, base, ids_te.len()))
}

// ---------------------------------------------------------------------------
// 8

fn orient(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Gift wrapping, counter-clockwise, collinear points skipped.
fn jarvis_hull(points: &[Point]) -> Vec<Point> {
    let start = *points.iter().min_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1]))).unwrap();
    let mut hull = vec![start];
    let mut current = start;
    loop {
        let mut next = if points[0] == current { points[1] } else { points[0] };
        for &q in points {
            if q == current {
                continue;
            }
            let o = orient(current, next, q);
            let farther = {
                let d = |p: Point| (p[0] - current[0]).powi(2) + (p[1] - current[1]).powi(2);
                d(q) > d(next)
            };
            if o < 0.0 || (o == 0.0 && farther) {
                next = q;
            }
        }
        if next == start {
            break;
        }
        hull.push(next);
        current = next;
    }
    hull
}

/// Even-odd ray casting; hull vertices count as inside.
fn inside_oracle(poly: &[Point], p: Point) -> bool {
    if poly.contains(&p) {
        return true;
    }
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn same_polygon(a: &[Point], b: &[Point]) -> bool {
    let key = |p: &Point| (p[0].to_bits(), p[1].to_bits());
    let mut a: Vec<_> = a.iter().map(key).collect();
    let mut b: Vec<_> = b.iter().map(key).collect();
    a.sort();
    b.sort();
    a == b
}

fn c8_footprints() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let d = Normal::new(0.0, 1.0).unwrap();
    let points: Vec<Point> = (0..1000).map(|_| [d.sample(&mut rng), d.sample(&mut rng)]).collect();
    let labels: Vec<[bool; 3]> =
        points.iter().map(|p| [p[0] > 0.3, p[0] * p[0] + p[1] * p[1] < 1.0, rng.gen_bool(0.3)]).collect();

    let boundary = cloister_boundary(&points).unwrap();
    let oracle_boundary = jarvis_hull(&points);
    let boundary_area = polygon_area(&boundary);
    let all_inside = points.iter().all(|&p| inside_oracle(&oracle_boundary, p));
    let mut ok = same_polygon(&boundary, &oracle_boundary) && all_inside;
    let mut notes = Vec::new();
    for s in 0..3 {
        let good: Vec<bool> = labels.iter().map(|l| l[s]).collect();
        let fp = footprint(&format!("s{s}"), &points, &good).unwrap();
        let good_points: Vec<Point> = points.iter().zip(&good).filter(|(_, &g)| g).map(|(p, _)| *p).collect();
        let hull = jarvis_hull(&good_points);
        let (mut enclosed, mut enclosed_good) = (0usize, 0usize);
        for (p, &g) in points.iter().zip(&good) {
            if inside_oracle(&hull, *p) {
                enclosed += 1;
                enclosed_good += usize::from(g);
            }
        }
        let purity = enclosed_good as f64 / enclosed as f64;
        let this_ok = same_polygon(&fp.polygon, &hull)
            && fp.enclosed_count == enclosed
            && fp.purity == purity
            && fp.area <= boundary_area;
        ok &= this_ok;
        notes.push(format!("s{s}: area {:.3}, purity {:.4} (oracle {:.4})", fp.area, fp.purity, purity));
    }
    check(ok, format!("1000 points, boundary area {boundary_area:.3}, all inside: {all_inside}; {}", notes.join("; ")))
}

// ---------------------------------------------------------------------------
// 9

fn c9_end_to_end() -> Verdict {
    let root = tempfile::tempdir().unwrap();
    let corpus = root.path().join("corpus");
    std::fs::create_dir(&corpus).unwrap();
    for g in mixed_corpus(50, 90) {
        let file = std::fs::File::create(corpus.join(format!("{}.clq", g.name()))).unwrap();
        write_graph(&g, Format::DimacsClq, file).unwrap();
    }
    let text = r#"
[corpus]
paths = ["corpus/*.clq"]

[portfolio]
builtin = ["exact", "greedy", "fastwclq-like"]

[budgets]
solver_secs = 0.5
feature_secs = 60

[output]
dir = "out"
"#;
    let mut config = PipelineConfig::from_toml(text).unwrap();
    config.resolve_relative_to(root.path());
    let pipeline = Pipeline::new(config, Parallelism::default()).unwrap();

    let start = Instant::now();
    let first = match pipeline.run_all() {
        Ok(r) => r,
        Err(e) => return Fail(format!("pipeline failed: {e}")),
    };
    let secs = start.elapsed().as_secs_f64();
    let executed = |reports: &[mcpisa::pipeline::StageReport]| {
        reports.iter().find(|r| r.stage == Stage::Bench).map(|r| r.executed).unwrap_or(usize::MAX)
    };
    let header = std::fs::read_to_string(pipeline.artifact("features.csv"))
        .unwrap_or_default()
        .lines()
        .find(|l| !l.starts_with('#'))
        .map(|l| l.split(',').count())
        .unwrap_or(0);
    let svg = std::fs::read_to_string(pipeline.artifact("report.svg")).unwrap_or_default();
    let files_ok = ["runs.csv", "projection.model", "selector.model", "predictions.csv"]
        .iter()
        .all(|f| pipeline.artifact(f).exists());
    let second = match pipeline.run_all() {
        Ok(r) => r,
        Err(e) => return Fail(format!("re-run failed: {e}")),
    };
    check(
        secs < 300.0 && header == 36 && files_ok && svg.starts_with("<svg") && executed(&first) == 150 && executed(&second) == 0,
        format!(
            "50 graphs x 3 solvers in {secs:.1}s (limit 300s); features.csv has {header} columns; {} runs then {} on re-run",
            executed(&first),
            executed(&second)
        ),
    )
}
