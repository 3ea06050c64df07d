use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::{CliError, DataArgs, EvalArgs, EvolveArgs, ReportArgs, SearchArgs};
use crate::dataset::{load_manifest, split_train_test, BenchmarkDataset, DatasetError, ProblemMatrix, ViewLabel};
use crate::expr::{parse_expression_file, print_canonical, print_infix, ExprError, TreeGenConfig};
use crate::fitness::problem_tau;
use crate::gp::{evolve as run_gp, GenerationRecord, GpConfig, GpError, ProblemTaus, SearchResult};
use crate::nas_search::{aging_evolution, load_space, AgingParams, SearchError};
use crate::zoo::{
    evaluate_report, feature_frequency, proxy_from_expression, resolve_proxy, FeatureFrequency, NamedProxy,
    ReportFormat, ReportTable, ZooError,
};

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn dataset_err(e: DatasetError) -> CliError {
    match e {
        DatasetError::BadFraction { .. } => CliError::Usage(e.to_string()),
        other => runtime(other),
    }
}

fn gp_err(e: GpError) -> CliError {
    match e {
        GpError::Config(_) => CliError::Usage(e.to_string()),
        other => runtime(other),
    }
}

fn zoo_err(e: ZooError) -> CliError {
    match e {
        ZooError::Fitness { .. } => runtime(e),
        other => CliError::Usage(other.to_string()),
    }
}

fn search_err(e: SearchError) -> CliError {
    match e {
        SearchError::Params(_) | SearchError::Proxy { .. } => CliError::Usage(e.to_string()),
        other => runtime(other),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Runtime(format!("{}: {e}", path.display()))
}

fn out_err(e: std::io::Error) -> CliError {
    CliError::Runtime(format!("writing output: {e}"))
}

fn load(path: &Path) -> Result<BenchmarkDataset, CliError> {
    load_manifest(path).map_err(dataset_err)
}

fn view_matrices(dataset: &BenchmarkDataset, data: &DataArgs, view: ViewLabel) -> Result<Vec<ProblemMatrix>, CliError> {
    if view == ViewLabel::Full {
        return Ok(dataset.full_view().matrices());
    }
    let (train, test) = split_train_test(dataset, data.split, data.seed).map_err(dataset_err)?;
    Ok(match view {
        ViewLabel::Train => train.matrices(),
        _ => test.matrices(),
    })
}

fn problem_groups(dataset: &BenchmarkDataset) -> Vec<Option<String>> {
    dataset.problems().iter().map(|p| p.group.clone()).collect()
}

#[derive(Serialize)]
struct RunSummary {
    run: usize,
    seed: u64,
    expr: String,
    infix: String,
    train_score: f64,
    train_tau: ProblemTaus,
    test_tau: ProblemTaus,
    evaluations: usize,
}

#[derive(Serialize)]
struct Sidecar {
    split: f64,
    split_seed: u64,
    runs: Vec<RunSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    feature_frequency: Option<FeatureFrequency>,
}

#[derive(Serialize)]
struct RunLine<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    run: Option<usize>,
    #[serde(flatten)]
    record: &'a GenerationRecord,
}

fn sibling(path: &Path, name: &str) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.join(name),
        _ => PathBuf::from(name),
    }
}

pub fn evolve(a: &EvolveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.runs == 0 {
        return Err(CliError::Usage("--runs must be >= 1".into()));
    }
    if a.jobs == 0 {
        return Err(CliError::Usage("--jobs must be >= 1".into()));
    }
    let batch = a.runs > 1;
    let base = GpConfig {
        pop_size: a.pop,
        generations: a.gens,
        p_crossover: a.p_crossover,
        p_subtree_mut: a.p_subtree,
        p_hoist_mut: a.p_hoist,
        p_point_mut: a.p_point,
        tree_gen: TreeGenConfig {
            max_depth_init: a.max_depth_init,
            ..TreeGenConfig::default()
        },
        seed: a.data.seed,
        survival: a.survival.into(),
        jobs: if batch { 1 } else { a.jobs },
        ..GpConfig::default()
    };
    base.validate().map_err(gp_err)?;

    let dataset = load(&a.data.dataset)?;
    let names = dataset.feature_names();
    let (train, test) = split_train_test(&dataset, a.data.split, a.data.seed).map_err(dataset_err)?;
    let (train, test) = (train.matrices(), test.matrices());

    let seeds: Vec<u64> = (0..a.runs).map(|r| a.data.seed.wrapping_add(r as u64)).collect();
    let run_one = |&seed: &u64| {
        log::info!("run with seed {seed}");
        run_gp(&GpConfig { seed, ..base.clone() }, names, &train)
    };
    let results: Vec<SearchResult> = if batch && a.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(a.jobs)
            .build()
            .map_err(runtime)?;
        pool.install(|| seeds.par_iter().map(run_one).collect::<Result<_, _>>())
    } else {
        seeds.iter().map(run_one).collect::<Result<_, _>>()
    }
    .map_err(gp_err)?;

    let ids: Vec<String> = dataset.problem_ids().iter().map(|s| s.to_string()).collect();
    let mut summaries = Vec::with_capacity(results.len());
    let mut best_file = String::new();
    let mut log = String::new();
    for (r, (res, &seed)) in results.iter().zip(&seeds).enumerate() {
        let tree = &res.best.tree;
        let expr = print_canonical(tree, names);
        let test_tau = test
            .iter()
            .map(|m| problem_tau(tree.root(), m).map(|t| (m.problem_id.clone(), t)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(runtime)?;
        if batch {
            best_file.push_str(&format!("# run {r} seed {seed}\n"));
            writeln!(out, "run {r} (seed {seed}): {expr}").map_err(out_err)?;
        } else {
            writeln!(out, "best: {expr}").map_err(out_err)?;
        }
        best_file.push_str(&expr);
        best_file.push('\n');
        for (id, t) in &test_tau {
            writeln!(out, "  test tau {id:<16} {t:.4}").map_err(out_err)?;
        }
        for rec in &res.history {
            let line = RunLine {
                run: batch.then_some(r),
                record: rec,
            };
            log.push_str(&serde_json::to_string(&line).expect("record serializes"));
            log.push('\n');
        }
        summaries.push(RunSummary {
            run: r,
            seed,
            expr,
            infix: print_infix(tree.root(), names),
            train_score: res.best_score.0,
            train_tau: ProblemTaus(ids.iter().cloned().zip(res.best.raw_tau.0.iter().copied()).collect()),
            test_tau: ProblemTaus(test_tau),
            evaluations: res.evaluations,
        });
    }
    let frequency = batch.then(|| {
        let trees: Vec<_> = results.iter().map(|r| r.best.tree.clone()).collect();
        feature_frequency(&trees, names)
    });
    if let Some(f) = &frequency {
        writeln!(out, "feature frequency over {} runs:", a.runs).map_err(out_err)?;
        let mut counts = f.counts.clone();
        counts.sort_by(|x, y| y.1.cmp(&x.1).then_with(|| x.0.cmp(&y.0)));
        for (name, c) in counts.iter().filter(|c| c.1 > 0) {
            writeln!(out, "  {name:<16} {c}").map_err(out_err)?;
        }
    }
    let sidecar = Sidecar {
        split: a.data.split,
        split_seed: a.data.seed,
        runs: summaries,
        feature_frequency: frequency,
    };

    if let Some(dir) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let sidecar_path = PathBuf::from(format!("{}.json", a.out.display()));
    let log_path = sibling(&a.out, "run.jsonl");
    fs::write(&a.out, best_file).map_err(io_err(&a.out))?;
    let mut json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    json.push('\n');
    fs::write(&sidecar_path, json).map_err(io_err(&sidecar_path))?;
    fs::write(&log_path, log).map_err(io_err(&log_path))?;
    Ok(())
}

fn render(table: &ReportTable, format: ReportFormat, out: &mut dyn Write) -> Result<(), CliError> {
    out.write_all(table.render(format).as_bytes()).map_err(out_err)
}

pub fn eval(a: &EvalArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let dataset = load(&a.data.dataset)?;
    let names = dataset.feature_names();
    let text = fs::read_to_string(&a.expr_file).map_err(io_err(&a.expr_file))?;
    let lines = parse_expression_file(&text, names)
        .map_err(|e: ExprError| CliError::Usage(format!("{}: {e}", a.expr_file.display())))?;
    if lines.is_empty() {
        return Err(CliError::Usage(format!("{}: no expressions", a.expr_file.display())));
    }
    let mut proxies: Vec<NamedProxy> = Vec::new();
    for l in lines {
        let name = print_canonical(&l.tree, names);
        if proxies.iter().any(|p| p.name == name) {
            log::warn!("line {}: duplicate expression skipped", l.line);
            continue;
        }
        proxies.push(NamedProxy::tree(name, l.tree));
    }
    let matrices = view_matrices(&dataset, &a.data, a.view.into())?;
    let mut table = evaluate_report(&proxies, &matrices).map_err(zoo_err)?;
    table.groups = problem_groups(&dataset);
    // keep file order
    let order = |name: &str| proxies.iter().position(|p| p.name == name);
    table.rows.sort_by_key(|r| order(&r.name));
    render(&table, a.format.into(), out)
}

fn load_proxy(spec: &str, feature_names: &[String]) -> Result<NamedProxy, CliError> {
    let path = Path::new(spec);
    if !path.is_file() {
        return resolve_proxy(spec, feature_names).map_err(zoo_err);
    }
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let (line, expr) = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .find(|(_, l)| !l.is_empty())
        .ok_or_else(|| CliError::Usage(format!("{spec}: no expression")))?;
    let name = path.file_stem().map_or(spec.into(), |s| s.to_string_lossy().into_owned());
    proxy_from_expression(name, expr, feature_names)
        .map_err(|e| CliError::Usage(format!("{spec}: line {line}: {e}")))
}

pub fn search(a: &SearchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let params = AgingParams {
        population_size: a.pop,
        sample_size: a.sample,
        cycles: a.cycles,
        seed: a.seed,
    };
    params.validate().map_err(search_err)?;
    let space = load_space(&a.space).map_err(search_err)?;
    let proxy = load_proxy(&a.proxy, space.feature_names())?;
    let result = aging_evolution(&space, &proxy, &params).map_err(search_err)?;

    let mut log = String::new();
    for rec in &result.history {
        log.push_str(&serde_json::to_string(rec).expect("record serializes"));
        log.push('\n');
    }
    if let Some(dir) = a.log.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(&a.log, log).map_err(io_err(&a.log))?;

    writeln!(out, "best {}  {} {}", result.best, proxy.name, result.best_score).map_err(out_err)?;
    if let Some(t) = space.target(&result.best) {
        writeln!(out, "target {t}").map_err(out_err)?;
    }
    Ok(())
}

pub fn report(a: &ReportArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let dataset = load(&a.data.dataset)?;
    let names = dataset.feature_names();
    let mut requested: Vec<String> = Vec::new();
    for tok in a.proxies.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let expanded: Vec<String> = if tok == "all-baselines" {
            names.to_vec()
        } else {
            vec![tok.to_string()]
        };
        for name in expanded {
            if !requested.contains(&name) {
                requested.push(name);
            }
        }
    }
    let proxies = requested
        .iter()
        .map(|n| resolve_proxy(n, names))
        .collect::<Result<Vec<_>, _>>()
        .map_err(zoo_err)?;
    let matrices = view_matrices(&dataset, &a.data, a.view.into())?;
    let mut table = evaluate_report(&proxies, &matrices).map_err(zoo_err)?;
    table.groups = problem_groups(&dataset);
    render(&table, a.format.into(), out)
}
