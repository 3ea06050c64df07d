//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! fails. Criterion 9 needs exported benchmark tables; point
//! `ZC_SUITE_MANIFEST` at their manifest to run it, otherwise it is skipped.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zc_evolve::dataset::{load_manifest, split_train_test};
use zc_evolve::expr::{evaluate, parse, print_canonical, ExpressionTree, Node};
use zc_evolve::fitness::{kendall_tau, normalized_score, problem_tau, ScoreBounds, TauVector};
use zc_evolve::gp::{evolve, evolve_observed, GpConfig, Individual};
use zc_evolve::nas_search::{
    aging_evolution, all_scores, exhaustive_argmax, load_space, AgingParams, DEFAULT_ENUMERATION_CAP,
};
use zc_evolve::zoo::{builtin_proxy, evaluate_report, resolve_proxy, EQ2_NAME};

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

/// Straight pair counting, tau-b.
fn tau_b_pairs(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let (mut concordant, mut discordant, mut tie_x, mut tie_y) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            if dx == 0.0 {
                tie_x += 1;
            }
            if dy == 0.0 {
                tie_y += 1;
            }
            if dx != 0.0 && dy != 0.0 {
                if (dx > 0.0) == (dy > 0.0) {
                    concordant += 1;
                } else {
                    discordant += 1;
                }
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as i64;
    let denom = (((n0 - tie_x) * (n0 - tie_y)) as f64).sqrt();
    if denom == 0.0 {
        0.0
    } else {
        (concordant - discordant) as f64 / denom
    }
}

fn criterion_1() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let trials = 1000;
    for _ in 0..trials {
        let n = rng.gen_range(2..=50);
        let levels = rng.gen_range(1..=n);
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..n).map(|_| rng.gen_range(0..levels) as f64 * 0.5 - 3.0).collect()
        };
        let x = draw(&mut rng);
        let y = if rng.gen_bool(0.5) {
            draw(&mut rng)
        } else {
            (0..n).map(|_| rng.gen::<f64>()).collect()
        };
        let fast = kendall_tau(&x, &y).expect("valid input");
        worst = worst.max((fast - tau_b_pairs(&x, &y)).abs());
    }
    let elapsed = started.elapsed();
    verdict(
        worst <= 1e-12 && elapsed < Duration::from_secs(5),
        format!("{trials} tie-bearing vectors, max |diff| {worst:.2e}, {elapsed:.2?}"),
    )
}

fn criterion_2() -> Outcome {
    let mut bounds = ScoreBounds::empty(3);
    bounds.update(&TauVector(vec![0.0; 3]));
    bounds.update(&TauVector(vec![1.0; 3]));
    let top = normalized_score(&TauVector(vec![1.0; 3]), &bounds).expect("bounds set").0;
    let bottom = normalized_score(&TauVector(vec![0.0; 3]), &bounds).expect("bounds set").0;

    let mut runner = TestRunner::new(Config {
        cases: 512,
        failure_persistence: None,
        ..Config::default()
    });
    let strategy = (prop::collection::vec(0.0f64..1.0, 3), 0usize..3, 0.001f64..=1.0);
    let monotone = runner.run(&strategy, |(tau, k, step)| {
        let mut raised = tau.clone();
        raised[k] += step * (1.0 - raised[k]);
        prop_assume!(raised[k] > tau[k]);
        let before = normalized_score(&TauVector(tau), &bounds).unwrap().0;
        let after = normalized_score(&TauVector(raised), &bounds).unwrap().0;
        prop_assert!(after > before);
        Ok(())
    });
    verdict(
        top == 3.0 && bottom == 0.0 && monotone.is_ok(),
        format!("score(1,1,1) = {top}, score(0,0,0) = {bottom}, monotonicity {:?}", monotone.map(|_| "ok")),
    )
}

fn criterion_3() -> Outcome {
    let names: Vec<String> = zc_evolve::zoo::BASELINE_FEATURES.iter().map(|s| s.to_string()).collect();
    let proxy = builtin_proxy(EQ2_NAME, &names).expect("registry proxy");
    let row: Vec<f64> = names
        .iter()
        .map(|n| if n == "flops" { std::f64::consts::E } else { 1.0 })
        .collect();
    let tree = ExpressionTree::new(proxy.node(), names.len()).expect("valid tree");
    let v = evaluate(&tree, &row).expect("row width matches");
    verdict((v - 0.1).abs() <= 1e-12, format!("value {v:?}"))
}

fn structurally_valid(node: &Node, names: &[String]) -> bool {
    let Ok(tree) = ExpressionTree::new(node.clone(), names.len()) else {
        return false;
    };
    // the parser rejects numeric atoms, so a round trip proves no constants
    parse(&print_canonical(&tree, names), names).as_ref() == Ok(&tree)
}

/// Criteria 4 and 5 share one full-size run.
fn criteria_4_and_5() -> (Outcome, Outcome) {
    let dataset = load_manifest(fixtures().join("planted/manifest.json")).expect("fixture loads");
    let names = dataset.feature_names();
    let (train, test) = split_train_test(&dataset, 0.7, 0).expect("fixture splits");
    let config = GpConfig::default();

    let mut checked = 0usize;
    let mut invalid = 0usize;
    let mut orphans = 0usize;
    let started = Instant::now();
    let result = evolve_observed(&config, names, &train.matrices(), |ev| {
        let pool: Vec<&Individual> = ev.parents.iter().chain(ev.offspring).collect();
        for ind in ev.parents.iter().chain(ev.offspring).chain(ev.survivors) {
            checked += 1;
            invalid += usize::from(!structurally_valid(ind.tree.root(), names));
        }
        for s in ev.survivors {
            orphans += usize::from(!pool.iter().any(|p| p.tree == s.tree));
        }
    })
    .expect("evolve runs");
    let elapsed = started.elapsed();

    let taus: Vec<(String, f64)> = test
        .matrices()
        .iter()
        .map(|m| (m.problem_id.clone(), problem_tau(result.best.tree.root(), m).expect("evaluates")))
        .collect();
    let c4 = verdict(
        taus.iter().all(|(_, t)| *t >= 0.95) && elapsed <= Duration::from_secs(120),
        format!(
            "test tau {} in {elapsed:.1?}; best {}",
            taus.iter().map(|(id, t)| format!("{id}={t:.4}")).collect::<Vec<_>>().join(" "),
            print_canonical(&result.best.tree, names)
        ),
    );

    let budget = config.pop_size * (config.generations + 1);
    let c5 = verdict(
        invalid == 0 && orphans == 0 && result.evaluations <= budget,
        format!(
            "{checked} individuals checked, {invalid} invalid, {orphans} survivors without provenance, \
             {} evaluations (budget {budget})",
            result.evaluations
        ),
    );
    (c4, c5)
}

fn criterion_6() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_zc-evolve");
    let dir = tempfile::tempdir().expect("temp dir");
    let manifest = fixtures().join("planted/manifest.json");
    let run = |tag: &str, jobs: usize| -> Option<(Vec<u8>, Vec<u8>)> {
        let out = dir.path().join(tag).join("best.expr");
        let status = Command::new(bin)
            .args(["evolve", "--seed", "3", "--pop", "100", "--gens", "15", "--jobs"])
            .arg(jobs.to_string())
            .arg("--dataset")
            .arg(&manifest)
            .arg("--out")
            .arg(&out)
            .output()
            .ok()?;
        if !status.status.success() {
            return None;
        }
        Some((std::fs::read(&out).ok()?, std::fs::read(out.with_file_name("run.jsonl")).ok()?))
    };
    let outputs = [run("a1", 1), run("b1", 1), run("a8", 8), run("b8", 8)];
    let ok = outputs.iter().all(Option::is_some) && outputs.windows(2).all(|w| w[0] == w[1]);
    verdict(
        ok,
        format!(
            "best.expr and run.jsonl across 2x --jobs 1 and 2x --jobs 8: {}",
            if ok { "byte-identical" } else { "differ or failed" }
        ),
    )
}

fn criterion_7() -> Outcome {
    let dataset = load_manifest(fixtures().join("planted/manifest.json")).expect("fixture loads");
    let (train, _) = split_train_test(&dataset, 0.7, 0).expect("fixture splits");
    let matrices = train.matrices();
    let mut violations = Vec::new();
    for seed in 0..10 {
        let config = GpConfig {
            seed,
            pop_size: 60,
            generations: 50,
            freeze_bounds: true,
            ..GpConfig::default()
        };
        let r = evolve(&config, dataset.feature_names(), &matrices).expect("evolve runs");
        if r.history.windows(2).any(|w| w[1].best_score < w[0].best_score) {
            violations.push(seed);
        }
    }
    verdict(
        violations.is_empty(),
        format!("10 seeds (pop 60, 50 generations), decreasing best score in seeds {violations:?}"),
    )
}

fn criterion_8() -> Outcome {
    const PINNED: &str = "3-3-3-3-2-2";
    let space = load_space(fixtures().join("toy_space/space.json")).expect("fixture space loads");
    let proxy = builtin_proxy(EQ2_NAME, space.feature_names()).expect("registry proxy");
    let started = Instant::now();
    let (argmax, top) = exhaustive_argmax(&space, &proxy, DEFAULT_ENUMERATION_CAP).expect("enumerates");
    let elapsed = started.elapsed();
    let scores = all_scores(&space, &proxy).expect("scores");
    let allowed = scores.len() / 100;
    let mut hits = 0;
    for seed in 0..20 {
        let params = AgingParams {
            population_size: 50,
            sample_size: 10,
            cycles: 2000,
            seed,
        };
        let r = aging_evolution(&space, &proxy, &params).expect("search runs");
        let better = scores.iter().filter(|s| **s > r.best_score).count();
        hits += usize::from(better <= allowed && r.best_score <= top);
    }
    verdict(
        hits >= 18 && elapsed < Duration::from_secs(1) && argmax.to_string() == PINNED,
        format!("{hits}/20 seeds in the top 1%; argmax {argmax} (pinned {PINNED}) score {top:.6}; enumeration {elapsed:.2?}"),
    )
}

const PUBLISHED_TAUS: [(&str, f64); 3] = [("nb101-cf10", 0.61), ("nb201-cf10", 0.76), ("nb301-cf10", 0.40)];

fn criterion_9() -> Outcome {
    let Some(path) = std::env::var_os("ZC_SUITE_MANIFEST") else {
        return Outcome::Skip("set ZC_SUITE_MANIFEST to an exported suite manifest to run".into());
    };
    let dataset = match load_manifest(&path) {
        Ok(d) => d,
        Err(e) => return Outcome::Fail(format!("cannot load {}: {e}", Path::new(&path).display())),
    };
    let names = dataset.feature_names();
    let mut proxies: Vec<_> = match names.iter().map(|n| resolve_proxy(n, names)).collect() {
        Ok(p) => p,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    match builtin_proxy(EQ2_NAME, names) {
        Ok(p) => proxies.push(p),
        Err(e) => return Outcome::Fail(e.to_string()),
    }
    let matrices = dataset.full_view().matrices();
    let table = match evaluate_report(&proxies, &matrices) {
        Ok(t) => t,
        Err(e) => return Outcome::Fail(e.to_string()),
    };
    let row = table.row(EQ2_NAME).expect("proxy is in the table");
    let mut ok = true;
    let mut detail = Vec::new();
    for (id, expected) in PUBLISHED_TAUS {
        let Some(j) = table.problems.iter().position(|p| p == id) else {
            ok = false;
            detail.push(format!("{id} missing"));
            continue;
        };
        let (tau, rank) = (row.taus[j], row.ranks[j]);
        ok &= (tau - expected).abs() <= 0.02 && rank == 1;
        detail.push(format!("{id} tau {tau:.3} (published {expected}) rank {rank}"));
    }
    verdict(ok, detail.join("; "))
}

fn main() {
    let (c4, c5) = criteria_4_and_5();
    let results = [
        (1, "Kendall tau-b matches the pair-counting oracle", criterion_1()),
        (2, "normalized score endpoints and monotonicity", criterion_2()),
        (3, "evolved fixture proxy hand value", criterion_3()),
        (4, "planted-formula recovery on the test split", c4),
        (5, "structural, provenance and budget invariants", c5),
        (6, "determinism across --jobs", criterion_6()),
        (7, "frozen-bounds elitism", criterion_7()),
        (8, "Aging Evolution vs exhaustive oracle", criterion_8()),
        (9, "public benchmark reproduction", criterion_9()),
    ];
    let mut failed = 0;
    for (n, title, outcome) in &results {
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("criterion {n} {tag}: {title}: {detail}");
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
