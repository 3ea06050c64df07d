//! Recover the planted formula from the synthetic fixture dataset.
//!
//! ```text
//! cargo run --release -p zc-evolve --example evolve_planted [seed]
//! ```

use std::path::Path;
use std::time::Instant;

use zc_evolve::dataset::{load_manifest, split_train_test};
use zc_evolve::fitness::problem_tau;
use zc_evolve::gp::{evolve, GpConfig};
use zc_evolve::print_canonical;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(1);
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/planted/manifest.json");
    let dataset = load_manifest(manifest)?;
    let (train, test) = split_train_test(&dataset, 0.7, seed)?;

    let config = GpConfig {
        seed,
        ..GpConfig::default()
    };
    let started = Instant::now();
    let result = evolve(&config, dataset.feature_names(), &train.matrices())?;
    println!("searched in {:.1?}", started.elapsed());

    for rec in result.history.iter().step_by(10) {
        println!("gen {:>3}  best {:.4}  {}", rec.gen, rec.best_score, rec.best_expr);
    }
    let best = &result.best;
    println!("best: {}", print_canonical(&best.tree, dataset.feature_names()));
    for m in test.matrices() {
        println!("  test tau {:<10} {:.4}", m.problem_id, problem_tau(best.tree.root(), &m)?);
    }
    Ok(())
}
