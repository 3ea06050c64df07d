//! Aging Evolution on the 4096-encoding fixture space, scored by the
//! evolved fixture proxy, checked against exhaustive enumeration.
//!
//! ```text
//! cargo run --release -p zc-evolve --example aging_search [seeds]
//! ```

use std::path::Path;

use zc_evolve::nas_search::{
    aging_evolution, all_scores, exhaustive_argmax, load_space, AgingParams, DEFAULT_ENUMERATION_CAP,
};
use zc_evolve::zoo::{builtin_proxy, EQ2_NAME};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seeds: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(5);
    let space = load_space(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/toy_space/space.json"))?;
    let proxy = builtin_proxy(EQ2_NAME, space.feature_names())?;

    let (argmax, top) = exhaustive_argmax(&space, &proxy, DEFAULT_ENUMERATION_CAP)?;
    println!("exhaustive argmax {argmax}  score {top:.6}");
    let scores = all_scores(&space, &proxy)?;

    for seed in 0..seeds {
        let params = AgingParams {
            seed,
            ..AgingParams::default()
        };
        let r = aging_evolution(&space, &proxy, &params)?;
        let better = scores.iter().filter(|s| **s > r.best_score).count();
        println!(
            "seed {seed:>2}: best {}  score {:.6}  ({better} encodings score higher)",
            r.best, r.best_score
        );
    }
    Ok(())
}
