//! Deterministic generators for the shipped fixtures: a planted-formula
//! dataset and a 4096-encoding toy search space.
//!
//! Only `+ - * /` and `sqrt` are used so the bytes are identical on every
//! IEEE-754 platform.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{write_dataset, ArchRecord, BenchmarkDataset, DatasetError, Problem};
use crate::nas_search::{write_space, SearchError, ToySearchSpace};
use crate::zoo::{BASELINE_FEATURES, EQ2_EXPR, EQ2_NAME, EQ3_EXPR, EQ3_NAME};

pub const PLANTED_SEED: u64 = 20_240_601;
pub const PLANTED_ROWS: usize = 1000;
pub const PLANTED_FEATURES: [&str; 5] = ["x1", "x2", "x3", "x4", "x5"];
pub const PLANTED_PROBLEMS: [&str; 3] = ["planted_a", "planted_b", "planted_c"];
/// The formula every planted target is a monotone transform of.
pub const PLANTED_EXPR: &str = "(mul x1 (add x2 (sqrt x3)))";

pub const SPACE_SEED: u64 = 7;
pub const SPACE_ARITY: [usize; 6] = [4; 6];
pub const SPACE_TARGET: &str = "accuracy";

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

fn planted_latent(x: &[f64]) -> f64 {
    x[0] * (x[1] + x[2].sqrt())
}

/// Three strictly increasing transforms, one per problem.
fn transform(problem: usize, f: f64) -> f64 {
    match problem {
        0 => f * f * f,
        1 => f / (1.0 + f),
        _ => f.sqrt() + f,
    }
}

/// Add noise strictly smaller than half the smallest gap between sorted
/// targets, so the order of distinct values is untouched.
fn rank_preserving_noise<R: Rng>(targets: &mut [f64], rng: &mut R) {
    let mut sorted = targets.to_vec();
    sorted.sort_by(f64::total_cmp);
    let gap = sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|g| *g > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !gap.is_finite() {
        return;
    }
    for t in targets.iter_mut() {
        *t += (rng.gen::<f64>() - 0.5) * 0.9 * gap;
    }
}

/// 3 problems x 1000 rows over features `x1..x5`; `x4` and `x5` are noise.
pub fn planted_dataset() -> BenchmarkDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(PLANTED_SEED);
    let problems = PLANTED_PROBLEMS
        .iter()
        .enumerate()
        .map(|(p, id)| {
            let features: Vec<Vec<f64>> = (0..PLANTED_ROWS)
                .map(|_| {
                    (0..PLANTED_FEATURES.len())
                        .map(|_| round6(0.5 + 4.5 * rng.gen::<f64>()))
                        .collect()
                })
                .collect();
            let mut targets: Vec<f64> = features
                .iter()
                .map(|x| transform(p, planted_latent(x)))
                .collect();
            rank_preserving_noise(&mut targets, &mut rng);
            Problem {
                id: id.to_string(),
                target_name: "acc".into(),
                group: None,
                rows: features
                    .into_iter()
                    .zip(targets)
                    .enumerate()
                    .map(|(i, (features, target))| ArchRecord {
                        arch_id: format!("{id}-{i:04}"),
                        features,
                        target,
                    })
                    .collect(),
            }
        })
        .collect();
    BenchmarkDataset::new(PLANTED_FEATURES.iter().map(|s| s.to_string()).collect(), problems)
        .expect("generator output is valid")
}

/// Every metric is a positive smooth polynomial of the normalized encoding
/// (linear terms plus neighbour interactions) with 5% multiplicative noise;
/// accuracy is a separate polynomial of the same kind.
pub fn toy_space() -> ToySearchSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(SPACE_SEED);
    let k = SPACE_ARITY.len();
    let n_feat = BASELINE_FEATURES.len();
    let mut coeffs = |scale: f64| -> (f64, Vec<f64>, Vec<f64>) {
        let base = scale * (0.5 + rng.gen::<f64>());
        let lin = (0..k).map(|_| scale * rng.gen::<f64>()).collect();
        let pair = (0..k - 1).map(|_| scale * 0.5 * rng.gen::<f64>()).collect();
        (base, lin, pair)
    };
    let feature_coeffs: Vec<_> = BASELINE_FEATURES
        .iter()
        .map(|f| coeffs(match *f {
            "flops" => 100.0,
            "params" => 10.0,
            _ => 1.0,
        }))
        .collect();
    let acc_coeffs = coeffs(0.1);
    let poly = |(base, lin, pair): &(f64, Vec<f64>, Vec<f64>), v: &[f64]| {
        let mut s = *base;
        for i in 0..k {
            s += lin[i] * v[i];
        }
        for i in 0..k - 1 {
            s += pair[i] * v[i] * v[i + 1];
        }
        s
    };

    let mut table = Vec::new();
    let mut targets = Vec::new();
    for enc in ToySearchSpace::enumerate(&SPACE_ARITY) {
        let v: Vec<f64> = enc
            .0
            .iter()
            .zip(SPACE_ARITY)
            .map(|(&e, a)| e as f64 / (a - 1) as f64)
            .collect();
        let row: Vec<f64> = feature_coeffs
            .iter()
            .map(|c| round6(poly(c, &v) * (1.0 + 0.1 * (rng.gen::<f64>() - 0.5))))
            .collect();
        debug_assert_eq!(row.len(), n_feat);
        targets.push(round6(poly(&acc_coeffs, &v) + 0.01 * rng.gen::<f64>()));
        table.push((enc.to_string(), row));
    }
    ToySearchSpace::from_table(
        SPACE_ARITY.to_vec(),
        BASELINE_FEATURES.iter().map(|s| s.to_string()).collect(),
        table,
        Some(targets),
    )
    .expect("generator output is valid")
}

/// Contents of a one-expression file with a title comment.
pub fn expression_file(name: &str, expr: &str) -> String {
    format!("# {name}\n{expr}\n")
}

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Write every fixture under `dir`: `planted/`, `toy_space/` and the two
/// fixture expression files.
pub fn write_fixtures(dir: impl AsRef<Path>) -> Result<(), FixtureError> {
    let dir = dir.as_ref();
    write_dataset(&planted_dataset(), dir.join("planted"))?;
    write_space(&toy_space(), Some(SPACE_TARGET), dir.join("toy_space"))?;
    for (name, expr) in [(EQ2_NAME, EQ2_EXPR), (EQ3_NAME, EQ3_EXPR)] {
        let path = dir.join(format!("{name}.expr"));
        fs::write(&path, expression_file(name, expr)).map_err(|source| FixtureError::Io { path, source })?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::fitness::{kendall_tau, problem_tau};

    #[test]
    fn planted_formula_ranks_targets_perfectly() {
        let ds = planted_dataset();
        let tree = parse(PLANTED_EXPR, ds.feature_names()).unwrap();
        for m in ds.full_view().matrices() {
            assert_eq!(m.n_rows(), PLANTED_ROWS);
            assert_eq!(problem_tau(tree.root(), &m).unwrap(), 1.0, "{}", m.problem_id);
        }
    }

    #[test]
    fn noise_keeps_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let clean = vec![0.0, 1.0, 1.5, 1.51, 3.0, 2.99999];
        let mut noisy = clean.clone();
        rank_preserving_noise(&mut noisy, &mut rng);
        assert_ne!(noisy, clean);
        assert_eq!(kendall_tau(&clean, &noisy).unwrap(), 1.0);
    }

    #[test]
    fn toy_space_shape() {
        let s = toy_space();
        assert_eq!(s.size(), 4096);
        assert_eq!(s.feature_names().len(), 16);
        for e in s.encodings() {
            assert!(s.features(&e).unwrap().iter().all(|v| *v > 0.0));
            assert!(s.target(&e).is_some());
        }
    }

    #[test]
    fn shipped_fixtures_match_generator() {
        let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
        let fresh = tempfile::tempdir().unwrap();
        write_fixtures(fresh.path()).unwrap();
        for rel in [
            "planted/manifest.json",
            "planted/planted_a.csv",
            "planted/planted_b.csv",
            "planted/planted_c.csv",
            "toy_space/space.json",
            "toy_space/space.csv",
            "sr-nas-eq2.expr",
            "sr-nas-eq3.expr",
        ] {
            let a = fs::read(shipped.join(rel)).unwrap_or_default();
            let b = fs::read(fresh.path().join(rel)).unwrap();
            assert!(a == b, "{rel} differs from the generator; rerun the generate_fixtures example");
        }
    }
}
