use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{BenchmarkDataset, DatasetError, DatasetView, ViewLabel};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// Per-problem shuffle seed: the run seed mixed with an FNV-1a hash of the
/// problem id, so problems never share a shuffle stream.
pub fn split_seed(seed: u64, problem_id: &str) -> u64 {
    let hash = problem_id
        .bytes()
        .fold(FNV_OFFSET, |h, b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME));
    seed ^ hash
}

/// Seeded per-problem train/test partition. The first `floor(fraction * n)`
/// shuffled indices go to train. Both views list indices in ascending order.
pub fn split_train_test(
    dataset: &BenchmarkDataset,
    train_fraction: f64,
    seed: u64,
) -> Result<(DatasetView<'_>, DatasetView<'_>), DatasetError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(DatasetError::BadFraction {
            fraction: train_fraction,
        });
    }
    let mut train = Vec::with_capacity(dataset.problems.len());
    let mut test = Vec::with_capacity(dataset.problems.len());
    for p in &dataset.problems {
        let n = p.rows.len();
        // tolerance so e.g. 0.7 * 10 is not floored to 6
        let n_train = (train_fraction * n as f64 + 1e-9).floor() as usize;
        let n_test = n - n_train;
        if n_train < 2 || n_test < 2 {
            return Err(DatasetError::SplitTooSmall {
                problem: p.id.clone(),
                train: n_train,
                test: n_test,
            });
        }
        let mut idx: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(split_seed(seed, &p.id));
        idx.shuffle(&mut rng);
        let mut tr = idx[..n_train].to_vec();
        let mut te = idx[n_train..].to_vec();
        tr.sort_unstable();
        te.sort_unstable();
        train.push(tr);
        test.push(te);
    }
    Ok((
        DatasetView {
            dataset,
            indices: train,
            label: ViewLabel::Train,
        },
        DatasetView {
            dataset,
            indices: test,
            label: ViewLabel::Test,
        },
    ))
}
