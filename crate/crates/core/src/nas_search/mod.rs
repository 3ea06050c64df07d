//! Aging Evolution over an enumerable, table-backed search space, scored by
//! any [`NamedProxy`](crate::zoo::NamedProxy).
//!
//! A space file is a JSON manifest `{"arity": [4, 4, ...], "csv": "space.csv"}`
//! plus a CSV shaped like a problem table whose `arch_id` column holds the
//! encoding string (`0-3-1-...`). An optional `target_column` names a
//! ground-truth column that is carried along but never used by the search.

mod space;

use std::collections::VecDeque;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{evaluate_node, Node};
use crate::zoo::NamedProxy;

pub use space::{load_space, write_space, ArchEncoding, SpaceManifest, ToySearchSpace};

/// Largest space [`exhaustive_argmax`] enumerates by default.
pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid space manifest: {source}")]
    Manifest {
        path: std::path::PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("space table: {0}")]
    Table(String),
    #[error("encoding `{0}` is not in the space table")]
    Lookup(String),
    #[error("invalid encoding `{0}`")]
    BadEncoding(String),
    #[error("every position has arity 1; nothing to mutate")]
    Immutable,
    #[error("invalid aging parameters: {0}")]
    Params(String),
    #[error("space has {size} encodings, above the enumeration cap {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("proxy `{proxy}`: {detail}")]
    Proxy { proxy: String, detail: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgingParams {
    pub population_size: usize,
    pub sample_size: usize,
    /// Total evaluations, including the initial population.
    pub cycles: usize,
    pub seed: u64,
}

impl Default for AgingParams {
    fn default() -> Self {
        AgingParams {
            population_size: 50,
            sample_size: 10,
            cycles: 2000,
            seed: 0,
        }
    }
}

impl AgingParams {
    pub fn validate(&self) -> Result<(), SearchError> {
        let p = self.population_size;
        if p < 2 {
            return Err(SearchError::Params(format!("population size {p} < 2")));
        }
        if self.sample_size < 1 || self.sample_size > p {
            return Err(SearchError::Params(format!(
                "sample size {} outside [1, {p}]",
                self.sample_size
            )));
        }
        if self.cycles < p {
            return Err(SearchError::Params(format!(
                "cycles {} < population size {p}",
                self.cycles
            )));
        }
        Ok(())
    }
}

/// Change exactly one position to a different value. Positions of arity 1
/// are never chosen.
pub fn mutate_arch<R: Rng + ?Sized>(
    enc: &ArchEncoding,
    space: &ToySearchSpace,
    rng: &mut R,
) -> Result<ArchEncoding, SearchError> {
    let mutable: Vec<usize> = (0..space.arity().len())
        .filter(|&i| space.arity()[i] > 1)
        .collect();
    if mutable.is_empty() {
        return Err(SearchError::Immutable);
    }
    let pos = mutable[rng.gen_range(0..mutable.len())];
    let current = enc.0[pos];
    let mut value = rng.gen_range(0..space.arity()[pos] - 1);
    if value >= current {
        value += 1;
    }
    let mut out = enc.clone();
    out.0[pos] = value;
    Ok(out)
}

/// Proxy score of an encoding; non-finite values rank below everything.
pub fn proxy_score(
    space: &ToySearchSpace,
    node: &Node,
    enc: &ArchEncoding,
) -> Result<f64, SearchError> {
    let row = space.features(enc)?;
    let v = evaluate_node(node, row).map_err(|e| SearchError::Table(e.to_string()))?;
    Ok(if v.is_finite() { v } else { f64::NEG_INFINITY })
}

fn check_proxy(space: &ToySearchSpace, proxy: &NamedProxy) -> Result<Node, SearchError> {
    let node = proxy.node();
    if node.max_feature().is_some_and(|m| m >= space.feature_names().len()) {
        return Err(SearchError::Proxy {
            proxy: proxy.name.clone(),
            detail: "refers to features outside the space table".into(),
        });
    }
    Ok(node)
}

/// One line of the search log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleRecord {
    pub cycle: usize,
    pub parent: String,
    pub child: String,
    pub child_score: f64,
    pub best_score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgingResult {
    pub best: ArchEncoding,
    pub best_score: f64,
    pub history: Vec<CycleRecord>,
}

fn better(candidate: (&ArchEncoding, f64), incumbent: (&ArchEncoding, f64)) -> bool {
    candidate.1 > incumbent.1 || (candidate.1 == incumbent.1 && candidate.0 < incumbent.0)
}

/// Regularized (aging) evolution: a FIFO population of `P` encodings; each
/// cycle samples `S`, mutates the sample's best, appends the child and
/// evicts the oldest. Returns the best encoding ever evaluated.
pub fn aging_evolution(
    space: &ToySearchSpace,
    proxy: &NamedProxy,
    params: &AgingParams,
) -> Result<AgingResult, SearchError> {
    aging_evolution_observed(space, proxy, params, |_| {})
}

/// [`aging_evolution`] with a view of the queue after every cycle.
pub fn aging_evolution_observed(
    space: &ToySearchSpace,
    proxy: &NamedProxy,
    params: &AgingParams,
    mut observer: impl FnMut(&VecDeque<(ArchEncoding, f64)>),
) -> Result<AgingResult, SearchError> {
    params.validate()?;
    let node = check_proxy(space, proxy)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut population: VecDeque<(ArchEncoding, f64)> = VecDeque::with_capacity(params.population_size);
    let mut best: Option<(ArchEncoding, f64)> = None;
    let consider = |enc: &ArchEncoding, score: f64, best: &mut Option<(ArchEncoding, f64)>| {
        if best.as_ref().is_none_or(|b| better((enc, score), (&b.0, b.1))) {
            *best = Some((enc.clone(), score));
        }
    };
    for _ in 0..params.population_size {
        let enc = space.random_encoding(&mut rng);
        let score = proxy_score(space, &node, &enc)?;
        consider(&enc, score, &mut best);
        population.push_back((enc, score));
    }

    let mut history = Vec::with_capacity(params.cycles - params.population_size);
    if space.is_singleton() {
        let (enc, score) = best.expect("population is non-empty");
        return Ok(AgingResult {
            best: enc,
            best_score: score,
            history,
        });
    }
    for cycle in 1..=(params.cycles - params.population_size) {
        let sample = index::sample(&mut rng, population.len(), params.sample_size);
        let mut parent_idx = sample.index(0);
        for i in sample.iter().skip(1) {
            if population[i].1 > population[parent_idx].1 {
                parent_idx = i;
            }
        }
        let parent = population[parent_idx].0.clone();
        let child = mutate_arch(&parent, space, &mut rng)?;
        let child_score = proxy_score(space, &node, &child)?;
        consider(&child, child_score, &mut best);
        population.push_back((child.clone(), child_score));
        population.pop_front();
        observer(&population);
        history.push(CycleRecord {
            cycle,
            parent: parent.to_string(),
            child: child.to_string(),
            child_score,
            best_score: best.as_ref().map_or(f64::NEG_INFINITY, |b| b.1),
        });
    }
    let (enc, score) = best.expect("population is non-empty");
    Ok(AgingResult {
        best: enc,
        best_score: score,
        history,
    })
}

/// Enumerate the whole space and return the proxy-maximal encoding, ties
/// going to the lexicographically smallest encoding.
pub fn exhaustive_argmax(
    space: &ToySearchSpace,
    proxy: &NamedProxy,
    cap: usize,
) -> Result<(ArchEncoding, f64), SearchError> {
    if space.size() > cap {
        return Err(SearchError::CapExceeded {
            size: space.size(),
            cap,
        });
    }
    let node = check_proxy(space, proxy)?;
    let mut best: Option<(ArchEncoding, f64)> = None;
    for enc in space.encodings() {
        let s = proxy_score(space, &node, &enc)?;
        // encodings arrive in lexicographic order, so strict `>` keeps the smallest on ties
        if best.as_ref().is_none_or(|b| s > b.1) {
            best = Some((enc, s));
        }
    }
    Ok(best.expect("space is non-empty"))
}

/// Every encoding's proxy score, in lexicographic encoding order.
pub fn all_scores(space: &ToySearchSpace, proxy: &NamedProxy) -> Result<Vec<f64>, SearchError> {
    let node = check_proxy(space, proxy)?;
    space
        .encodings()
        .map(|e| proxy_score(space, &node, &e))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space_from(arity: Vec<usize>, score: impl Fn(&[usize]) -> f64) -> ToySearchSpace {
        let names = vec!["s".to_string()];
        let encs: Vec<ArchEncoding> = ToySearchSpace::enumerate(&arity).collect();
        let rows = encs
            .iter()
            .map(|e| (e.to_string(), vec![score(&e.0)]))
            .collect();
        ToySearchSpace::from_table(arity, names, rows, None).unwrap()
    }

    fn identity() -> NamedProxy {
        NamedProxy::feature("s", 0)
    }

    #[test]
    fn forced_mutation() {
        let space = space_from(vec![2], |e| e[0] as f64);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            mutate_arch(&ArchEncoding(vec![0]), &space, &mut rng).unwrap(),
            ArchEncoding(vec![1])
        );
    }

    #[test]
    fn mutation_changes_exactly_one_position() {
        let space = space_from(vec![4, 1, 3, 5, 2], |_| 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let e = space.random_encoding(&mut rng);
            let m = mutate_arch(&e, &space, &mut rng).unwrap();
            let diff = e.0.iter().zip(&m.0).filter(|(a, b)| a != b).count();
            assert_eq!(diff, 1);
            assert_eq!(m.0[1], 0);
            assert!(m.0.iter().zip(space.arity()).all(|(v, a)| v < a));
        }
    }

    #[test]
    fn immutable_space() {
        let space = space_from(vec![1, 1], |_| 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(matches!(
            mutate_arch(&ArchEncoding(vec![0, 0]), &space, &mut rng),
            Err(SearchError::Immutable)
        ));
    }

    #[test]
    fn singleton_space() {
        let space = space_from(vec![1], |_| 0.3);
        let params = AgingParams {
            population_size: 2,
            sample_size: 1,
            cycles: 10,
            seed: 0,
        };
        let r = aging_evolution(&space, &identity(), &params).unwrap();
        assert_eq!(r.best, ArchEncoding(vec![0]));
        let (e, s) = exhaustive_argmax(&space, &identity(), DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!((e, s), (ArchEncoding(vec![0]), 0.3));
    }

    #[test]
    fn two_encodings() {
        let space = space_from(vec![2], |e| if e[0] == 0 { 0.1 } else { 0.2 });
        let (e, _) = exhaustive_argmax(&space, &identity(), DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(e, ArchEncoding(vec![1]));
    }

    #[test]
    fn zero_mutation_budget_returns_best_seed() {
        let space = space_from(vec![3, 3], |e| (e[0] * 3 + e[1]) as f64);
        let params = AgingParams {
            population_size: 2,
            sample_size: 2,
            cycles: 2,
            seed: 4,
        };
        let r = aging_evolution(&space, &identity(), &params).unwrap();
        assert!(r.history.is_empty());
        // replay the seeding draws
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = space.random_encoding(&mut rng);
        let b = space.random_encoding(&mut rng);
        let best = if space.features(&a).unwrap()[0] >= space.features(&b).unwrap()[0] { a } else { b };
        assert_eq!(r.best, best);
    }

    #[test]
    fn queue_and_monotone_best() {
        let space = space_from(vec![4, 4, 4], |e| (e[0] as f64).sin() + e[1] as f64 * e[2] as f64);
        let params = AgingParams {
            population_size: 10,
            sample_size: 3,
            cycles: 200,
            seed: 9,
        };
        let mut last_child: Option<ArchEncoding> = None;
        let r = aging_evolution_observed(&space, &identity(), &params, |q| {
            assert_eq!(q.len(), 10);
            last_child = Some(q.back().unwrap().0.clone());
        })
        .unwrap();
        assert_eq!(r.history.len(), 190);
        assert_eq!(last_child.unwrap().to_string(), r.history.last().unwrap().child);
        for w in r.history.windows(2) {
            assert!(w[1].best_score >= w[0].best_score);
        }
        let (_, top) = exhaustive_argmax(&space, &identity(), DEFAULT_ENUMERATION_CAP).unwrap();
        assert!(r.best_score <= top);
        assert_eq!(aging_evolution(&space, &identity(), &params).unwrap(), r);
    }

    #[test]
    fn eviction_is_fifo() {
        let space = space_from(vec![5, 5], |e| (e[0] + e[1]) as f64);
        let params = AgingParams {
            population_size: 4,
            sample_size: 2,
            cycles: 30,
            seed: 2,
        };
        let mut snapshots: Vec<Vec<ArchEncoding>> = Vec::new();
        aging_evolution_observed(&space, &identity(), &params, |q| {
            snapshots.push(q.iter().map(|(e, _)| e.clone()).collect());
        })
        .unwrap();
        for w in snapshots.windows(2) {
            // the new queue is the old one shifted left by one
            assert_eq!(w[0][1..], w[1][..3]);
        }
    }

    #[test]
    fn params_validation() {
        let ok = AgingParams::default();
        ok.validate().unwrap();
        let bad = AgingParams {
            cycles: 10,
            population_size: 50,
            ..ok.clone()
        };
        assert!(bad.validate().unwrap_err().to_string().contains("cycles"));
        let bad = AgingParams {
            sample_size: 51,
            ..ok.clone()
        };
        assert!(bad.validate().is_err());
        let bad = AgingParams {
            population_size: 1,
            sample_size: 1,
            ..ok
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let space = space_from(vec![4, 4], |_| 0.0);
        assert!(matches!(
            exhaustive_argmax(&space, &identity(), 15),
            Err(SearchError::CapExceeded { size: 16, cap: 15 })
        ));
    }
}
