//! Generational GP loop: ramped half-and-half initialization, binary
//! tournament parent selection, variation, and elitist survival from
//! parents plus offspring.
//!
//! Score bounds are updated with every newly evaluated individual before
//! anyone is scored, and scores are recomputed for each selection because
//! the bounds drift. Raw tau vectors are cached on the individual and never
//! recomputed.

mod config;
mod selection;
mod variation;

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::dataset::ProblemMatrix;
use crate::expr::{print_canonical, random_tree_with, ExpressionTree, GenMethod, Node};
use crate::fitness::{normalized_score, raw_tau_vector, FitnessError, Score, ScoreBounds, TauVector};

pub use config::{GpConfig, Survival};
pub use selection::{binary_tournament, rank_order, tournament_indices, truncation_indices};
pub use variation::{
    crossover, crossover_at, hoist_at, hoist_mutation, point_at, point_mutation, subtree_mutation,
    MAX_ATTEMPTS, SUBTREE_MUTATION_DEPTH,
};

/// Regeneration attempts per slot when initialization draws a duplicate.
pub const INIT_DEDUP_ATTEMPTS: usize = 20;

#[derive(Debug, Error)]
pub enum GpError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no training problems supplied")]
    NoProblems,
    #[error("problem `{problem}` has {found} feature columns, expected {expected}")]
    FeatureWidth {
        problem: String,
        expected: usize,
        found: usize,
    },
    #[error("evaluating `{expr}`: {source}")]
    Evaluation {
        expr: String,
        #[source]
        source: FitnessError,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub tree: ExpressionTree,
    pub canonical: String,
    pub raw_tau: TauVector,
    pub birth_generation: usize,
}

impl Individual {
    pub fn new(
        tree: ExpressionTree,
        feature_names: &[String],
        raw_tau: TauVector,
        birth_generation: usize,
    ) -> Self {
        let canonical = print_canonical(&tree, feature_names);
        Individual {
            tree,
            canonical,
            raw_tau,
            birth_generation,
        }
    }

    pub fn size(&self) -> usize {
        self.tree.size()
    }
}

/// Per-problem tau, serialized as a JSON object in problem order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemTaus(pub Vec<(String, f64)>);

impl Serialize for ProblemTaus {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// One line of the run log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationRecord {
    pub gen: usize,
    pub best_score: f64,
    pub mean_score: f64,
    pub best_tau: ProblemTaus,
    pub distinct_individuals: usize,
    pub best_expr: String,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best: Individual,
    pub best_score: Score,
    pub history: Vec<GenerationRecord>,
    pub final_bounds: ScoreBounds,
    pub final_population: Vec<Individual>,
    /// Number of raw tau vectors computed over the whole run.
    pub evaluations: usize,
}

/// What the loop exposes to an observer after each generation's survival.
pub struct GenerationEvent<'a> {
    pub generation: usize,
    pub parents: &'a [Individual],
    pub offspring: &'a [Individual],
    pub survivors: &'a [Individual],
    pub bounds: &'a ScoreBounds,
}

#[derive(Clone, Copy)]
enum Stream {
    Init = 0,
    Pairing = 1,
    Variation = 2,
    Survival = 3,
}

/// Independent generator per (generation, purpose), all from one seed.
fn stream_rng(seed: u64, generation: usize, purpose: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(generation as u64 * 4 + purpose as u64);
    rng
}

/// Initial population via ramped half-and-half: even slots use `full`, odd
/// slots `grow`, and the target depth cycles over the ramp. Duplicates are
/// redrawn up to [`INIT_DEDUP_ATTEMPTS`] times, then admitted.
pub fn initialize(config: &GpConfig, n_features: usize) -> Vec<ExpressionTree> {
    let mut rng = stream_rng(config.seed, 0, Stream::Init);
    let lo = config.tree_gen.min_depth;
    let span = config.tree_gen.max_depth_init - lo + 1;
    let mut seen: HashSet<Node> = HashSet::new();
    let mut out = Vec::with_capacity(config.pop_size);
    for slot in 0..config.pop_size {
        let method = if slot % 2 == 0 {
            GenMethod::Full
        } else {
            GenMethod::Grow
        };
        let depth = lo + (slot / 2) % span;
        let mut tree = random_tree_with(&mut rng, method, depth, n_features);
        for _ in 0..INIT_DEDUP_ATTEMPTS {
            if !seen.contains(tree.root()) {
                break;
            }
            tree = random_tree_with(&mut rng, method, depth, n_features);
        }
        seen.insert(tree.root().clone());
        out.push(tree);
    }
    out
}

struct Evaluator<'a> {
    views: &'a [ProblemMatrix],
    feature_names: &'a [String],
    pool: Option<rayon::ThreadPool>,
    count: usize,
}

impl Evaluator<'_> {
    fn evaluate(
        &mut self,
        trees: Vec<ExpressionTree>,
        generation: usize,
    ) -> Result<Vec<Individual>, GpError> {
        let views = self.views;
        let names = self.feature_names;
        let work = |tree: ExpressionTree| -> Result<Individual, GpError> {
            let tau = raw_tau_vector(&tree, views).map_err(|source| GpError::Evaluation {
                expr: print_canonical(&tree, names),
                source,
            })?;
            Ok(Individual::new(tree, names, tau, generation))
        };
        self.count += trees.len();
        match &self.pool {
            Some(pool) => pool.install(|| trees.into_par_iter().map(work).collect()),
            None => trees.into_iter().map(work).collect(),
        }
    }
}

fn scores_of(pop: &[&Individual], bounds: &ScoreBounds) -> Vec<Score> {
    pop.iter()
        .map(|i| normalized_score(&i.raw_tau, bounds).expect("bounds populated before scoring"))
        .collect()
}

fn record(
    generation: usize,
    pop: &[Individual],
    bounds: &ScoreBounds,
    problem_ids: &[String],
) -> GenerationRecord {
    let refs: Vec<&Individual> = pop.iter().collect();
    let scores = scores_of(&refs, bounds);
    let best = truncation_indices(&refs, &scores, 1)[0];
    let distinct: HashSet<&Node> = pop.iter().map(|i| i.tree.root()).collect();
    GenerationRecord {
        gen: generation,
        best_score: scores[best].0,
        mean_score: scores.iter().map(|s| s.0).sum::<f64>() / scores.len() as f64,
        best_tau: ProblemTaus(
            problem_ids
                .iter()
                .cloned()
                .zip(pop[best].raw_tau.values().iter().copied())
                .collect(),
        ),
        distinct_individuals: distinct.len(),
        best_expr: pop[best].canonical.clone(),
    }
}

enum Offspring {
    Fresh(ExpressionTree),
    Copy(Individual),
}

fn vary(
    parents: &[&Individual],
    config: &GpConfig,
    n_features: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Offspring> {
    let n = parents.len();
    let target = config.pop_size;
    let c1 = config.p_crossover;
    let c2 = c1 + config.p_subtree_mut;
    let c3 = c2 + config.p_hoist_mut;
    let c4 = c3 + config.p_point_mut;
    let mut out = Vec::with_capacity(target);
    let mut cursor = 0;
    while out.len() < target {
        let a = &parents[cursor % n].tree;
        let r: f64 = rng.gen();
        if r < c1 {
            let b = &parents[(cursor + 1) % n].tree;
            let (x, y) = crossover(a, b, rng);
            out.push(Offspring::Fresh(x));
            if out.len() < target {
                out.push(Offspring::Fresh(y));
            }
            cursor += 2;
            continue;
        }
        let child = if r < c2 {
            Offspring::Fresh(subtree_mutation(a, n_features, rng))
        } else if r < c3 {
            Offspring::Fresh(hoist_mutation(a, rng))
        } else if r < c4 {
            Offspring::Fresh(point_mutation(a, n_features, rng))
        } else {
            Offspring::Copy(parents[cursor % n].clone())
        };
        out.push(child);
        cursor += 1;
    }
    out
}

/// Run the search on `train` and return the best individual of the final
/// population under the final bounds.
pub fn evolve(
    config: &GpConfig,
    feature_names: &[String],
    train: &[ProblemMatrix],
) -> Result<SearchResult, GpError> {
    evolve_observed(config, feature_names, train, |_| {})
}

/// [`evolve`] with a callback after every generation's survival step.
pub fn evolve_observed(
    config: &GpConfig,
    feature_names: &[String],
    train: &[ProblemMatrix],
    mut observer: impl FnMut(&GenerationEvent<'_>),
) -> Result<SearchResult, GpError> {
    config.validate()?;
    if train.is_empty() {
        return Err(GpError::NoProblems);
    }
    let n_features = feature_names.len();
    if n_features == 0 {
        return Err(GpError::Config("at least one feature is required".into()));
    }
    for v in train {
        if v.features.n_cols() != n_features {
            return Err(GpError::FeatureWidth {
                problem: v.problem_id.clone(),
                expected: n_features,
                found: v.features.n_cols(),
            });
        }
    }
    let problem_ids: Vec<String> = train.iter().map(|v| v.problem_id.clone()).collect();
    let pool = if config.jobs > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(config.jobs)
                .build()
                .map_err(|e| GpError::Config(format!("thread pool: {e}")))?,
        )
    } else {
        None
    };
    let mut evaluator = Evaluator {
        views: train,
        feature_names,
        pool,
        count: 0,
    };

    let mut bounds = ScoreBounds::empty(train.len());
    let mut population = evaluator.evaluate(initialize(config, n_features), 0)?;
    for ind in &population {
        bounds.update(&ind.raw_tau);
    }
    let mut history = vec![record(0, &population, &bounds, &problem_ids)];

    for generation in 1..=config.generations {
        let refs: Vec<&Individual> = population.iter().collect();
        let scores = scores_of(&refs, &bounds);
        let mut pairing = stream_rng(config.seed, generation, Stream::Pairing);
        let parents: Vec<&Individual> =
            tournament_indices(&refs, &scores, config.pop_size, &mut pairing)
                .into_iter()
                .map(|i| refs[i])
                .collect();

        let mut variation = stream_rng(config.seed, generation, Stream::Variation);
        let planned = vary(&parents, config, n_features, &mut variation);
        let fresh: Vec<ExpressionTree> = planned
            .iter()
            .filter_map(|o| match o {
                Offspring::Fresh(t) => Some(t.clone()),
                Offspring::Copy(_) => None,
            })
            .collect();
        let mut evaluated = evaluator.evaluate(fresh, generation)?.into_iter();
        if !config.freeze_bounds {
            for ind in evaluated.as_slice() {
                bounds.update(&ind.raw_tau);
            }
        }
        let offspring: Vec<Individual> = planned
            .into_iter()
            .map(|o| match o {
                Offspring::Fresh(_) => evaluated.next().expect("one evaluation per fresh child"),
                Offspring::Copy(ind) => ind,
            })
            .collect();

        let pooled: Vec<&Individual> = population.iter().chain(&offspring).collect();
        let pooled_scores = scores_of(&pooled, &bounds);
        let chosen = match config.survival {
            Survival::Truncation => truncation_indices(&pooled, &pooled_scores, config.pop_size),
            Survival::Tournament => {
                let mut rng = stream_rng(config.seed, generation, Stream::Survival);
                tournament_indices(&pooled, &pooled_scores, config.pop_size, &mut rng)
            }
        };
        let survivors: Vec<Individual> = chosen.into_iter().map(|i| pooled[i].clone()).collect();
        observer(&GenerationEvent {
            generation,
            parents: &population,
            offspring: &offspring,
            survivors: &survivors,
            bounds: &bounds,
        });
        population = survivors;
        history.push(record(generation, &population, &bounds, &problem_ids));
        log::debug!(
            "gen {generation}: best {:.4} `{}`",
            history[generation].best_score,
            history[generation].best_expr
        );
    }

    let refs: Vec<&Individual> = population.iter().collect();
    let scores = scores_of(&refs, &bounds);
    let best_idx = truncation_indices(&refs, &scores, 1)[0];
    Ok(SearchResult {
        best: population[best_idx].clone(),
        best_score: scores[best_idx],
        history,
        final_bounds: bounds,
        final_population: population,
        evaluations: evaluator.count,
    })
}
