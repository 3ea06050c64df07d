//! Multi-problem fitness: per-problem Kendall tau, running per-problem
//! bounds, and the min-max normalized score summed over problems.

mod kendall;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::ProblemMatrix;
use crate::expr::{evaluate_node_batch, ExprError, ExpressionTree, Node};

pub use kendall::kendall_tau;

/// Term contributed by a problem whose bounds have not yet separated.
pub const DEGENERATE_TERM: f64 = 0.5;

/// Tau assigned to a problem where the proxy produced a non-finite score.
pub const NON_FINITE_TAU: f64 = -1.0;

#[derive(Debug, Error, PartialEq)]
pub enum FitnessError {
    #[error("vectors differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("kendall tau needs at least 2 values, got {0}")]
    TooShort(usize),
    #[error("kendall tau input contains a non-finite value")]
    NonFinite,
    #[error("score bounds for problem {0} are not populated")]
    UnpopulatedBounds(usize),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// One raw tau per problem, in dataset problem order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TauVector(pub Vec<f64>);

impl TauVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Normalized multi-problem score in `[0, N]` for `N` problems.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Score(pub f64);

impl Score {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Lowest and highest tau seen so far for each problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreBounds {
    bounds: Vec<Option<(f64, f64)>>,
}

impl ScoreBounds {
    pub fn empty(n_problems: usize) -> Self {
        ScoreBounds {
            bounds: vec![None; n_problems],
        }
    }

    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    pub fn get(&self, problem: usize) -> Option<(f64, f64)> {
        self.bounds.get(problem).copied().flatten()
    }

    /// Widen each problem's bounds to include `tau`.
    pub fn update(&mut self, tau: &TauVector) {
        assert_eq!(tau.len(), self.bounds.len(), "tau vector length mismatch");
        for (slot, &t) in self.bounds.iter_mut().zip(tau.values()) {
            *slot = Some(match *slot {
                None => (t, t),
                Some((lo, hi)) => (lo.min(t), hi.max(t)),
            });
        }
    }
}

/// Functional form of [`ScoreBounds::update`].
pub fn update_bounds(bounds: &ScoreBounds, tau: &TauVector) -> ScoreBounds {
    let mut out = bounds.clone();
    out.update(tau);
    out
}

/// `sum_i (tau_i - lo_i) / (hi_i - lo_i)`, with [`DEGENERATE_TERM`] for
/// problems where `hi_i == lo_i`.
pub fn normalized_score(tau: &TauVector, bounds: &ScoreBounds) -> Result<Score, FitnessError> {
    if tau.len() != bounds.len() {
        return Err(FitnessError::LengthMismatch {
            left: tau.len(),
            right: bounds.len(),
        });
    }
    let mut total = 0.0;
    for (i, &t) in tau.values().iter().enumerate() {
        let (lo, hi) = bounds.get(i).ok_or(FitnessError::UnpopulatedBounds(i))?;
        total += if hi > lo {
            (t - lo) / (hi - lo)
        } else {
            DEGENERATE_TERM
        };
    }
    Ok(Score(total))
}

/// Tau between a node's scores and the targets of one problem. Any
/// non-finite score forces [`NON_FINITE_TAU`].
pub fn problem_tau(node: &Node, view: &ProblemMatrix) -> Result<f64, FitnessError> {
    let scores = evaluate_node_batch(node, &view.features)?;
    if scores.iter().any(|s| !s.is_finite()) {
        return Ok(NON_FINITE_TAU);
    }
    kendall_tau(&scores, &view.targets)
}

pub fn raw_tau_vector(
    tree: &ExpressionTree,
    views: &[ProblemMatrix],
) -> Result<TauVector, FitnessError> {
    raw_tau_vector_node(tree.root(), views)
}

pub fn raw_tau_vector_node(node: &Node, views: &[ProblemMatrix]) -> Result<TauVector, FitnessError> {
    views
        .iter()
        .map(|v| problem_tau(node, v))
        .collect::<Result<Vec<_>, _>>()
        .map(TauVector)
}
