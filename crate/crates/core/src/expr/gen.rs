use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tree::{ExpressionTree, Node, OperatorKind, MAX_DEPTH, MIN_DEPTH};
use super::ExprError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenMethod {
    Full,
    Grow,
    RampedHalfAndHalf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeGenConfig {
    pub min_depth: usize,
    pub max_depth_init: usize,
    pub max_depth: usize,
    pub method: GenMethod,
}

impl Default for TreeGenConfig {
    fn default() -> Self {
        TreeGenConfig {
            min_depth: MIN_DEPTH,
            max_depth_init: 6,
            max_depth: MAX_DEPTH,
            method: GenMethod::RampedHalfAndHalf,
        }
    }
}

impl TreeGenConfig {
    pub fn validate(&self) -> Result<(), ExprError> {
        let ok = self.min_depth == MIN_DEPTH
            && self.max_depth == MAX_DEPTH
            && self.min_depth <= self.max_depth_init
            && self.max_depth_init <= self.max_depth;
        if ok {
            Ok(())
        } else {
            Err(ExprError::Config(format!(
                "tree generation requires {MIN_DEPTH} <= max_depth_init ({}) <= {MAX_DEPTH}",
                self.max_depth_init
            )))
        }
    }
}

fn random_op<R: Rng + ?Sized>(rng: &mut R) -> OperatorKind {
    *OperatorKind::ALL.choose(rng).expect("operator set is non-empty")
}

fn random_leaf<R: Rng + ?Sized>(rng: &mut R, n_features: usize) -> Node {
    Node::Leaf(rng.gen_range(0..n_features))
}

fn with_children<R: Rng + ?Sized>(
    rng: &mut R,
    op: OperatorKind,
    mut child: impl FnMut(&mut R) -> Node,
) -> Node {
    let children = (0..op.arity()).map(|_| child(rng)).collect();
    Node::Op(op, children)
}

/// Every path from the root reaches exactly `depth` levels.
pub fn full_node<R: Rng + ?Sized>(rng: &mut R, depth: usize, n_features: usize) -> Node {
    if depth <= 1 {
        return random_leaf(rng, n_features);
    }
    let op = random_op(rng);
    with_children(rng, op, |r| full_node(r, depth - 1, n_features))
}

/// Below `max_depth`, each node is an operator or a leaf with equal odds.
/// With `force_op_root` the root is always an operator.
pub fn grow_node<R: Rng + ?Sized>(
    rng: &mut R,
    max_depth: usize,
    n_features: usize,
    force_op_root: bool,
) -> Node {
    if max_depth <= 1 || (!force_op_root && rng.gen_bool(0.5)) {
        return random_leaf(rng, n_features);
    }
    let op = random_op(rng);
    with_children(rng, op, |r| grow_node(r, max_depth - 1, n_features, false))
}

/// Generate with an explicit method and target depth.
pub fn random_tree_with<R: Rng + ?Sized>(
    rng: &mut R,
    method: GenMethod,
    target_depth: usize,
    n_features: usize,
) -> ExpressionTree {
    let target = target_depth.clamp(MIN_DEPTH, MAX_DEPTH);
    let node = match method {
        GenMethod::Full => full_node(rng, target, n_features),
        GenMethod::Grow => grow_node(rng, target, n_features, true),
        GenMethod::RampedHalfAndHalf => {
            if rng.gen_bool(0.5) {
                full_node(rng, target, n_features)
            } else {
                grow_node(rng, target, n_features, true)
            }
        }
    };
    ExpressionTree::new(node, n_features).expect("generator respects depth bounds")
}

/// Random valid tree with depth in `[config.min_depth, config.max_depth_init]`.
///
/// `Full` and `Grow` use `max_depth_init` as target depth; the ramped method
/// draws the target depth uniformly from the ramp and flips a coin between
/// `Full` and `Grow`.
pub fn random_tree<R: Rng + ?Sized>(
    rng: &mut R,
    config: &TreeGenConfig,
    n_features: usize,
) -> ExpressionTree {
    assert!(n_features >= 1, "need at least one feature");
    match config.method {
        GenMethod::RampedHalfAndHalf => {
            let depth = rng.gen_range(config.min_depth..=config.max_depth_init);
            random_tree_with(rng, GenMethod::RampedHalfAndHalf, depth, n_features)
        }
        m => random_tree_with(rng, m, config.max_depth_init, n_features),
    }
}
