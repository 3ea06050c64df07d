//! Crossover and the three mutations. Every operator re-validates its output
//! against the depth bounds, retries a few times, and otherwise hands back
//! the input unchanged.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::expr::{grow_node, ExpressionTree, Node, MAX_DEPTH, MIN_DEPTH};

/// Attempts before a variation operator gives up and returns its input.
pub const MAX_ATTEMPTS: usize = 10;

/// Depth cap of the fresh subtree grown by subtree mutation.
pub const SUBTREE_MUTATION_DEPTH: usize = 4;

fn depth_ok(node: &Node) -> bool {
    (MIN_DEPTH..=MAX_DEPTH).contains(&node.depth())
}

fn into_tree(node: Node) -> ExpressionTree {
    // leaves are drawn from existing trees or from `0..n_features`
    ExpressionTree::new(node, usize::MAX).expect("depth checked before wrapping")
}

/// Swap the subtree at preorder `i` of `a` with the one at `j` of `b`.
pub fn crossover_at(a: &Node, b: &Node, i: usize, j: usize) -> Option<(Node, Node)> {
    let sa = a.get(i)?.clone();
    let sb = b.get(j)?.clone();
    Some((a.replace(i, sb)?, b.replace(j, sa)?))
}

pub fn crossover<R: Rng + ?Sized>(
    a: &ExpressionTree,
    b: &ExpressionTree,
    rng: &mut R,
) -> (ExpressionTree, ExpressionTree) {
    let (na, nb) = (a.root(), b.root());
    for attempt in 0..MAX_ATTEMPTS {
        let i = rng.gen_range(0..na.size());
        let j = rng.gen_range(0..nb.size());
        let (c1, c2) = crossover_at(na, nb, i, j).expect("indices drawn within size");
        let (ok1, ok2) = (depth_ok(&c1), depth_ok(&c2));
        if ok1 && ok2 {
            return (into_tree(c1), into_tree(c2));
        }
        if attempt + 1 == MAX_ATTEMPTS {
            let c1 = if ok1 { into_tree(c1) } else { a.clone() };
            let c2 = if ok2 { into_tree(c2) } else { b.clone() };
            return (c1, c2);
        }
    }
    unreachable!("loop returns on its last attempt")
}

fn retry<R: Rng + ?Sized>(
    tree: &ExpressionTree,
    rng: &mut R,
    mut attempt: impl FnMut(&Node, &mut R) -> Option<Node>,
) -> ExpressionTree {
    for _ in 0..MAX_ATTEMPTS {
        if let Some(node) = attempt(tree.root(), rng) {
            if depth_ok(&node) {
                return into_tree(node);
            }
        }
    }
    tree.clone()
}

/// Replace a uniformly chosen subtree with a fresh `grow` tree of depth at
/// most [`SUBTREE_MUTATION_DEPTH`].
pub fn subtree_mutation<R: Rng + ?Sized>(
    tree: &ExpressionTree,
    n_features: usize,
    rng: &mut R,
) -> ExpressionTree {
    retry(tree, rng, |root, rng| {
        let i = rng.gen_range(0..root.size());
        let fresh = grow_node(rng, SUBTREE_MUTATION_DEPTH, n_features, false);
        root.replace(i, fresh)
    })
}

/// Replace the subtree at `s` with its own descendant at relative preorder
/// position `inner` (0 keeps `s` itself).
pub fn hoist_at(root: &Node, s: usize, inner: usize) -> Option<Node> {
    let hoisted = root.get(s)?.get(inner)?.clone();
    root.replace(s, hoisted)
}

pub fn hoist_mutation<R: Rng + ?Sized>(tree: &ExpressionTree, rng: &mut R) -> ExpressionTree {
    retry(tree, rng, |root, rng| {
        let s = rng.gen_range(0..root.size());
        let inner = rng.gen_range(0..root.get(s)?.size());
        hoist_at(root, s, inner)
    })
}

/// Replace the node at `index` in place: an operator by a different operator
/// of the same arity, a leaf by a different feature (when one exists).
pub fn point_at<R: Rng + ?Sized>(
    root: &Node,
    index: usize,
    n_features: usize,
    rng: &mut R,
) -> Option<Node> {
    let replacement = match root.get(index)? {
        Node::Leaf(f) => {
            if n_features <= 1 {
                Node::Leaf(*f)
            } else {
                let mut g = rng.gen_range(0..n_features - 1);
                if g >= *f {
                    g += 1;
                }
                Node::Leaf(g)
            }
        }
        Node::Op(op, children) => {
            let alt = *op.same_arity_alternatives().choose(rng)?;
            Node::Op(alt, children.clone())
        }
    };
    root.replace(index, replacement)
}

pub fn point_mutation<R: Rng + ?Sized>(
    tree: &ExpressionTree,
    n_features: usize,
    rng: &mut R,
) -> ExpressionTree {
    retry(tree, rng, |root, rng| {
        let i = rng.gen_range(0..root.size());
        point_at(root, i, n_features, rng)
    })
}
