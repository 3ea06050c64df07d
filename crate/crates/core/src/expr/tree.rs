use std::fmt;

use super::ExprError;

/// Smallest depth a synthesized expression may have. A lone leaf has depth 1.
pub const MIN_DEPTH: usize = 2;
/// Largest depth any expression may reach during evolution.
pub const MAX_DEPTH: usize = 10;

/// The closed primitive set.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OperatorKind {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Log,
    Sqrt,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 7] = [
        OperatorKind::Add,
        OperatorKind::Sub,
        OperatorKind::Mul,
        OperatorKind::Div,
        OperatorKind::Neg,
        OperatorKind::Log,
        OperatorKind::Sqrt,
    ];
    pub const BINARY: [OperatorKind; 4] = [
        OperatorKind::Add,
        OperatorKind::Sub,
        OperatorKind::Mul,
        OperatorKind::Div,
    ];
    pub const UNARY: [OperatorKind; 3] = [OperatorKind::Neg, OperatorKind::Log, OperatorKind::Sqrt];

    pub fn arity(self) -> usize {
        match self {
            OperatorKind::Add | OperatorKind::Sub | OperatorKind::Mul | OperatorKind::Div => 2,
            OperatorKind::Neg | OperatorKind::Log | OperatorKind::Sqrt => 1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            OperatorKind::Add => "add",
            OperatorKind::Sub => "sub",
            OperatorKind::Mul => "mul",
            OperatorKind::Div => "div",
            OperatorKind::Neg => "neg",
            OperatorKind::Log => "log",
            OperatorKind::Sqrt => "sqrt",
        }
    }

    pub fn from_symbol(s: &str) -> Option<OperatorKind> {
        OperatorKind::ALL.iter().copied().find(|op| op.symbol() == s)
    }

    /// Operators sharing this operator's arity, excluding itself.
    pub fn same_arity_alternatives(self) -> Vec<OperatorKind> {
        let pool: &[OperatorKind] = if self.arity() == 2 {
            &OperatorKind::BINARY
        } else {
            &OperatorKind::UNARY
        };
        pool.iter().copied().filter(|&op| op != self).collect()
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A raw expression node. Nodes carry no depth guarantee; [`ExpressionTree`]
/// is the validated wrapper used as a genotype.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Leaf(usize),
    Op(OperatorKind, Vec<Node>),
}

impl Node {
    pub fn unary(op: OperatorKind, child: Node) -> Node {
        debug_assert_eq!(op.arity(), 1);
        Node::Op(op, vec![child])
    }

    pub fn binary(op: OperatorKind, left: Node, right: Node) -> Node {
        debug_assert_eq!(op.arity(), 2);
        Node::Op(op, vec![left, right])
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf(_) => 1,
            Node::Op(_, children) => 1 + children.iter().map(Node::depth).max().unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Node::Leaf(_) => 1,
            Node::Op(_, children) => 1 + children.iter().map(Node::size).sum::<usize>(),
        }
    }

    /// Node at preorder position `index` (root is 0).
    pub fn get(&self, index: usize) -> Option<&Node> {
        let mut remaining = index;
        self.get_inner(&mut remaining)
    }

    fn get_inner(&self, remaining: &mut usize) -> Option<&Node> {
        if *remaining == 0 {
            return Some(self);
        }
        *remaining -= 1;
        if let Node::Op(_, children) = self {
            for child in children {
                let size = child.size();
                if *remaining < size {
                    return child.get_inner(remaining);
                }
                *remaining -= size;
            }
        }
        None
    }

    /// Depth of the node at preorder position `index` (root is at level 1).
    pub fn level_of(&self, index: usize) -> Option<usize> {
        let mut remaining = index;
        self.level_inner(&mut remaining, 1)
    }

    fn level_inner(&self, remaining: &mut usize, level: usize) -> Option<usize> {
        if *remaining == 0 {
            return Some(level);
        }
        *remaining -= 1;
        if let Node::Op(_, children) = self {
            for child in children {
                let size = child.size();
                if *remaining < size {
                    return child.level_inner(remaining, level + 1);
                }
                *remaining -= size;
            }
        }
        None
    }

    /// Copy of `self` with the subtree at preorder `index` replaced.
    pub fn replace(&self, index: usize, replacement: Node) -> Option<Node> {
        let mut out = self.clone();
        let slot = out.get_mut(index)?;
        *slot = replacement;
        Some(out)
    }

    fn get_mut(&mut self, index: usize) -> Option<&mut Node> {
        if index == 0 {
            return Some(self);
        }
        let mut remaining = index - 1;
        if let Node::Op(_, children) = self {
            for child in children.iter_mut() {
                let size = child.size();
                if remaining < size {
                    return child.get_mut(remaining);
                }
                remaining -= size;
            }
        }
        None
    }

    /// Feature indices in preorder, with repetition.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            Node::Leaf(i) => out.push(*i),
            Node::Op(_, children) => children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    pub fn max_feature(&self) -> Option<usize> {
        self.leaves().into_iter().max()
    }

    /// Apply `f` to every leaf's feature index.
    pub fn map_leaves(&self, f: &impl Fn(usize) -> usize) -> Node {
        match self {
            Node::Leaf(i) => Node::Leaf(f(*i)),
            Node::Op(op, children) => {
                Node::Op(*op, children.iter().map(|c| c.map_leaves(f)).collect())
            }
        }
    }

    fn check_arity(&self) -> Result<(), ExprError> {
        if let Node::Op(op, children) = self {
            if children.len() != op.arity() {
                return Err(ExprError::Arity {
                    op: op.symbol().to_string(),
                    expected: op.arity(),
                    found: children.len(),
                });
            }
            for c in children {
                c.check_arity()?;
            }
        }
        Ok(())
    }
}

/// A validated expression genotype: depth in `[MIN_DEPTH, MAX_DEPTH]`,
/// correct arities and feature leaves only.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExpressionTree {
    root: Node,
}

impl ExpressionTree {
    /// Validates `root` against the depth bounds and the feature count.
    pub fn new(root: Node, n_features: usize) -> Result<Self, ExprError> {
        root.check_arity()?;
        let depth = root.depth();
        if !(MIN_DEPTH..=MAX_DEPTH).contains(&depth) {
            return Err(ExprError::Depth {
                depth,
                min: MIN_DEPTH,
                max: MAX_DEPTH,
            });
        }
        if let Some(max) = root.max_feature() {
            if max >= n_features {
                return Err(ExprError::FeatureIndex {
                    index: max,
                    n_features,
                });
            }
        }
        Ok(ExpressionTree { root })
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn into_root(self) -> Node {
        self.root
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn size(&self) -> usize {
        self.root.size()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use OperatorKind::*;

    fn nested() -> Node {
        // snip * (snip + meco) with snip = 0, meco = 1
        Node::binary(Mul, Node::Leaf(0), Node::binary(Add, Node::Leaf(0), Node::Leaf(1)))
    }

    #[test]
    fn leaf_depth_and_size() {
        let leaf = Node::Leaf(3);
        assert_eq!(leaf.depth(), 1);
        assert_eq!(leaf.size(), 1);
    }

    #[test]
    fn nested_tree_shape() {
        let t = ExpressionTree::new(nested(), 2).unwrap();
        assert_eq!(t.depth(), 3);
        assert_eq!(t.size(), 5);
    }

    #[test]
    fn lone_leaf_is_rejected() {
        assert!(matches!(
            ExpressionTree::new(Node::Leaf(0), 1),
            Err(ExprError::Depth { depth: 1, .. })
        ));
    }

    #[test]
    fn depth_eleven_is_rejected() {
        let mut n = Node::Leaf(0);
        for _ in 0..10 {
            n = Node::unary(Neg, n);
        }
        assert_eq!(n.depth(), 11);
        assert!(ExpressionTree::new(n, 1).is_err());
    }

    #[test]
    fn feature_index_out_of_range() {
        assert!(matches!(
            ExpressionTree::new(nested(), 1),
            Err(ExprError::FeatureIndex { index: 1, .. })
        ));
    }

    #[test]
    fn preorder_access_and_replace() {
        let n = nested();
        assert_eq!(n.get(0), Some(&n));
        assert_eq!(n.get(1), Some(&Node::Leaf(0)));
        assert_eq!(n.get(3), Some(&Node::Leaf(0)));
        assert_eq!(n.get(4), Some(&Node::Leaf(1)));
        assert_eq!(n.get(5), None);
        assert_eq!(n.level_of(0), Some(1));
        assert_eq!(n.level_of(4), Some(3));

        let r = n.replace(2, Node::Leaf(7)).unwrap();
        assert_eq!(r, Node::binary(Mul, Node::Leaf(0), Node::Leaf(7)));
        assert_eq!(n.replace(9, Node::Leaf(0)), None);
    }

    #[test]
    fn alternatives_keep_arity() {
        assert_eq!(Add.same_arity_alternatives(), vec![Sub, Mul, Div]);
        assert_eq!(Log.same_arity_alternatives(), vec![Neg, Sqrt]);
    }
}
