//! Expression-tree genotype: operators, text forms, protected evaluation
//! and random generation.

mod eval;
mod gen;
mod text;
mod tree;

use thiserror::Error;

pub use eval::{
    apply, evaluate, evaluate_batch, evaluate_node, evaluate_node_batch, NON_FINITE,
    PROTECTION_EPS,
};
pub use gen::{full_node, grow_node, random_tree, random_tree_with, GenMethod, TreeGenConfig};
pub use text::{
    parse, parse_expression_file, parse_node, print_canonical, print_infix, print_node,
    ExpressionLine,
};
pub use tree::{ExpressionTree, Node, OperatorKind, MAX_DEPTH, MIN_DEPTH};

#[derive(Debug, Error, PartialEq)]
pub enum ExprError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("constant `{0}` is not allowed; leaves must be features")]
    Constant(String),
    #[error("operator `{op}` takes {expected} argument(s), found {found}")]
    Arity {
        op: String,
        expected: usize,
        found: usize,
    },
    #[error("tree depth {depth} outside [{min}, {max}]")]
    Depth { depth: usize, min: usize, max: usize },
    #[error("feature index {index} out of range for {n_features} features")]
    FeatureIndex { index: usize, n_features: usize },
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("feature row has {found} values, expression needs at least {needed}")]
    Width { needed: usize, found: usize },
    #[error("{0}")]
    Config(String),
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<ExprError>,
    },
}
