//! Named proxies and the evaluation harness built on them.

mod report;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{parse, parse_node, print_node, ExprError, ExpressionTree, Node};
use crate::fitness::FitnessError;

pub use report::{evaluate_report, ReportFormat, ReportRow, ReportTable};

/// The hand-crafted metrics, by feature name.
pub const BASELINE_FEATURES: [&str; 16] = [
    "flops", "params", "jacov", "nwot", "synflow", "snip", "epe_nas", "fisher", "grad_norm",
    "grasp", "l2_norm", "zen", "plain", "zico", "meco", "swap",
];

/// `zico * meco^2 * log(flops) / ((meco + zen) * (sqrt(snip) * (meco + zen + 2 * l2_norm) + meco))`.
/// The constant factor 2 is written as `l2_norm + l2_norm`.
pub const EQ2_EXPR: &str = "(div (mul (mul zico (mul meco meco)) (log flops)) \
(mul (add meco zen) (add (mul (sqrt snip) (add (add meco zen) (add l2_norm l2_norm))) meco)))";

/// `zico / l2_norm * sqrt(meco)`: the best tree of the first generation.
pub const EQ3_EXPR: &str = "(mul (div zico l2_norm) (sqrt meco))";

pub const EQ2_NAME: &str = "sr-nas-eq2";
pub const EQ3_NAME: &str = "sr-nas-eq3";

#[derive(Debug, Error)]
pub enum ZooError {
    #[error("unknown proxy `{name}`; known proxies: {}", registry().join(", "))]
    UnknownProxy { name: String },
    #[error("proxy `{proxy}` needs feature `{feature}`, which the dataset lacks")]
    MissingFeature { proxy: String, feature: String },
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("no proxies to evaluate")]
    NoProxies,
    #[error("duplicate proxy name `{0}`")]
    DuplicateName(String),
    #[error("proxy `{proxy}`: {source}")]
    Fitness {
        proxy: String,
        #[source]
        source: FitnessError,
    },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Every registry name: the 16 baselines, then the evolved fixtures.
pub fn registry() -> Vec<&'static str> {
    BASELINE_FEATURES
        .iter()
        .copied()
        .chain([EQ2_NAME, EQ3_NAME])
        .collect()
}

/// A proxy bound to a concrete feature space.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedProxy {
    pub name: String,
    pub kind: ProxyKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProxyKind {
    /// A raw feature column. Baselines are exempt from the minimum depth.
    Feature(usize),
    Tree(ExpressionTree),
}

impl NamedProxy {
    pub fn feature(name: impl Into<String>, index: usize) -> Self {
        NamedProxy {
            name: name.into(),
            kind: ProxyKind::Feature(index),
        }
    }

    pub fn tree(name: impl Into<String>, tree: ExpressionTree) -> Self {
        NamedProxy {
            name: name.into(),
            kind: ProxyKind::Tree(tree),
        }
    }

    pub fn node(&self) -> Node {
        match &self.kind {
            ProxyKind::Feature(i) => Node::Leaf(*i),
            ProxyKind::Tree(t) => t.root().clone(),
        }
    }

    pub fn expression(&self, feature_names: &[String]) -> String {
        print_node(&self.node(), feature_names)
    }
}

fn missing_feature(proxy: &str, err: ExprError) -> ZooError {
    match err {
        ExprError::UnknownSymbol(feature) => ZooError::MissingFeature {
            proxy: proxy.to_string(),
            feature,
        },
        other => ZooError::Expr(other),
    }
}

/// Look up a registry proxy and bind it to `feature_names`.
pub fn builtin_proxy(name: &str, feature_names: &[String]) -> Result<NamedProxy, ZooError> {
    let text = match name {
        EQ2_NAME => EQ2_EXPR,
        EQ3_NAME => EQ3_EXPR,
        n if BASELINE_FEATURES.contains(&n) => {
            let idx = feature_names
                .iter()
                .position(|f| f == n)
                .ok_or_else(|| ZooError::MissingFeature {
                    proxy: n.to_string(),
                    feature: n.to_string(),
                })?;
            return Ok(NamedProxy::feature(n, idx));
        }
        _ => {
            return Err(ZooError::UnknownProxy {
                name: name.to_string(),
            })
        }
    };
    let tree = parse(text, feature_names).map_err(|e| missing_feature(name, e))?;
    Ok(NamedProxy::tree(name, tree))
}

/// Resolve a proxy name: a registry entry, or any feature column of the
/// dataset as a pass-through baseline.
pub fn resolve_proxy(name: &str, feature_names: &[String]) -> Result<NamedProxy, ZooError> {
    match builtin_proxy(name, feature_names) {
        Err(ZooError::UnknownProxy { .. }) => feature_names
            .iter()
            .position(|f| f == name)
            .map(|i| NamedProxy::feature(name, i))
            .ok_or_else(|| ZooError::UnknownProxy {
                name: name.to_string(),
            }),
        other => other,
    }
}

/// A proxy from an s-expression, e.g. one line of an expression file.
/// Depth-1 expressions are accepted as pass-through baselines.
pub fn proxy_from_expression(
    name: impl Into<String>,
    text: &str,
    feature_names: &[String],
) -> Result<NamedProxy, ZooError> {
    let node = parse_node(text, feature_names)?;
    Ok(match node {
        Node::Leaf(i) => NamedProxy::feature(name, i),
        node => NamedProxy::tree(name, ExpressionTree::new(node, feature_names.len())?),
    })
}

/// How many expressions use each feature at least once, in feature order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureFrequency {
    pub counts: Vec<(String, usize)>,
}

impl FeatureFrequency {
    pub fn get(&self, feature: &str) -> usize {
        self.counts
            .iter()
            .find(|(f, _)| f == feature)
            .map_or(0, |(_, c)| *c)
    }
}

pub fn feature_frequency(expressions: &[ExpressionTree], feature_names: &[String]) -> FeatureFrequency {
    let mut counts = vec![0usize; feature_names.len()];
    for e in expressions {
        let mut used = vec![false; feature_names.len()];
        for leaf in e.root().leaves() {
            used[leaf] = true;
        }
        for (c, u) in counts.iter_mut().zip(used) {
            *c += usize::from(u);
        }
    }
    FeatureFrequency {
        counts: feature_names.iter().cloned().zip(counts).collect(),
    }
}

/// Replace every `from` leaf with `to`; nothing else changes.
pub fn substitute_feature(
    tree: &ExpressionTree,
    from: &str,
    to: &str,
    feature_names: &[String],
) -> Result<ExpressionTree, ZooError> {
    let idx = |f: &str| {
        feature_names
            .iter()
            .position(|n| n == f)
            .ok_or_else(|| ZooError::UnknownFeature(f.to_string()))
    };
    let (from, to) = (idx(from)?, idx(to)?);
    let node = tree.root().map_leaves(&|i| if i == from { to } else { i });
    Ok(ExpressionTree::new(node, feature_names.len())?)
}
