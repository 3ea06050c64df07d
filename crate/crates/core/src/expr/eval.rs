//! Protected evaluation.
//!
//! * `div(a, b) = a / b` when `|b| > 1e-6`, otherwise `1.0`
//! * `log(x) = ln|x|` when `|x| > 1e-6`, otherwise `0.0`
//! * `sqrt(x) = sqrt|x|`
//!
//! If any intermediate value leaves the finite range the whole evaluation
//! yields [`NON_FINITE`]; penalizing that is the fitness layer's job.

use super::tree::{ExpressionTree, Node, OperatorKind};
use super::ExprError;
use crate::matrix::FeatureMatrix;

pub const PROTECTION_EPS: f64 = 1e-6;

/// Marker returned when protection could not keep a value finite.
pub const NON_FINITE: f64 = f64::NAN;

/// Apply one primitive. Non-finite inputs or outputs collapse to [`NON_FINITE`].
#[inline]
pub fn apply(op: OperatorKind, a: f64, b: f64) -> f64 {
    if !a.is_finite() || (op.arity() == 2 && !b.is_finite()) {
        return NON_FINITE;
    }
    let v = match op {
        OperatorKind::Add => a + b,
        OperatorKind::Sub => a - b,
        OperatorKind::Mul => a * b,
        OperatorKind::Div => {
            if b.abs() > PROTECTION_EPS {
                a / b
            } else {
                1.0
            }
        }
        OperatorKind::Neg => -a,
        OperatorKind::Log => {
            if a.abs() > PROTECTION_EPS {
                a.abs().ln()
            } else {
                0.0
            }
        }
        OperatorKind::Sqrt => a.abs().sqrt(),
    };
    if v.is_finite() {
        v
    } else {
        NON_FINITE
    }
}

pub(crate) fn eval_node(node: &Node, row: &[f64]) -> f64 {
    match node {
        Node::Leaf(i) => row[*i],
        Node::Op(op, children) => {
            let a = eval_node(&children[0], row);
            let b = if op.arity() == 2 {
                eval_node(&children[1], row)
            } else {
                0.0
            };
            apply(*op, a, b)
        }
    }
}

/// Evaluate on a single feature row. May return [`NON_FINITE`].
pub fn evaluate(tree: &ExpressionTree, features: &[f64]) -> Result<f64, ExprError> {
    evaluate_node(tree.root(), features)
}

/// Like [`evaluate`] but for unvalidated nodes (e.g. depth-1 baselines).
pub fn evaluate_node(node: &Node, features: &[f64]) -> Result<f64, ExprError> {
    check_width(node, features.len())?;
    Ok(eval_node(node, features))
}

fn check_width(node: &Node, width: usize) -> Result<(), ExprError> {
    match node.max_feature() {
        Some(m) if m >= width => Err(ExprError::Width {
            needed: m + 1,
            found: width,
        }),
        _ => Ok(()),
    }
}

/// Column-wise evaluation over every row of `matrix`.
pub fn evaluate_batch(tree: &ExpressionTree, matrix: &FeatureMatrix) -> Result<Vec<f64>, ExprError> {
    evaluate_node_batch(tree.root(), matrix)
}

pub fn evaluate_node_batch(node: &Node, matrix: &FeatureMatrix) -> Result<Vec<f64>, ExprError> {
    if node.max_feature().is_some_and(|m| m >= matrix.n_cols()) {
        return Err(ExprError::Width {
            needed: node.max_feature().unwrap_or(0) + 1,
            found: matrix.n_cols(),
        });
    }
    Ok(batch(node, matrix))
}

fn batch(node: &Node, matrix: &FeatureMatrix) -> Vec<f64> {
    match node {
        Node::Leaf(i) => matrix.column(*i).to_vec(),
        Node::Op(op, children) => {
            let mut a = batch(&children[0], matrix);
            if op.arity() == 2 {
                let b = batch(&children[1], matrix);
                for (x, y) in a.iter_mut().zip(b) {
                    *x = apply(*op, *x, y);
                }
            } else {
                for x in a.iter_mut() {
                    *x = apply(*op, *x, 0.0);
                }
            }
            a
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn add_two_features() {
        let f = names(&["snip", "meco"]);
        let t = parse("(add snip meco)", &f).unwrap();
        assert_eq!(evaluate(&t, &[2.0, 3.0]).unwrap(), 5.0);
    }

    #[test]
    fn protected_division() {
        let f = names(&["snip", "meco"]);
        let t = parse("(div snip meco)", &f).unwrap();
        assert_eq!(evaluate(&t, &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(evaluate(&t, &[1.0, 1e-7]).unwrap(), 1.0);
        assert_eq!(evaluate(&t, &[1.0, -2.0]).unwrap(), -0.5);
    }

    #[test]
    fn protected_log_and_sqrt() {
        assert_eq!(apply(OperatorKind::Log, 0.0, 0.0), 0.0);
        assert_eq!(apply(OperatorKind::Log, -std::f64::consts::E, 0.0), 1.0);
        assert_eq!(apply(OperatorKind::Sqrt, -4.0, 0.0), 2.0);
        assert_eq!(apply(OperatorKind::Neg, 4.0, 0.0), -4.0);
    }

    #[test]
    fn overflow_yields_marker() {
        let f = names(&["a"]);
        let t = parse("(mul (mul a a) (mul a a))", &f).unwrap();
        assert!(evaluate(&t, &[1e100]).unwrap().is_nan());
        // The marker must survive the protected guards further up.
        let t = parse("(div a (mul (mul a a) (mul a a)))", &f).unwrap();
        assert!(evaluate(&t, &[1e100]).unwrap().is_nan());
        let t = parse("(log (mul (mul a a) (mul a a)))", &f).unwrap();
        assert!(evaluate(&t, &[1e100]).unwrap().is_nan());
    }

    #[test]
    fn width_mismatch() {
        let f = names(&["a", "b"]);
        let t = parse("(add a b)", &f).unwrap();
        assert!(matches!(evaluate(&t, &[1.0]), Err(ExprError::Width { .. })));
        let m = FeatureMatrix::from_rows(&[vec![1.0]]).unwrap();
        assert!(evaluate_batch(&t, &m).is_err());
    }

    #[test]
    fn batch_neg_and_empty() {
        let f = names(&["snip", "meco"]);
        let t = parse("(neg meco)", &f).unwrap();
        let m = FeatureMatrix::from_rows(&[vec![0.0, 1.0], vec![0.0, -2.5], vec![9.0, 3.0]])
            .unwrap();
        assert_eq!(evaluate_batch(&t, &m).unwrap(), vec![-1.0, 2.5, -3.0]);
        let empty = FeatureMatrix::empty(2);
        assert!(evaluate_batch(&t, &empty).unwrap().is_empty());
    }
}
