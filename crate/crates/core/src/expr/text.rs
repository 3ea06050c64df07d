//! Prefix s-expression serialization and an infix pretty-printer.
//!
//! Canonical form: `(op child ...)` with lowercase feature names, single
//! spaces, no trailing whitespace. Example: `(mul snip (add snip meco))`.

use super::tree::{ExpressionTree, Node, OperatorKind};
use super::ExprError;

#[derive(Debug, Clone, PartialEq)]
enum Token<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in text.char_indices() {
        if ch == '(' || ch == ')' || ch.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(Token::Atom(&text[s..i]));
            }
            match ch {
                '(' => tokens.push(Token::Open),
                ')' => tokens.push(Token::Close),
                _ => {}
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push(Token::Atom(&text[s..]));
    }
    tokens
}

fn looks_numeric(atom: &str) -> bool {
    atom.parse::<f64>().is_ok()
}

struct Parser<'a, 'n> {
    tokens: Vec<Token<'a>>,
    pos: usize,
    feature_names: &'n [String],
}

impl<'a> Parser<'a, '_> {
    fn next(&mut self) -> Option<Token<'a>> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn leaf(&self, atom: &str) -> Result<Node, ExprError> {
        if looks_numeric(atom) {
            return Err(ExprError::Constant(atom.to_string()));
        }
        if OperatorKind::from_symbol(atom).is_some() {
            return Err(ExprError::Syntax(format!(
                "operator `{atom}` used without parentheses"
            )));
        }
        self.feature_names
            .iter()
            .position(|n| n == atom)
            .map(Node::Leaf)
            .ok_or_else(|| ExprError::UnknownSymbol(atom.to_string()))
    }

    fn node(&mut self) -> Result<Node, ExprError> {
        match self.next() {
            None => Err(ExprError::Syntax("unexpected end of input".into())),
            Some(Token::Close) => Err(ExprError::Syntax("unexpected `)`".into())),
            Some(Token::Atom(a)) => self.leaf(a),
            Some(Token::Open) => {
                let head = match self.next() {
                    Some(Token::Atom(a)) => a,
                    _ => return Err(ExprError::Syntax("expected operator after `(`".into())),
                };
                let op = OperatorKind::from_symbol(head).ok_or_else(|| {
                    if looks_numeric(head) {
                        ExprError::Constant(head.to_string())
                    } else {
                        ExprError::UnknownSymbol(head.to_string())
                    }
                })?;
                let mut children = Vec::new();
                loop {
                    match self.tokens.get(self.pos) {
                        Some(Token::Close) => {
                            self.pos += 1;
                            break;
                        }
                        None => return Err(ExprError::Syntax("missing `)`".into())),
                        _ => children.push(self.node()?),
                    }
                }
                if children.len() != op.arity() {
                    return Err(ExprError::Arity {
                        op: head.to_string(),
                        expected: op.arity(),
                        found: children.len(),
                    });
                }
                Ok(Node::Op(op, children))
            }
        }
    }
}

/// Parse without the depth check. Used for baseline pass-through proxies and
/// for the building blocks of variation operators.
pub fn parse_node(text: &str, feature_names: &[String]) -> Result<Node, ExprError> {
    let mut parser = Parser {
        tokens: tokenize(text),
        pos: 0,
        feature_names,
    };
    let node = parser.node()?;
    if parser.pos < parser.tokens.len() {
        return Err(ExprError::Syntax("trailing input after expression".into()));
    }
    Ok(node)
}

/// Parse a canonical prefix s-expression into a validated tree.
pub fn parse(text: &str, feature_names: &[String]) -> Result<ExpressionTree, ExprError> {
    let node = parse_node(text, feature_names)?;
    ExpressionTree::new(node, feature_names.len())
}

pub fn print_node(node: &Node, feature_names: &[String]) -> String {
    let mut out = String::new();
    write_prefix(node, feature_names, &mut out);
    out
}

fn write_prefix(node: &Node, names: &[String], out: &mut String) {
    match node {
        Node::Leaf(i) => out.push_str(&names[*i]),
        Node::Op(op, children) => {
            out.push('(');
            out.push_str(op.symbol());
            for c in children {
                out.push(' ');
                write_prefix(c, names, out);
            }
            out.push(')');
        }
    }
}

pub fn print_canonical(tree: &ExpressionTree, feature_names: &[String]) -> String {
    print_node(tree.root(), feature_names)
}

fn precedence(node: &Node) -> u8 {
    match node {
        Node::Leaf(_) => 4,
        Node::Op(OperatorKind::Add | OperatorKind::Sub, _) => 1,
        Node::Op(OperatorKind::Mul | OperatorKind::Div, _) => 2,
        Node::Op(OperatorKind::Neg, _) => 3,
        Node::Op(OperatorKind::Log | OperatorKind::Sqrt, _) => 4,
    }
}

/// Infix rendering with the fewest parentheses that keep the meaning,
/// e.g. `snip * (snip + meco)`.
pub fn print_infix(node: &Node, feature_names: &[String]) -> String {
    match node {
        Node::Leaf(i) => feature_names[*i].clone(),
        Node::Op(op, children) => match op {
            OperatorKind::Log | OperatorKind::Sqrt => {
                format!("{}({})", op.symbol(), print_infix(&children[0], feature_names))
            }
            OperatorKind::Neg => {
                let inner = print_infix(&children[0], feature_names);
                if precedence(&children[0]) <= 3 {
                    format!("-({inner})")
                } else {
                    format!("-{inner}")
                }
            }
            _ => {
                let prec = precedence(node);
                let sym = match op {
                    OperatorKind::Add => "+",
                    OperatorKind::Sub => "-",
                    OperatorKind::Mul => "*",
                    _ => "/",
                };
                let left = print_infix(&children[0], feature_names);
                let right = print_infix(&children[1], feature_names);
                let lp = precedence(&children[0]);
                let rp = precedence(&children[1]);
                let left = if lp < prec { format!("({left})") } else { left };
                let non_assoc = matches!(op, OperatorKind::Sub | OperatorKind::Div);
                let negated = matches!(children[1], Node::Op(OperatorKind::Neg, _));
                let right = if rp < prec || (rp == prec && non_assoc) || negated {
                    format!("({right})")
                } else {
                    right
                };
                format!("{left} {sym} {right}")
            }
        },
    }
}

/// One parsed line of an expression file.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionLine {
    pub line: usize,
    pub tree: ExpressionTree,
}

/// Parse an expression file: one s-expression per line, `#` starts a
/// comment, blank lines are skipped. Errors carry 1-based line numbers.
pub fn parse_expression_file(
    contents: &str,
    feature_names: &[String],
) -> Result<Vec<ExpressionLine>, ExprError> {
    let mut out = Vec::new();
    for (i, raw) in contents.lines().enumerate() {
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let tree = parse(text, feature_names).map_err(|e| ExprError::AtLine {
            line: i + 1,
            source: Box::new(e),
        })?;
        out.push(ExpressionLine { line: i + 1, tree });
    }
    Ok(out)
}
