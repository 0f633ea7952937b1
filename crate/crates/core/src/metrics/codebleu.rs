//! CodeBLEU over put-programs.
//!
//! Four components: BLEU-4 over code tokens, the same with keyword-weighted
//! unigrams, syntax subtree overlap and def-use edge overlap. The syntax
//! and dataflow parts use the DSL parser, so they are zero for text that
//! does not parse.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dsl::ast::{Call, Expr, ExprKind, Stmt, StmtKind};
use crate::dsl::dataflow::{DataflowEdge, DefKind, DefSite};
use crate::dsl::{extract_dataflow, parse, Program};

pub const KEYWORDS: [&str; 8] = ["def", "for", "in", "if", "return", "range", "zip", "put"];
const KEYWORD_WEIGHT: f64 = 1.0;
const OTHER_WEIGHT: f64 = 0.2;
const SMOOTHING_EPSILON: f64 = 0.1;
const MAX_N: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodeBleuWeights {
    pub ngram: f64,
    pub weighted_ngram: f64,
    pub ast: f64,
    pub dataflow: f64,
}

impl Default for CodeBleuWeights {
    fn default() -> Self {
        CodeBleuWeights { ngram: 0.25, weighted_ngram: 0.25, ast: 0.25, dataflow: 0.25 }
    }
}

impl CodeBleuWeights {
    pub fn is_valid(&self) -> bool {
        let w = [self.ngram, self.weighted_ngram, self.ast, self.dataflow];
        w.iter().all(|x| x.is_finite() && *x >= 0.0) && (w.iter().sum::<f64>() - 1.0).abs() < 1e-9
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodeBleu {
    pub score: f64,
    pub ngram: f64,
    pub weighted_ngram: f64,
    pub ast: f64,
    /// `None` when the reference has no def-use edges; its weight is then
    /// spread over the other components.
    pub dataflow: Option<f64>,
}

/// Splits code into identifiers, integers, quoted strings and single
/// punctuation characters. Whitespace is dropped.
pub fn tokenize(code: &str) -> Vec<&str> {
    let bytes = code.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if b == b'\'' || b == b'"' {
            i += 1;
            while i < bytes.len() && bytes[i] != b && bytes[i] != b'\n' {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b {
                i += 1;
            }
        } else if b.is_ascii_alphabetic() || b == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
        } else if b.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        } else {
            i += code[i..].chars().next().map_or(1, char::len_utf8);
        }
        out.push(&code[start..i]);
    }
    out
}

fn ngram_counts<'t, 'a>(tokens: &'t [&'a str], n: usize) -> HashMap<&'t [&'a str], usize> {
    let mut m = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *m.entry(w).or_insert(0) += 1;
        }
    }
    m
}

fn token_weight(t: &str) -> f64 {
    if KEYWORDS.contains(&t) {
        KEYWORD_WEIGHT
    } else {
        OTHER_WEIGHT
    }
}

/// Clipped n-gram precision as (matched, total). With `weighted`, unigrams
/// count by keyword weight instead of 1.
fn precision(hyp: &[&str], reference: &[&str], n: usize, weighted: bool) -> (f64, f64) {
    let h = ngram_counts(hyp, n);
    let r = ngram_counts(reference, n);
    let mut matched = 0.0;
    let mut total = 0.0;
    for (gram, &count) in &h {
        let w = if weighted && n == 1 { token_weight(gram[0]) } else { 1.0 };
        let clipped = count.min(r.get(gram).copied().unwrap_or(0));
        matched += w * clipped as f64;
        total += w * count as f64;
    }
    (matched, total)
}

fn bleu(hyp: &[&str], reference: &[&str], weighted: bool) -> f64 {
    if hyp.is_empty() {
        return if reference.is_empty() { 1.0 } else { 0.0 };
    }
    let mut log_sum = 0.0;
    for n in 1..=MAX_N {
        let (matched, total) = precision(hyp, reference, n, weighted);
        let total = if total > 0.0 { total } else { 1.0 };
        let p = if matched > 0.0 { matched / total } else { SMOOTHING_EPSILON / total };
        log_sum += p.ln() / MAX_N as f64;
    }
    let (c, r) = (hyp.len() as f64, reference.len() as f64);
    let bp = if c > r { 1.0 } else { (1.0 - r / c).exp() };
    (bp * log_sum.exp()).clamp(0.0, 1.0)
}

/// A syntax node: its type and children. Leaves carry no children.
struct Node {
    label: &'static str,
    children: Vec<Node>,
}

impl Node {
    fn leaf(label: &'static str) -> Node {
        Node { label, children: Vec::new() }
    }

    fn sexp(&self) -> String {
        if self.children.is_empty() {
            return self.label.to_string();
        }
        let inner: Vec<String> = self.children.iter().map(Node::sexp).collect();
        format!("({} {})", self.label, inner.join(" "))
    }

    /// S-expressions of every node that has children.
    fn subtrees(&self, out: &mut Vec<String>) {
        if !self.children.is_empty() {
            out.push(self.sexp());
            for c in &self.children {
                c.subtrees(out);
            }
        }
    }
}

fn program_node(p: &Program) -> Node {
    Node { label: "Program", children: p.body.iter().map(stmt_node).collect() }
}

fn stmt_node(s: &Stmt) -> Node {
    match &s.kind {
        StmtKind::FunctionDef { params, body, .. } => {
            let mut children: Vec<Node> = params.iter().map(|_| Node::leaf("Param")).collect();
            children.extend(body.iter().map(stmt_node));
            Node { label: "FunctionDef", children }
        }
        StmtKind::For { targets, iterable, body } => {
            let mut children: Vec<Node> = targets.iter().map(|_| Node::leaf("Target")).collect();
            children.push(expr_node(iterable));
            children.extend(body.iter().map(stmt_node));
            Node { label: "For", children }
        }
        StmtKind::If { condition, body } => {
            let mut children = vec![expr_node(condition)];
            children.extend(body.iter().map(stmt_node));
            Node { label: "If", children }
        }
        StmtKind::Call(call) => call_node(call),
        StmtKind::Assign { value, .. } => {
            Node { label: "Assign", children: vec![Node::leaf("Target"), expr_node(value)] }
        }
    }
}

fn call_node(call: &Call) -> Node {
    let mut children = vec![Node::leaf("Name")];
    children.extend(call.args.iter().map(expr_node));
    children.extend(call.keywords.iter().map(|k| Node { label: "Keyword", children: vec![expr_node(&k.value)] }));
    Node { label: "Call", children }
}

fn expr_node(e: &Expr) -> Node {
    fn many(label: &'static str, items: &[Expr]) -> Node {
        Node { label, children: items.iter().map(expr_node).collect() }
    }
    match &e.kind {
        ExprKind::IntLiteral(_) => Node::leaf("IntLiteral"),
        ExprKind::StringLiteral(_) => Node::leaf("StringLiteral"),
        ExprKind::Name(_) => Node::leaf("Name"),
        ExprKind::ListLiteral(items) => many("ListLiteral", items),
        ExprKind::TupleLiteral(items) => many("TupleLiteral", items),
        ExprKind::RangeCall(items) => many("RangeCall", items),
        ExprKind::ZipCall(items) => many("ZipCall", items),
        ExprKind::BinaryAdd(a, b) => Node { label: "BinaryAdd", children: vec![expr_node(a), expr_node(b)] },
        ExprKind::Compare(a, b) => Node { label: "Compare", children: vec![expr_node(a), expr_node(b)] },
    }
}

/// Share of reference subtrees that also occur in the candidate.
fn ast_match(candidate: &Program, reference: &Program) -> f64 {
    let mut r = Vec::new();
    program_node(reference).subtrees(&mut r);
    if r.is_empty() {
        return 1.0;
    }
    let mut c = Vec::new();
    program_node(candidate).subtrees(&mut c);
    let c: std::collections::HashSet<String> = c.into_iter().collect();
    r.iter().filter(|s| c.contains(*s)).count() as f64 / r.len() as f64
}

/// Edges with variable names replaced by order of first appearance and
/// positions dropped.
fn normalized_edges(edges: &[DataflowEdge]) -> Vec<(usize, Option<DefKind>)> {
    let mut names: HashMap<&str, usize> = HashMap::new();
    edges
        .iter()
        .map(|e| {
            let next = names.len();
            let id = *names.entry(e.var.as_str()).or_insert(next);
            let kind = match e.def {
                DefSite::Bound { kind, .. } => Some(kind),
                DefSite::Unbound => None,
            };
            (id, kind)
        })
        .collect()
}

fn dataflow_match(candidate: &Program, reference: &Program) -> Option<f64> {
    let r = normalized_edges(&extract_dataflow(reference));
    if r.is_empty() {
        return None;
    }
    let mut pool: HashMap<(usize, Option<DefKind>), usize> = HashMap::new();
    for e in normalized_edges(&extract_dataflow(candidate)) {
        *pool.entry(e).or_insert(0) += 1;
    }
    let mut matched = 0usize;
    for e in &r {
        if let Some(n) = pool.get_mut(e).filter(|n| **n > 0) {
            *n -= 1;
            matched += 1;
        }
    }
    Some(matched as f64 / r.len() as f64)
}

/// Scores `generated` against `gold`. Invalid weights fall back to the
/// default equal weighting.
pub fn codebleu(generated: &str, gold: &str, weights: CodeBleuWeights) -> CodeBleu {
    let weights = if weights.is_valid() { weights } else { CodeBleuWeights::default() };
    let hyp = tokenize(generated);
    let reference = tokenize(gold);
    let ngram = bleu(&hyp, &reference, false);
    let weighted_ngram = bleu(&hyp, &reference, true);
    let (ast, dataflow) = match (parse(generated), parse(gold)) {
        (Ok(c), Ok(r)) => (ast_match(&c, &r), dataflow_match(&c, &r)),
        (Err(_), Ok(r)) => (0.0, if extract_dataflow(&r).is_empty() { None } else { Some(0.0) }),
        (_, Err(_)) => (0.0, None),
    };
    let mut total = weights.ngram * ngram + weights.weighted_ngram * weighted_ngram + weights.ast * ast;
    let mut weight_sum = weights.ngram + weights.weighted_ngram + weights.ast;
    if let Some(d) = dataflow {
        total += weights.dataflow * d;
        weight_sum += weights.dataflow;
    }
    let score = if weight_sum > 0.0 { (total / weight_sum).clamp(0.0, 1.0) } else { 0.0 };
    CodeBleu { score, ngram, weighted_ngram, ast, dataflow }
}
