//! Def-use edges over a parsed program.

use std::collections::HashMap;

use serde::Serialize;

use super::ast::{Call, Expr, ExprKind, Pos, Program, Stmt, StmtKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DefKind {
    Assign,
    LoopTarget,
    Param,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DefSite {
    Bound { kind: DefKind, pos: Pos },
    Unbound,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DataflowEdge {
    pub var: String,
    pub def: DefSite,
    pub use_pos: Pos,
}

/// Links each variable use to the most recent binding visible at that
/// point in program order. The reserved name `board` and called function
/// names are not tracked. Edges are sorted by use position.
pub fn extract_dataflow(program: &Program) -> Vec<DataflowEdge> {
    let mut w = Walker { scope: HashMap::new(), edges: Vec::new() };
    w.block(&program.body);
    w.edges.sort_by(|a, b| (a.use_pos, &a.var).cmp(&(b.use_pos, &b.var)));
    w.edges
}

struct Walker {
    scope: HashMap<String, DefSite>,
    edges: Vec<DataflowEdge>,
}

impl Walker {
    fn define(&mut self, name: &str, kind: DefKind, pos: Pos) {
        if name != "board" {
            self.scope.insert(name.to_string(), DefSite::Bound { kind, pos });
        }
    }

    fn block(&mut self, body: &[Stmt]) {
        for s in body {
            self.stmt(s);
        }
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::FunctionDef { params, body, .. } => {
                let saved = self.scope.clone();
                for p in params {
                    self.define(&p.name, DefKind::Param, p.pos);
                }
                self.block(body);
                self.scope = saved;
            }
            StmtKind::For { targets, iterable, body } => {
                self.expr(iterable);
                for t in targets {
                    self.define(&t.name, DefKind::LoopTarget, t.pos);
                }
                self.block(body);
            }
            StmtKind::If { condition, body } => {
                self.expr(condition);
                self.block(body);
            }
            StmtKind::Call(call) => self.call(call),
            StmtKind::Assign { target, value } => {
                self.expr(value);
                self.define(&target.name, DefKind::Assign, target.pos);
            }
        }
    }

    fn call(&mut self, call: &Call) {
        for a in &call.args {
            self.expr(a);
        }
        for k in &call.keywords {
            self.expr(&k.value);
        }
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Name(n) => {
                if n == "board" {
                    return;
                }
                let def = self.scope.get(n).copied().unwrap_or(DefSite::Unbound);
                self.edges.push(DataflowEdge { var: n.clone(), def, use_pos: e.pos });
            }
            ExprKind::IntLiteral(_) | ExprKind::StringLiteral(_) => {}
            ExprKind::ListLiteral(items)
            | ExprKind::TupleLiteral(items)
            | ExprKind::RangeCall(items)
            | ExprKind::ZipCall(items) => items.iter().for_each(|i| self.expr(i)),
            ExprKind::BinaryAdd(a, b) | ExprKind::Compare(a, b) => {
                self.expr(a);
                self.expr(b);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse;

    fn p(line: usize, col: usize) -> Pos {
        Pos { line, col }
    }

    fn bound(kind: DefKind, line: usize, col: usize) -> DefSite {
        DefSite::Bound { kind, pos: p(line, col) }
    }

    #[test]
    fn single_chain() {
        let prog = parse("x = 1\nput(board,'nut','red',x,0)").unwrap();
        let edges = extract_dataflow(&prog);
        assert_eq!(edges, vec![DataflowEdge { var: "x".into(), def: bound(DefKind::Assign, 1, 1), use_pos: p(2, 23) }]);
    }

    #[test]
    fn no_variables() {
        let prog = parse("put(board, 'nut', 'red', 0, 0)\nput(board, 'washer', 'blue', 0, 0)").unwrap();
        assert!(extract_dataflow(&prog).is_empty());
    }

    #[test]
    fn unbound_use() {
        let prog = parse("put(board, 'nut', 'red', q, 0)").unwrap();
        assert_eq!(extract_dataflow(&prog)[0].def, DefSite::Unbound);
    }

    #[test]
    fn stack_two_template_hand_traced() {
        let src = "\
def wn(board, colors, x, y):
    shapes = ['washer', 'nut']
    for shape, color in zip(shapes, colors):
        put(board, shape, color, x, y)
";
        //          1         2         3         4
        // 1234567890123456789012345678901234567890
        // def wn(board, colors, x, y):
        //     for shape, color in zip(shapes, colors):
        //         put(board, shape, color, x, y)
        let edges = extract_dataflow(&parse(src).unwrap());
        let expected = vec![
            DataflowEdge { var: "shapes".into(), def: bound(DefKind::Assign, 2, 5), use_pos: p(3, 29) },
            DataflowEdge { var: "colors".into(), def: bound(DefKind::Param, 1, 15), use_pos: p(3, 37) },
            DataflowEdge { var: "shape".into(), def: bound(DefKind::LoopTarget, 3, 9), use_pos: p(4, 20) },
            DataflowEdge { var: "color".into(), def: bound(DefKind::LoopTarget, 3, 16), use_pos: p(4, 27) },
            DataflowEdge { var: "x".into(), def: bound(DefKind::Param, 1, 23), use_pos: p(4, 34) },
            DataflowEdge { var: "y".into(), def: bound(DefKind::Param, 1, 26), use_pos: p(4, 37) },
        ];
        assert_eq!(edges, expected);
    }

    #[test]
    fn function_scope_does_not_leak() {
        let prog = parse("def f(x):\n    y = x\nput(board, 'nut', 'red', x, 0)").unwrap();
        let edges = extract_dataflow(&prog);
        assert_eq!(edges.last().unwrap().def, DefSite::Unbound);
    }
}
