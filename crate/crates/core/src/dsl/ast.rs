use std::fmt;

use serde::{Deserialize, Serialize};

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ident {
    pub name: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Program {
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stmt {
    pub pos: Pos,
    #[serde(flatten)]
    pub kind: StmtKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum StmtKind {
    FunctionDef { name: Ident, params: Vec<Ident>, body: Vec<Stmt> },
    For { targets: Vec<Ident>, iterable: Expr, body: Vec<Stmt> },
    If { condition: Expr, body: Vec<Stmt> },
    Call(Call),
    Assign { target: Ident, value: Expr },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Call {
    pub func: Ident,
    pub args: Vec<Expr>,
    pub keywords: Vec<Keyword>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Keyword {
    pub name: Ident,
    pub value: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expr {
    pub pos: Pos,
    #[serde(flatten)]
    pub kind: ExprKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value")]
pub enum ExprKind {
    IntLiteral(i64),
    StringLiteral(String),
    ListLiteral(Vec<Expr>),
    TupleLiteral(Vec<Expr>),
    Name(String),
    BinaryAdd(Box<Expr>, Box<Expr>),
    RangeCall(Vec<Expr>),
    ZipCall(Vec<Expr>),
    Compare(Box<Expr>, Box<Expr>),
}

impl StmtKind {
    pub fn type_name(&self) -> &'static str {
        match self {
            StmtKind::FunctionDef { .. } => "function_def",
            StmtKind::For { .. } => "for",
            StmtKind::If { .. } => "if",
            StmtKind::Call(_) => "call",
            StmtKind::Assign { .. } => "assign",
        }
    }
}

impl ExprKind {
    pub fn type_name(&self) -> &'static str {
        match self {
            ExprKind::IntLiteral(_) => "int",
            ExprKind::StringLiteral(_) => "string",
            ExprKind::ListLiteral(_) => "list",
            ExprKind::TupleLiteral(_) => "tuple",
            ExprKind::Name(_) => "name",
            ExprKind::BinaryAdd(..) => "add",
            ExprKind::RangeCall(_) => "range",
            ExprKind::ZipCall(_) => "zip",
            ExprKind::Compare(..) => "compare",
        }
    }
}

impl Program {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("AST serialization is infallible")
    }
}
