//! Tree-walking interpreter.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::ast::{Call, Expr, ExprKind, Pos, Program, Stmt, StmtKind};
use super::parser::parse;
use crate::grid::Board;
use crate::taxonomy::ErrorCategory;

pub const DEFAULT_STEP_BUDGET: u64 = 100_000;
/// Combined limit on call depth and block nesting at run time.
pub const DEFAULT_MAX_DEPTH: usize = 200;
/// Values may not nest deeper than this (lists of lists, zips of zips).
const MAX_VALUE_DEPTH: u16 = 32;

const KEYWORD_WHITELIST: &[&str] = &["board", "shape", "color", "x", "y", "colors"];
const PUT_PARAMS: [&str; 5] = ["board", "shape", "color", "x", "y"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Put,
    Range,
    Zip,
}

impl Builtin {
    fn lookup(name: &str) -> Option<Builtin> {
        match name {
            "put" => Some(Builtin::Put),
            "range" => Some(Builtin::Range),
            "zip" => Some(Builtin::Zip),
            _ => None,
        }
    }
}

#[derive(Debug)]
pub struct UserFn {
    pub name: String,
    pub params: Vec<String>,
    pub body: Vec<Stmt>,
}

#[derive(Debug)]
pub struct Seq {
    items: Vec<Value>,
    depth: u16,
}

impl Seq {
    pub fn items(&self) -> &[Value] {
        &self.items
    }
}

/// Runtime value. Containers are shared, so copying a value is cheap.
#[derive(Debug, Clone)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Str(Arc<str>),
    List(Arc<Seq>),
    Tuple(Arc<Seq>),
    Range {
        start: i64,
        stop: i64,
        step: i64,
    },
    Zip(Arc<Seq>),
    /// The board handle. Only one exists per execution.
    Board,
    Function(Arc<UserFn>),
    Builtin(Builtin),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "int",
            Value::Bool(_) => "bool",
            Value::Str(_) => "str",
            Value::List(_) => "list",
            Value::Tuple(_) => "tuple",
            Value::Range { .. } => "range",
            Value::Zip(_) => "zip",
            Value::Board => "board",
            Value::Function(_) | Value::Builtin(_) => "function",
        }
    }

    fn depth(&self) -> u16 {
        match self {
            Value::List(s) | Value::Tuple(s) | Value::Zip(s) => s.depth,
            _ => 0,
        }
    }

    fn is_iterable(&self) -> bool {
        matches!(self, Value::List(_) | Value::Tuple(_) | Value::Str(_) | Value::Range { .. } | Value::Zip(_))
    }

    fn truthy(&self) -> bool {
        match self {
            Value::Int(v) => *v != 0,
            Value::Bool(b) => *b,
            Value::Str(s) => !s.is_empty(),
            Value::List(s) | Value::Tuple(s) => !s.items.is_empty(),
            Value::Range { start, stop, step } => range_len(*start, *stop, *step) > 0,
            _ => true,
        }
    }
}

fn range_len(start: i64, stop: i64, step: i64) -> i128 {
    let (start, stop, step) = (start as i128, stop as i128, step as i128);
    if step > 0 && start < stop {
        (stop - start + step - 1) / step
    } else if step < 0 && start > stop {
        (start - stop - step - 1) / -step
    } else {
        0
    }
}

/// A successful `put` call, recorded when tracing is on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TracedPut {
    pub shape: String,
    pub color: String,
    pub x: i64,
    pub y: i64,
}

impl TracedPut {
    pub fn to_code(&self) -> String {
        format!("put(board, '{}', '{}', {}, {})", self.shape, self.color, self.x, self.y)
    }
}

#[derive(Debug, Clone)]
pub struct ExecEnv {
    pub bindings: HashMap<String, Value>,
    pub defined_functions: HashMap<String, Arc<UserFn>>,
    pub step_budget: u64,
    pub max_depth: usize,
    pub trace: bool,
}

impl Default for ExecEnv {
    fn default() -> Self {
        ExecEnv {
            bindings: HashMap::new(),
            defined_functions: HashMap::new(),
            step_budget: DEFAULT_STEP_BUDGET,
            max_depth: DEFAULT_MAX_DEPTH,
            trace: false,
        }
    }
}

impl ExecEnv {
    pub fn tracing() -> Self {
        ExecEnv { trace: true, ..ExecEnv::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecFailure {
    pub category: ErrorCategory,
    pub message: String,
    pub pos: Option<Pos>,
}

impl fmt::Display for ExecFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pos {
            Some(p) => write!(f, "{} at {}: {}", self.category, p, self.message),
            None => write!(f, "{}: {}", self.category, self.message),
        }
    }
}

/// Result of running a program. On failure `board` holds whatever was
/// placed before the error.
#[derive(Debug, Clone)]
pub struct ExecOutcome {
    pub board: Board,
    pub failure: Option<ExecFailure>,
    pub trace: Vec<TracedPut>,
    pub steps: u64,
}

impl ExecOutcome {
    pub fn is_success(&self) -> bool {
        self.failure.is_none()
    }

    pub fn category(&self) -> Option<ErrorCategory> {
        self.failure.as_ref().map(|f| f.category)
    }
}

pub fn execute(program: &Program, board: Board, env: &ExecEnv) -> ExecOutcome {
    let mut it = Interp {
        board,
        globals: env.bindings.clone(),
        functions: &env.defined_functions,
        frames: Vec::new(),
        steps: 0,
        budget: env.step_budget,
        max_depth: env.max_depth,
        depth: 0,
        trace: env.trace.then(Vec::new),
    };
    let failure = it.exec_block(&program.body).err();
    ExecOutcome { board: it.board, failure, trace: it.trace.unwrap_or_default(), steps: it.steps }
}

/// Parses and runs `source` on an empty board. Syntax errors become a
/// failed outcome.
pub fn run_source(source: &str, env: &ExecEnv) -> ExecOutcome {
    match parse(source) {
        Ok(program) => execute(&program, Board::new(), env),
        Err(e) => ExecOutcome {
            board: Board::new(),
            failure: Some(ExecFailure { category: ErrorCategory::Syntax, message: e.message, pos: Some(e.pos) }),
            trace: Vec::new(),
            steps: 0,
        },
    }
}

type Flow<T = ()> = Result<T, ExecFailure>;

fn fail<T>(category: ErrorCategory, message: impl Into<String>, pos: Pos) -> Flow<T> {
    Err(ExecFailure { category, message: message.into(), pos: Some(pos) })
}

enum Cursor {
    Seq(Arc<Seq>, usize),
    Chars(Vec<char>, usize),
    Range { next: i128, stop: i128, step: i128 },
    Zip(Vec<Cursor>),
}

impl Cursor {
    fn new(v: &Value) -> Option<Cursor> {
        Some(match v {
            Value::List(s) | Value::Tuple(s) => Cursor::Seq(s.clone(), 0),
            Value::Str(s) => Cursor::Chars(s.chars().collect(), 0),
            Value::Range { start, stop, step } => {
                Cursor::Range { next: *start as i128, stop: *stop as i128, step: *step as i128 }
            }
            Value::Zip(s) => Cursor::Zip(s.items.iter().map(Cursor::new).collect::<Option<Vec<_>>>()?),
            _ => return None,
        })
    }

    fn next(&mut self) -> Option<Value> {
        match self {
            Cursor::Seq(s, i) => {
                let v = s.items.get(*i).cloned();
                *i += 1;
                v
            }
            Cursor::Chars(cs, i) => {
                let v = cs.get(*i).map(|c| Value::Str(Arc::from(c.to_string())));
                *i += 1;
                v
            }
            Cursor::Range { next, stop, step } => {
                let more = if *step > 0 { *next < *stop } else { *next > *stop };
                if !more {
                    return None;
                }
                let v = *next as i64;
                *next += *step;
                Some(Value::Int(v))
            }
            Cursor::Zip(parts) => {
                if parts.is_empty() {
                    return None;
                }
                let mut items = Vec::with_capacity(parts.len());
                for p in parts.iter_mut() {
                    items.push(p.next()?);
                }
                let depth = items.iter().map(Value::depth).max().unwrap_or(0) + 1;
                Some(Value::Tuple(Arc::new(Seq { items, depth })))
            }
        }
    }
}

struct Interp<'e> {
    board: Board,
    globals: HashMap<String, Value>,
    functions: &'e HashMap<String, Arc<UserFn>>,
    frames: Vec<HashMap<String, Value>>,
    steps: u64,
    budget: u64,
    max_depth: usize,
    depth: usize,
    trace: Option<Vec<TracedPut>>,
}

impl Interp<'_> {
    fn tick(&mut self, pos: Pos) -> Flow {
        self.steps += 1;
        if self.steps > self.budget {
            return fail(ErrorCategory::Resource, format!("step budget of {} exceeded", self.budget), pos);
        }
        Ok(())
    }

    fn descend(&mut self, pos: Pos) -> Flow {
        self.depth += 1;
        if self.depth > self.max_depth {
            return fail(ErrorCategory::Resource, "maximum recursion depth exceeded", pos);
        }
        Ok(())
    }

    fn bind(&mut self, name: &str, value: Value) {
        let scope = self.frames.last_mut().unwrap_or(&mut self.globals);
        scope.insert(name.to_string(), value);
    }

    fn lookup(&self, name: &str, pos: Pos) -> Flow<Value> {
        if let Some(v) = self.frames.last().and_then(|f| f.get(name)) {
            return Ok(v.clone());
        }
        if let Some(v) = self.globals.get(name) {
            return Ok(v.clone());
        }
        if let Some(f) = self.functions.get(name) {
            return Ok(Value::Function(f.clone()));
        }
        if name == "board" {
            return Ok(Value::Board);
        }
        if let Some(b) = Builtin::lookup(name) {
            return Ok(Value::Builtin(b));
        }
        fail(ErrorCategory::Name, format!("name '{name}' is not defined"), pos)
    }

    fn exec_block(&mut self, body: &[Stmt]) -> Flow {
        for stmt in body {
            self.exec_stmt(stmt)?;
        }
        Ok(())
    }

    fn exec_nested(&mut self, body: &[Stmt], pos: Pos) -> Flow {
        self.descend(pos)?;
        let r = self.exec_block(body);
        self.depth -= 1;
        r
    }

    fn exec_stmt(&mut self, stmt: &Stmt) -> Flow {
        self.tick(stmt.pos)?;
        match &stmt.kind {
            StmtKind::FunctionDef { name, params, body } => {
                let f = UserFn {
                    name: name.name.clone(),
                    params: params.iter().map(|p| p.name.clone()).collect(),
                    body: body.clone(),
                };
                self.bind(&name.name, Value::Function(Arc::new(f)));
            }
            StmtKind::Assign { target, value } => {
                let v = self.eval(value)?;
                self.bind(&target.name, v);
            }
            StmtKind::Call(call) => self.call(call)?,
            StmtKind::If { condition, body } => {
                if self.eval(condition)?.truthy() {
                    self.exec_nested(body, stmt.pos)?;
                }
            }
            StmtKind::For { targets, iterable, body } => {
                let seq = self.eval(iterable)?;
                let Some(mut cursor) = Cursor::new(&seq) else {
                    return fail(
                        ErrorCategory::Type,
                        format!("'{}' object is not iterable", seq.type_name()),
                        iterable.pos,
                    );
                };
                while let Some(item) = cursor.next() {
                    self.tick(stmt.pos)?;
                    if let [single] = targets.as_slice() {
                        self.bind(&single.name, item);
                    } else {
                        let parts = self.unpack(&item, targets.len(), stmt.pos)?;
                        for (t, v) in targets.iter().zip(parts) {
                            self.bind(&t.name, v);
                        }
                    }
                    self.exec_nested(body, stmt.pos)?;
                }
            }
        }
        Ok(())
    }

    fn unpack(&mut self, item: &Value, n: usize, pos: Pos) -> Flow<Vec<Value>> {
        let Some(mut cursor) = Cursor::new(item) else {
            return fail(ErrorCategory::Type, format!("cannot unpack non-iterable {} object", item.type_name()), pos);
        };
        let mut out = Vec::with_capacity(n);
        while let Some(v) = cursor.next() {
            if out.len() == n {
                return fail(ErrorCategory::Value, format!("too many values to unpack (expected {n})"), pos);
            }
            self.tick(pos)?;
            out.push(v);
        }
        if out.len() < n {
            return fail(
                ErrorCategory::Value,
                format!("not enough values to unpack (expected {n}, got {})", out.len()),
                pos,
            );
        }
        Ok(out)
    }

    fn call(&mut self, call: &Call) -> Flow {
        let pos = call.func.pos;
        let callee = self.lookup(&call.func.name, pos)?;
        let mut args = Vec::with_capacity(call.args.len());
        for a in &call.args {
            args.push(self.eval(a)?);
        }
        let mut kwargs: Vec<(&str, Value)> = Vec::with_capacity(call.keywords.len());
        for k in &call.keywords {
            if !KEYWORD_WHITELIST.contains(&k.name.name.as_str()) {
                return fail(ErrorCategory::Type, format!("unexpected keyword argument '{}'", k.name.name), k.name.pos);
            }
            kwargs.push((k.name.name.as_str(), self.eval(&k.value)?));
        }
        match callee {
            Value::Builtin(Builtin::Put) => {
                let bound = bind_params(&PUT_PARAMS, args, kwargs, "put", pos)?;
                self.put(bound, pos)
            }
            Value::Builtin(b) => {
                if !kwargs.is_empty() {
                    return fail(ErrorCategory::Type, format!("{} takes no keyword arguments", call.func.name), pos);
                }
                // evaluated for its errors only
                match b {
                    Builtin::Range => self.make_range(args, pos).map(drop),
                    _ => self.make_zip(args, pos).map(drop),
                }
            }
            Value::Function(f) => {
                let params: Vec<&str> = f.params.iter().map(String::as_str).collect();
                let bound = bind_params(&params, args, kwargs, &f.name, pos)?;
                self.descend(pos)?;
                let frame = params.iter().map(|p| p.to_string()).zip(bound).collect();
                self.frames.push(frame);
                let r = self.exec_block(&f.body);
                self.frames.pop();
                self.depth -= 1;
                r
            }
            other => fail(ErrorCategory::Type, format!("'{}' object is not callable", other.type_name()), pos),
        }
    }

    fn put(&mut self, bound: Vec<Value>, pos: Pos) -> Flow {
        let [board, shape, color, x, y]: [Value; 5] = bound.try_into().expect("put has five parameters");
        if !matches!(board, Value::Board) {
            return fail(ErrorCategory::Type, format!("put expects the board, got {}", board.type_name()), pos);
        }
        let (Value::Str(shape), Value::Str(color)) = (&shape, &color) else {
            return fail(
                ErrorCategory::Type,
                format!("put expects shape and color strings, got {} and {}", shape.type_name(), color.type_name()),
                pos,
            );
        };
        let (x, y) = match (&x, &y) {
            (Value::Int(x), Value::Int(y)) => (*x, *y),
            _ => {
                return fail(
                    ErrorCategory::Type,
                    format!("put expects integer coordinates, got {} and {}", x.type_name(), y.type_name()),
                    pos,
                )
            }
        };
        match self.board.put(shape, color, x, y) {
            Ok(()) => {
                if let Some(t) = &mut self.trace {
                    t.push(TracedPut { shape: shape.to_string(), color: color.to_string(), x, y });
                }
                Ok(())
            }
            Err(e) => fail(e.category, e.detail, pos),
        }
    }

    fn make_range(&mut self, args: Vec<Value>, pos: Pos) -> Flow<Value> {
        let mut ints = Vec::with_capacity(3);
        for a in &args {
            match a {
                Value::Int(v) => ints.push(*v),
                Value::Bool(b) => ints.push(*b as i64),
                other => {
                    return fail(
                        ErrorCategory::Type,
                        format!("'{}' object cannot be interpreted as an integer", other.type_name()),
                        pos,
                    )
                }
            }
        }
        let (start, stop, step) = match ints.as_slice() {
            [stop] => (0, *stop, 1),
            [start, stop] => (*start, *stop, 1),
            [start, stop, step] => (*start, *stop, *step),
            _ => return fail(ErrorCategory::Type, format!("range expected 1 to 3 arguments, got {}", ints.len()), pos),
        };
        if step == 0 {
            return fail(ErrorCategory::Value, "range() arg 3 must not be zero", pos);
        }
        Ok(Value::Range { start, stop, step })
    }

    fn make_zip(&mut self, args: Vec<Value>, pos: Pos) -> Flow<Value> {
        if let Some(bad) = args.iter().find(|a| !a.is_iterable()) {
            return fail(ErrorCategory::Type, format!("'{}' object is not iterable", bad.type_name()), pos);
        }
        self.seq(args, pos).map(Value::Zip)
    }

    fn seq(&mut self, items: Vec<Value>, pos: Pos) -> Flow<Arc<Seq>> {
        let depth = items.iter().map(Value::depth).max().unwrap_or(0) + 1;
        if depth > MAX_VALUE_DEPTH {
            return fail(ErrorCategory::Resource, "value nesting too deep", pos);
        }
        Ok(Arc::new(Seq { items, depth }))
    }

    fn eval(&mut self, expr: &Expr) -> Flow<Value> {
        let pos = expr.pos;
        match &expr.kind {
            ExprKind::IntLiteral(v) => Ok(Value::Int(*v)),
            ExprKind::StringLiteral(s) => Ok(Value::Str(Arc::from(s.as_str()))),
            ExprKind::Name(n) => self.lookup(n, pos),
            ExprKind::ListLiteral(items) | ExprKind::TupleLiteral(items) => {
                let mut vals = Vec::with_capacity(items.len());
                for i in items {
                    vals.push(self.eval(i)?);
                }
                let seq = self.seq(vals, pos)?;
                Ok(if matches!(expr.kind, ExprKind::ListLiteral(_)) { Value::List(seq) } else { Value::Tuple(seq) })
            }
            ExprKind::BinaryAdd(a, b) => {
                let (l, r) = (self.eval(a)?, self.eval(b)?);
                match (as_int(&l), as_int(&r)) {
                    (Some(x), Some(y)) => match x.checked_add(y) {
                        Some(v) => Ok(Value::Int(v)),
                        None => fail(ErrorCategory::Value, "integer overflow", pos),
                    },
                    _ => fail(
                        ErrorCategory::Type,
                        format!("unsupported operand type(s) for +: '{}' and '{}'", l.type_name(), r.type_name()),
                        pos,
                    ),
                }
            }
            ExprKind::RangeCall(args) => {
                let vals = self.eval_all(args)?;
                self.make_range(vals, pos)
            }
            ExprKind::ZipCall(args) => {
                let vals = self.eval_all(args)?;
                self.make_zip(vals, pos)
            }
            ExprKind::Compare(a, b) => {
                let (l, r) = (self.eval(a)?, self.eval(b)?);
                let eq = self.values_equal(&l, &r, pos)?;
                Ok(Value::Bool(eq))
            }
        }
    }

    fn eval_all(&mut self, exprs: &[Expr]) -> Flow<Vec<Value>> {
        exprs.iter().map(|e| self.eval(e)).collect()
    }

    /// Structural equality. Each element compared costs a step so shared
    /// containers cannot blow up comparison time.
    fn values_equal(&mut self, a: &Value, b: &Value, pos: Pos) -> Flow<bool> {
        self.tick(pos)?;
        Ok(match (a, b) {
            (Value::Str(x), Value::Str(y)) => x == y,
            (Value::List(x), Value::List(y)) | (Value::Tuple(x), Value::Tuple(y)) => {
                if Arc::ptr_eq(x, y) {
                    return Ok(true);
                }
                if x.items.len() != y.items.len() {
                    return Ok(false);
                }
                for (p, q) in x.items.iter().zip(&y.items) {
                    if !self.values_equal(p, q, pos)? {
                        return Ok(false);
                    }
                }
                true
            }
            (Value::Range { start: s1, stop: e1, step: t1 }, Value::Range { start: s2, stop: e2, step: t2 }) => {
                let (n1, n2) = (range_len(*s1, *e1, *t1), range_len(*s2, *e2, *t2));
                n1 == n2 && (n1 == 0 || (s1 == s2 && (n1 == 1 || t1 == t2)))
            }
            (Value::Zip(x), Value::Zip(y)) => Arc::ptr_eq(x, y),
            (Value::Board, Value::Board) => true,
            (Value::Function(f), Value::Function(g)) => Arc::ptr_eq(f, g),
            (Value::Builtin(f), Value::Builtin(g)) => f == g,
            _ => match (as_int(a), as_int(b)) {
                (Some(x), Some(y)) => x == y,
                _ => false,
            },
        })
    }
}

fn as_int(v: &Value) -> Option<i64> {
    match v {
        Value::Int(i) => Some(*i),
        Value::Bool(b) => Some(*b as i64),
        _ => None,
    }
}

/// Matches call arguments to parameter names. A leading `board` parameter
/// is filled implicitly when the caller leaves it out, and a board passed
/// to a function that does not declare one is dropped.
fn bind_params(
    params: &[&str],
    mut args: Vec<Value>,
    kwargs: Vec<(&str, Value)>,
    fname: &str,
    pos: Pos,
) -> Flow<Vec<Value>> {
    let board_kw = kwargs.iter().any(|(k, _)| *k == "board");
    let first_is_board = matches!(args.first(), Some(Value::Board));
    if params.first() == Some(&"board") && !board_kw && !first_is_board {
        args.insert(0, Value::Board);
    } else if !params.contains(&"board") && first_is_board {
        args.remove(0);
    }
    if args.len() > params.len() {
        return fail(
            ErrorCategory::Type,
            format!("{fname}() takes {} positional arguments but {} were given", params.len(), args.len()),
            pos,
        );
    }
    let mut slots: Vec<Option<Value>> = args.into_iter().map(Some).collect();
    slots.resize(params.len(), None);
    for (k, v) in kwargs {
        if k == "board" && !params.contains(&"board") {
            continue;
        }
        let Some(i) = params.iter().position(|p| *p == k) else {
            return fail(ErrorCategory::Type, format!("{fname}() got an unexpected keyword argument '{k}'"), pos);
        };
        if slots[i].is_some() {
            return fail(ErrorCategory::Type, format!("{fname}() got multiple values for argument '{k}'"), pos);
        }
        slots[i] = Some(v);
    }
    let mut out = Vec::with_capacity(params.len());
    for (p, s) in params.iter().zip(slots) {
        match s {
            Some(v) => out.push(v),
            None => {
                return fail(ErrorCategory::Type, format!("{fname}() missing required argument '{p}'"), pos);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(src: &str) -> ExecOutcome {
        run_source(src, &ExecEnv::default())
    }

    fn cat(src: &str) -> Option<ErrorCategory> {
        run(src).category()
    }

    #[test]
    fn empty_program_leaves_board_empty() {
        let out = run("");
        assert!(out.is_success());
        assert!(out.board.is_empty());
    }

    #[test]
    fn single_put() {
        let out = run("put(board, 'washer', 'red', 0, 0)");
        assert!(out.is_success());
        assert_eq!(out.board.height(0, 0), 1);
    }

    #[test]
    fn runtime_categories() {
        assert_eq!(cat("place_widget(board, 1)"), Some(ErrorCategory::Name));
        assert_eq!(cat("put(board,'hexnut','red',0,0)"), Some(ErrorCategory::Key));
        assert_eq!(cat("put(board,'nut','red',8,0)"), Some(ErrorCategory::DimensionsMismatch));
        assert_eq!(cat("put(board,'nut','red','a',0)"), Some(ErrorCategory::Type));
        assert_eq!(cat("put(board,'nut','red',0)"), Some(ErrorCategory::Type));
        assert_eq!(cat("put(board,'nut','red',0,0,1)"), Some(ErrorCategory::Type));
        assert_eq!(cat("x = 'a' + 1"), Some(ErrorCategory::Type));
        assert_eq!(cat("x = 9223372036854775807 + 1"), Some(ErrorCategory::Value));
        assert_eq!(cat("for a, b in [[1, 2, 3]]:\n    x = a"), Some(ErrorCategory::Value));
        assert_eq!(cat("for a in range(1, 2, 0):\n    x = a"), Some(ErrorCategory::Value));
        assert_eq!(cat("for a in 5:\n    x = a"), Some(ErrorCategory::Type));
        assert_eq!(cat("x = 1\nx(board)"), Some(ErrorCategory::Type));
        assert_eq!(cat("put(board, 'nut', 'red', 0, 0, colors=['red'])"), Some(ErrorCategory::Type));
        assert_eq!(cat("put(board, 'nut', 'red', 0, z=0)"), Some(ErrorCategory::Type));
        assert_eq!(cat("hello"), Some(ErrorCategory::Syntax));
    }

    #[test]
    fn failure_keeps_partial_board() {
        let out = run("put(board,'nut','red',0,0)\nput(board,'nut','blue',0,0)");
        assert_eq!(out.category(), Some(ErrorCategory::SameShapeStacking));
        assert_eq!(out.board.height(0, 0), 1);
        assert_eq!(out.failure.unwrap().pos.unwrap().line, 2);
    }

    #[test]
    fn budget_and_recursion_are_bounded() {
        let out = run("for i in range(1000000000):\n    x = i\n");
        assert_eq!(out.category(), Some(ErrorCategory::Resource));
        assert!(out.steps <= DEFAULT_STEP_BUDGET + 1);
        assert_eq!(cat("def f(x):\n    f(x)\nf(1)\n"), Some(ErrorCategory::Resource));
        assert_eq!(cat("x = [1]\nfor i in range(100):\n    x = [x, x]\n"), Some(ErrorCategory::Resource));
        assert_eq!(cat("z = [1]\nfor i in range(100):\n    z = zip(z)\n"), Some(ErrorCategory::Resource));
    }

    #[test]
    fn loops_zip_and_if() {
        let src = "\
def ws(board, colors, x, y):
    shapes = ['washer', 'screw']
    for shape, color in zip(shapes, colors):
        put(board, shape, color, x, y)

for row in range(4):
    for col in range(4):
        if row == col:
            ws(board, colors=['red', 'blue'], x=row, y=col + 4)
";
        let out = run_source(src, &ExecEnv::tracing());
        assert!(out.is_success(), "{:?}", out.failure);
        assert_eq!(out.trace.len(), 8);
        assert_eq!(out.trace[0].to_code(), "put(board, 'washer', 'red', 0, 4)");
        assert_eq!(out.board.height(3, 7), 2);
    }

    #[test]
    fn zip_truncates() {
        let out = run_source(
            "for s, c in zip(['nut', 'washer', 'nut'], ['red', 'blue']):\n    put(board, s, c, 0, 0)\n",
            &ExecEnv::tracing(),
        );
        assert!(out.is_success());
        assert_eq!(out.trace.len(), 2);
    }

    #[test]
    fn lenient_board_binding() {
        assert!(run("put('nut', 'red', 0, 0)").is_success());
        assert!(run("def f(board, x):\n    put(board, 'nut', 'red', x, 0)\nf(x=1)\n").is_success());
        assert!(run("def f(x):\n    put(board, 'nut', 'red', x, 0)\nf(board, 1)\n").is_success());
        assert!(run("def f(board, x):\n    put(board, 'nut', 'red', x, 0)\nf(board=board, x=1)\n").is_success());
    }

    #[test]
    fn deterministic() {
        let src = "for i in range(3):\n    put(board, 'nut', 'red', i, i)\nput(board, 'nut', 'red', 0, 0)";
        let (a, b) = (run(src), run(src));
        assert_eq!(a.board, b.board);
        assert_eq!(a.failure, b.failure);
        assert_eq!(a.steps, b.steps);
    }

    #[test]
    fn range_equality() {
        assert!(run("if range(0) == range(5, 1):\n    put(board, 'nut', 'red', 0, 0)").board.height(0, 0) == 1);
    }
}
