//! Recursive-descent parser over the token stream.

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::SyntaxError;

/// Bracket and block nesting beyond this is rejected so hostile input
/// cannot exhaust the native stack.
const MAX_NESTING: usize = 64;

pub fn parse(source: &str) -> Result<Program, SyntaxError> {
    let tokens = tokenize(source)?;
    let mut p = Parser { tokens, idx: 0, depth: 0 };
    let body = p.statements_until_eof()?;
    Ok(Program { body })
}

struct Parser {
    tokens: Vec<Token>,
    idx: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.idx].tok
    }

    fn peek_nth(&self, k: usize) -> &Tok {
        let i = (self.idx + k).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn pos(&self) -> Pos {
        self.tokens[self.idx].pos
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.idx].clone();
        if self.idx < self.tokens.len() - 1 {
            self.idx += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError { pos: self.pos(), message: message.into() })
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, SyntaxError> {
        self.error(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<Token, SyntaxError> {
        if *self.peek() == tok {
            Ok(self.advance())
        } else {
            self.unexpected(wanted)
        }
    }

    fn ident(&mut self) -> Result<Ident, SyntaxError> {
        match self.peek().clone() {
            Tok::Name(name) => {
                let pos = self.advance().pos;
                Ok(Ident { name, pos })
            }
            _ => self.unexpected("an identifier"),
        }
    }

    fn enter(&mut self) -> Result<(), SyntaxError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return self.error("nesting too deep");
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    fn statements_until_eof(&mut self) -> Result<Vec<Stmt>, SyntaxError> {
        let mut out = Vec::new();
        while *self.peek() != Tok::Eof {
            if *self.peek() == Tok::Indent {
                return self.error("unexpected indent");
            }
            out.push(self.statement()?);
        }
        Ok(out)
    }

    fn statement(&mut self) -> Result<Stmt, SyntaxError> {
        let pos = self.pos();
        let kind = match self.peek() {
            Tok::Def => self.function_def()?,
            Tok::For => self.for_stmt()?,
            Tok::If => self.if_stmt()?,
            _ => {
                let kind = self.simple_statement()?;
                self.expect(Tok::Newline, "end of line")?;
                kind
            }
        };
        Ok(Stmt { pos, kind })
    }

    /// Assignment or call; the only statements allowed on a single line.
    fn simple_statement(&mut self) -> Result<StmtKind, SyntaxError> {
        let target = self.ident()?;
        match self.peek() {
            Tok::Assign => {
                self.advance();
                let value = self.expr()?;
                Ok(StmtKind::Assign { target, value })
            }
            Tok::LParen => {
                let call = self.call_args(target)?;
                Ok(StmtKind::Call(call))
            }
            _ => self.unexpected("'=' or '('"),
        }
    }

    fn function_def(&mut self) -> Result<StmtKind, SyntaxError> {
        self.expect(Tok::Def, "'def'")?;
        let name = self.ident()?;
        self.expect(Tok::LParen, "'('")?;
        let mut params = Vec::new();
        while *self.peek() != Tok::RParen {
            let p = self.ident()?;
            if params.iter().any(|q: &Ident| q.name == p.name) {
                return Err(SyntaxError { pos: p.pos, message: format!("duplicate parameter '{}'", p.name) });
            }
            params.push(p);
            if *self.peek() == Tok::Comma {
                self.advance();
            } else {
                break;
            }
        }
        self.expect(Tok::RParen, "')'")?;
        let body = self.block()?;
        Ok(StmtKind::FunctionDef { name, params, body })
    }

    fn for_stmt(&mut self) -> Result<StmtKind, SyntaxError> {
        self.expect(Tok::For, "'for'")?;
        let parenthesized = *self.peek() == Tok::LParen;
        if parenthesized {
            self.advance();
        }
        let mut targets = vec![self.ident()?];
        while *self.peek() == Tok::Comma {
            self.advance();
            if matches!(self.peek(), Tok::In | Tok::RParen) {
                break;
            }
            targets.push(self.ident()?);
        }
        if parenthesized {
            self.expect(Tok::RParen, "')'")?;
        }
        self.expect(Tok::In, "'in'")?;
        let iterable = self.expr()?;
        let body = self.block()?;
        Ok(StmtKind::For { targets, iterable, body })
    }

    fn if_stmt(&mut self) -> Result<StmtKind, SyntaxError> {
        self.expect(Tok::If, "'if'")?;
        let condition = self.expr()?;
        let body = self.block()?;
        Ok(StmtKind::If { condition, body })
    }

    /// `:` followed by either an indented suite or one simple statement.
    fn block(&mut self) -> Result<Vec<Stmt>, SyntaxError> {
        self.expect(Tok::Colon, "':'")?;
        self.enter()?;
        let body = if *self.peek() == Tok::Newline {
            self.advance();
            if *self.peek() != Tok::Indent {
                return self.error("expected an indented block");
            }
            self.advance();
            let mut body = Vec::new();
            while !matches!(self.peek(), Tok::Dedent | Tok::Eof) {
                body.push(self.statement()?);
            }
            if *self.peek() == Tok::Dedent {
                self.advance();
            }
            body
        } else {
            let pos = self.pos();
            let kind = self.simple_statement()?;
            self.expect(Tok::Newline, "end of line")?;
            vec![Stmt { pos, kind }]
        };
        self.leave();
        Ok(body)
    }

    fn call_args(&mut self, func: Ident) -> Result<Call, SyntaxError> {
        self.expect(Tok::LParen, "'('")?;
        self.enter()?;
        let mut args = Vec::new();
        let mut keywords: Vec<Keyword> = Vec::new();
        while *self.peek() != Tok::RParen {
            if matches!(self.peek(), Tok::Name(_)) && *self.peek_nth(1) == Tok::Assign {
                let name = self.ident()?;
                self.advance();
                let value = self.expr()?;
                if keywords.iter().any(|k| k.name.name == name.name) {
                    return Err(SyntaxError {
                        pos: name.pos,
                        message: format!("repeated keyword argument '{}'", name.name),
                    });
                }
                keywords.push(Keyword { name, value });
            } else {
                if !keywords.is_empty() {
                    return self.error("positional argument follows keyword argument");
                }
                args.push(self.expr()?);
            }
            if *self.peek() == Tok::Comma {
                self.advance();
            } else {
                break;
            }
        }
        self.expect(Tok::RParen, "')'")?;
        self.leave();
        Ok(Call { func, args, keywords })
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        self.enter()?;
        let left = self.sum()?;
        let out = if *self.peek() == Tok::EqEq {
            let pos = self.advance().pos;
            let right = self.sum()?;
            if *self.peek() == Tok::EqEq {
                return self.error("chained comparisons are not supported");
            }
            let _ = pos;
            Expr { pos: left.pos, kind: ExprKind::Compare(Box::new(left), Box::new(right)) }
        } else {
            left
        };
        self.leave();
        Ok(out)
    }

    fn sum(&mut self) -> Result<Expr, SyntaxError> {
        let mut left = self.atom()?;
        while *self.peek() == Tok::Plus {
            self.advance();
            let right = self.atom()?;
            left = Expr { pos: left.pos, kind: ExprKind::BinaryAdd(Box::new(left), Box::new(right)) };
        }
        if *self.peek() == Tok::Minus {
            return self.error("subtraction is not supported");
        }
        Ok(left)
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        let pos = self.pos();
        let kind = match self.peek().clone() {
            Tok::Int(v) => {
                self.advance();
                ExprKind::IntLiteral(v)
            }
            Tok::Minus => {
                self.advance();
                match self.peek().clone() {
                    Tok::Int(v) => {
                        self.advance();
                        ExprKind::IntLiteral(-v)
                    }
                    _ => return self.unexpected("an integer after '-'"),
                }
            }
            Tok::Str(s) => {
                self.advance();
                let mut s = s;
                // adjacent string literals concatenate
                while let Tok::Str(more) = self.peek().clone() {
                    self.advance();
                    s.push_str(&more);
                }
                ExprKind::StringLiteral(s)
            }
            Tok::Name(name) => {
                self.advance();
                if *self.peek() == Tok::LParen {
                    let func = Ident { name: name.clone(), pos };
                    let call = self.call_args(func)?;
                    if !call.keywords.is_empty() {
                        return Err(SyntaxError { pos, message: format!("'{name}' takes no keyword arguments") });
                    }
                    match name.as_str() {
                        "range" => ExprKind::RangeCall(call.args),
                        "zip" => ExprKind::ZipCall(call.args),
                        _ => {
                            return Err(SyntaxError {
                                pos,
                                message: format!("call to '{name}' cannot be used as a value"),
                            })
                        }
                    }
                } else {
                    ExprKind::Name(name)
                }
            }
            Tok::LBracket => {
                self.advance();
                let items = self.sequence(Tok::RBracket)?.0;
                self.expect(Tok::RBracket, "']'")?;
                ExprKind::ListLiteral(items)
            }
            Tok::LParen => {
                self.advance();
                let (items, trailing_comma) = self.sequence(Tok::RParen)?;
                self.expect(Tok::RParen, "')'")?;
                if items.len() == 1 && !trailing_comma {
                    return Ok(items.into_iter().next().expect("one item"));
                }
                ExprKind::TupleLiteral(items)
            }
            _ => return self.unexpected("an expression"),
        };
        Ok(Expr { pos, kind })
    }

    fn sequence(&mut self, close: Tok) -> Result<(Vec<Expr>, bool), SyntaxError> {
        self.enter()?;
        let mut items = Vec::new();
        let mut trailing = false;
        while *self.peek() != close {
            items.push(self.expr()?);
            trailing = false;
            if *self.peek() == Tok::Comma {
                self.advance();
                trailing = true;
            } else {
                break;
            }
        }
        self.leave();
        Ok((items, trailing))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_put() {
        let p = parse("put(board, 'washer', 'red', 0, 0)").unwrap();
        assert_eq!(p.body.len(), 1);
        match &p.body[0].kind {
            StmtKind::Call(c) => {
                assert_eq!(c.func.name, "put");
                assert_eq!(c.args.len(), 5);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stack_two_template() {
        let src = "def wn(board, colors, x, y):\n    shapes = ['washer', 'nut']\n    for shape, color in zip(shapes, colors):\n            put(board, shape, color, x, y)\n";
        let p = parse(src).unwrap();
        let StmtKind::FunctionDef { name, params, body } = &p.body[0].kind else { panic!() };
        assert_eq!(name.name, "wn");
        assert_eq!(params.len(), 4);
        assert!(
            matches!(body[1].kind, StmtKind::For { ref iterable, .. } if matches!(iterable.kind, ExprKind::ZipCall(_)))
        );
    }

    #[test]
    fn prose_is_a_syntax_error_on_line_one() {
        let e = parse("Here is the code:\nput(board, 'washer', 'red', 0, 0)").unwrap_err();
        assert_eq!(e.pos.line, 1);
    }

    #[test]
    fn rejects_unknown_constructs() {
        for src in [
            "x = 1 - 2",
            "x",
            "put(board, 'a', 'b', 0, 0);",
            "x = foo(1)",
            "while True:\n    x = 1",
            "import os",
            "board.put('a')",
            "x = [1, 2",
            "for x in range(3):\nput(board, 'a', 'b', 0, 0)",
            "x = range(1, step=2)",
            "x == 1",
            "f(a=1, 2)",
        ] {
            assert!(parse(src).is_err(), "{src:?} should not parse");
        }
    }

    #[test]
    fn accepts_template_forms() {
        for src in [
            "",
            "# only a comment\n\n",
            "for row, col in [[0,0], [0,3], [3, 0], [3, 3]]:\n    ws(board, colors=['red', 'blue'], x=row, y=col)\n",
            "for row in range(4):\n    for col in range(4):\n        if row == col:\n            ws(board, colors=['red'],x=row, y=col)\n",
            "for row in range(0, 3, 3):\n    f(board, colors=['red', 'blue'], x=row + 4, y=3)\n",
            "x = (1, 2)\ny = (3,)\nz = (4)\n",
            "put(board, 'nut', 'red', -1, 0)",
            "for i in range(2): put(board, 'nut', 'red', i, 0)\n",
        ] {
            parse(src).unwrap_or_else(|e| panic!("{src:?}: {e}"));
        }
    }

    #[test]
    fn deep_nesting_is_rejected_not_overflowing() {
        let src = format!("x = {}1{}", "[".repeat(5000), "]".repeat(5000));
        assert!(parse(&src).is_err());
    }

    #[test]
    fn ast_serializes_with_node_tags() {
        let p = parse("x = 1\nput(board, 'nut', 'red', x, 0)").unwrap();
        let json = p.to_json();
        assert!(json.contains("\"type\":\"Assign\""));
        assert!(json.contains("\"type\":\"Call\""));
        assert!(json.contains("\"type\":\"IntLiteral\""));
        let back: Program = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }
}
