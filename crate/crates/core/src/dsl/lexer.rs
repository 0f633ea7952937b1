//! Tokenizer with Python-style significant indentation.

use super::ast::Pos;
use super::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Name(String),
    Int(i64),
    Str(String),
    Def,
    For,
    In,
    If,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Assign,
    EqEq,
    Plus,
    Minus,
    Newline,
    Indent,
    Dedent,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Name(n) => format!("name '{n}'"),
            Tok::Int(v) => format!("integer {v}"),
            Tok::Str(_) => "string literal".into(),
            Tok::Def => "'def'".into(),
            Tok::For => "'for'".into(),
            Tok::In => "'in'".into(),
            Tok::If => "'if'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::Comma => "','".into(),
            Tok::Colon => "':'".into(),
            Tok::Assign => "'='".into(),
            Tok::EqEq => "'=='".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Newline => "end of line".into(),
            Tok::Indent => "indent".into(),
            Tok::Dedent => "dedent".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

/// Words the host language reserves that the restricted language does not
/// support. Using one is a syntax error rather than a name lookup.
const UNSUPPORTED_KEYWORDS: &[&str] = &[
    "while", "return", "import", "from", "class", "lambda", "else", "elif", "try", "except", "with", "yield", "global",
    "nonlocal", "pass", "break", "continue", "del", "assert", "raise", "not", "and", "or", "is", "as", "async",
    "await", "finally",
];

pub fn tokenize(source: &str) -> Result<Vec<Token>, SyntaxError> {
    Lexer::new(source).run()
}

struct Lexer {
    chars: Vec<char>,
    idx: usize,
    line: usize,
    col: usize,
    depth: usize,
    indents: Vec<usize>,
    unit: Option<usize>,
    out: Vec<Token>,
}

impl Lexer {
    fn new(src: &str) -> Self {
        Lexer {
            chars: src.chars().collect(),
            idx: 0,
            line: 1,
            col: 1,
            depth: 0,
            indents: vec![0],
            unit: None,
            out: Vec::new(),
        }
    }

    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).copied()
    }

    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.idx + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.idx).copied()?;
        self.idx += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err(&self, pos: Pos, msg: impl Into<String>) -> SyntaxError {
        SyntaxError { pos, message: msg.into() }
    }

    fn push(&mut self, tok: Tok, pos: Pos) {
        self.out.push(Token { tok, pos });
    }

    fn run(mut self) -> Result<Vec<Token>, SyntaxError> {
        let mut at_line_start = true;
        loop {
            if at_line_start && self.depth == 0 {
                if !self.handle_indentation()? {
                    break;
                }
                at_line_start = false;
                continue;
            }
            let Some(c) = self.peek() else { break };
            let pos = self.pos();
            match c {
                ' ' | '\t' | '\r' | '\u{c}' => {
                    self.bump();
                }
                '\\' if self.peek_at(1) == Some('\n') => {
                    self.bump();
                    self.bump();
                }
                '#' => {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                '\n' => {
                    self.bump();
                    if self.depth == 0 {
                        self.push(Tok::Newline, pos);
                        at_line_start = true;
                    }
                }
                '(' | '[' => {
                    self.bump();
                    self.depth += 1;
                    self.push(if c == '(' { Tok::LParen } else { Tok::LBracket }, pos);
                }
                ')' | ']' => {
                    self.bump();
                    if self.depth == 0 {
                        return Err(self.err(pos, format!("unmatched '{c}'")));
                    }
                    self.depth -= 1;
                    self.push(if c == ')' { Tok::RParen } else { Tok::RBracket }, pos);
                }
                ',' => {
                    self.bump();
                    self.push(Tok::Comma, pos);
                }
                ':' => {
                    self.bump();
                    self.push(Tok::Colon, pos);
                }
                '+' => {
                    self.bump();
                    self.push(Tok::Plus, pos);
                }
                '-' => {
                    self.bump();
                    self.push(Tok::Minus, pos);
                }
                '=' => {
                    self.bump();
                    if self.peek() == Some('=') {
                        self.bump();
                        self.push(Tok::EqEq, pos);
                    } else {
                        self.push(Tok::Assign, pos);
                    }
                }
                '\'' | '"' => {
                    let s = self.string(c)?;
                    self.push(Tok::Str(s), pos);
                }
                c if c.is_ascii_digit() => {
                    let mut text = String::new();
                    while let Some(d) = self.peek().filter(|d| d.is_ascii_alphanumeric() || *d == '_') {
                        text.push(d);
                        self.bump();
                    }
                    let digits: String = text.chars().filter(|&d| d != '_').collect();
                    if !digits.chars().all(|d| d.is_ascii_digit()) || text.ends_with('_') {
                        return Err(self.err(pos, format!("invalid number literal '{text}'")));
                    }
                    if digits.len() > 1 && digits.starts_with('0') && digits.chars().any(|d| d != '0') {
                        return Err(self.err(pos, "leading zeros in integer literal"));
                    }
                    let v: i64 =
                        digits.parse().map_err(|_| self.err(pos, format!("integer literal '{text}' is too large")))?;
                    self.push(Tok::Int(v), pos);
                }
                c if c == '_' || c.is_alphabetic() => {
                    let mut word = String::new();
                    while let Some(d) = self.peek().filter(|d| *d == '_' || d.is_alphanumeric()) {
                        word.push(d);
                        self.bump();
                    }
                    if !word.is_ascii() {
                        return Err(self.err(pos, format!("unsupported identifier '{word}'")));
                    }
                    let tok = match word.as_str() {
                        "def" => Tok::Def,
                        "for" => Tok::For,
                        "in" => Tok::In,
                        "if" => Tok::If,
                        w if UNSUPPORTED_KEYWORDS.contains(&w) => {
                            return Err(self.err(pos, format!("unsupported construct '{w}'")));
                        }
                        _ => Tok::Name(word),
                    };
                    self.push(tok, pos);
                }
                other => {
                    return Err(self.err(pos, format!("unexpected character {other:?}")));
                }
            }
        }
        if self.depth > 0 {
            return Err(self.err(self.pos(), "unexpected end of input inside brackets"));
        }
        let end = self.pos();
        if !matches!(self.out.last().map(|t| &t.tok), None | Some(Tok::Newline) | Some(Tok::Dedent)) {
            self.push(Tok::Newline, end);
        }
        while self.indents.len() > 1 {
            self.indents.pop();
            self.push(Tok::Dedent, end);
        }
        self.push(Tok::Eof, end);
        Ok(self.out)
    }

    /// Measures the indentation of the next logical line and emits
    /// INDENT/DEDENT tokens. Blank and comment-only lines are skipped.
    /// Returns false at end of input.
    fn handle_indentation(&mut self) -> Result<bool, SyntaxError> {
        loop {
            let mut width = 0usize;
            let mut has_space = false;
            let mut has_tab = false;
            while let Some(c) = self.peek() {
                match c {
                    ' ' => {
                        width += 1;
                        has_space = true;
                    }
                    '\t' => {
                        width = (width / 8 + 1) * 8;
                        has_tab = true;
                    }
                    '\u{c}' | '\r' => {}
                    _ => break,
                }
                self.bump();
            }
            match self.peek() {
                None => return Ok(false),
                Some('\n') => {
                    self.bump();
                    continue;
                }
                Some('#') => {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                    continue;
                }
                _ => {}
            }
            let pos = self.pos();
            if has_space && has_tab {
                return Err(self.err(pos, "inconsistent use of tabs and spaces in indentation"));
            }
            let current = *self.indents.last().expect("indent stack is never empty");
            if width > current {
                let unit = *self.unit.get_or_insert(width);
                if !width.is_multiple_of(unit) {
                    return Err(self.err(
                        pos,
                        format!("indentation of {width} is not a multiple of the file's indent width {unit}"),
                    ));
                }
                self.indents.push(width);
                self.push(Tok::Indent, pos);
            } else if width < current {
                while *self.indents.last().expect("indent stack is never empty") > width {
                    self.indents.pop();
                    self.push(Tok::Dedent, pos);
                }
                if *self.indents.last().expect("indent stack is never empty") != width {
                    return Err(self.err(pos, "unindent does not match any outer indentation level"));
                }
            }
            return Ok(true);
        }
    }

    fn string(&mut self, quote: char) -> Result<String, SyntaxError> {
        let start = self.pos();
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err(self.err(start, "unterminated string literal")),
                Some(c) if c == quote => return Ok(s),
                Some('\\') => match self.bump() {
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some('\\') => s.push('\\'),
                    Some('\'') => s.push('\''),
                    Some('"') => s.push('"'),
                    Some('\n') => {}
                    Some(other) => {
                        s.push('\\');
                        s.push(other);
                    }
                    None => return Err(self.err(start, "unterminated string literal")),
                },
                Some(c) => s.push(c),
            }
        }
    }
}
