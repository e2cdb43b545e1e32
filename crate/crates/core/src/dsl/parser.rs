use std::fmt;

use serde::Serialize;

use crate::dist::Dist;

use super::ast::*;

/// Characters that make up symbolic operation names such as `*` or `+`.
pub(crate) fn is_op_char(c: char) -> bool {
    matches!(c, '*' | '+' | '&' | '^' | '%' | '$' | '!' | '?' | '·' | '∘' | '⊗' | '⊕' | '∨' | '∧')
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagnosticKind {
    Lexical,
    Syntax,
    Resolution,
}

/// A located error with the set of tokens that would have been accepted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub line: usize,
    pub col: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl Diagnostic {
    pub fn new(kind: DiagnosticKind, pos: Pos, message: impl Into<String>) -> Self {
        Diagnostic {
            kind,
            line: pos.line,
            col: pos.col,
            message: message.into(),
            expected: Vec::new(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            DiagnosticKind::Lexical => "lexical",
            DiagnosticKind::Syntax => "syntax",
            DiagnosticKind::Resolution => "resolution",
        };
        write!(f, "{}:{}: {kind} error: {}", self.line, self.col, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnostic {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Str(String),
    Int(String),
    Op(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Colon,
    Semi,
    Eq,
    EqBrack,
    TildeBrack,
    Turnstile,
    Arrow,
    At,
    Slash,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Int(s) => format!("`{s}`"),
            Tok::Op(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
            t => format!("`{}`", punct(t)),
        }
    }
}

fn punct(t: &Tok) -> &'static str {
    match t {
        Tok::LBrace => "{",
        Tok::RBrace => "}",
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBrack => "[",
        Tok::RBrack => "]",
        Tok::Comma => ",",
        Tok::Colon => ":",
        Tok::Semi => ";",
        Tok::Eq => "=",
        Tok::EqBrack => "=[",
        Tok::TildeBrack => "~[",
        Tok::Turnstile => "|-",
        Tok::Arrow => "->",
        Tok::At => "@",
        Tok::Slash => "/",
        _ => "?",
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos, Pos)>, Diagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |pos, msg: String| Err(Diagnostic::new(DiagnosticKind::Lexical, pos, msg));
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let start = i;
        let next = chars.get(i + 1).copied();
        let tok = match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '{' | '}' | '(' | ')' | '[' | ']' | ',' | ':' | ';' | '@' | '/' => {
                i += 1;
                match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBrack,
                    ']' => Tok::RBrack,
                    ',' => Tok::Comma,
                    ':' => Tok::Colon,
                    ';' => Tok::Semi,
                    '@' => Tok::At,
                    _ => Tok::Slash,
                }
            }
            '=' if next == Some('[') => {
                i += 2;
                Tok::EqBrack
            }
            '=' => {
                i += 1;
                Tok::Eq
            }
            '~' if next == Some('[') => {
                i += 2;
                Tok::TildeBrack
            }
            '|' if next == Some('-') => {
                i += 2;
                Tok::Turnstile
            }
            '-' if next == Some('>') => {
                i += 2;
                Tok::Arrow
            }
            '"' => {
                i += 1;
                let s = i;
                while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                    i += 1;
                }
                if i >= chars.len() || chars[i] != '"' {
                    return err(pos, "unterminated quoted name".into());
                }
                let name: String = chars[s..i].iter().collect();
                i += 1;
                if name.is_empty() {
                    return err(pos, "empty quoted name".into());
                }
                Tok::Str(name)
            }
            c if c.is_ascii_digit() => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == '.' || chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '.' || chars[j] == '-') {
                        j += 1;
                    }
                    if chars[i] == '.' || chars.get(i + 1).is_some_and(|d| d.is_ascii_digit() || *d == '-') {
                        let lit: String = chars[start..j].iter().collect();
                        return err(pos, format!("rational p/q expected, found `{lit}`"));
                    }
                }
                Tok::Int(chars[start..i].iter().collect())
            }
            c if is_ident_start(c) => {
                while i < chars.len()
                    && (is_ident_char(chars[i])
                        || (chars[i] == '-' && chars.get(i + 1).is_some_and(|d| d.is_alphanumeric())))
                {
                    i += 1;
                }
                Tok::Ident(chars[start..i].iter().collect())
            }
            c if is_op_char(c) => {
                while i < chars.len() && is_op_char(chars[i]) {
                    i += 1;
                }
                Tok::Op(chars[start..i].iter().collect())
            }
            c => return err(pos, format!("unexpected character `{c}`")),
        };
        col += i - start;
        out.push((tok, pos, Pos { line, col }));
    }
    out.push((Tok::Eof, Pos { line, col }, Pos { line, col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos, Pos)>,
    at: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let (t, p, _) = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        (t, p)
    }

    fn fail<T>(&self, expected: &[&str]) -> PResult<T> {
        let mut d = Diagnostic::new(
            DiagnosticKind::Syntax,
            self.pos(),
            format!("unexpected {}", self.peek().describe()),
        );
        d.expected = expected.iter().map(|s| s.to_string()).collect();
        Err(d)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<Pos> {
        if self.peek() == &t {
            Ok(self.bump().1)
        } else {
            self.fail(&[&format!("`{}`", punct(&t))])
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            _ => self.fail(&[&format!("`{kw}`")]),
        }
    }

    fn is_name(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::Str(_) | Tok::Int(_))
    }

    /// Identifier, quoted name, or a bare natural number.
    fn name(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(s) | Tok::Str(s) | Tok::Int(s) => {
                let pos = self.bump().1;
                Ok(Name { text: s, pos })
            }
            _ => self.fail(&["name"]),
        }
    }

    /// A name or a symbolic operator.
    fn symbol_name(&mut self) -> PResult<Name> {
        if let Tok::Op(s) = self.peek().clone() {
            let pos = self.bump().1;
            return Ok(Name { text: s, pos });
        }
        self.name().or_else(|_| self.fail(&["symbol name"]))
    }

    fn dist(&mut self) -> PResult<Dist> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "inf" => {
                self.bump();
                Ok(Dist::INF)
            }
            Tok::Int(n) => {
                let pos = self.bump().1;
                let text = if self.eat(&Tok::Slash) {
                    match self.peek().clone() {
                        Tok::Int(d) => {
                            self.bump();
                            format!("{n}/{d}")
                        }
                        _ => return self.fail(&["denominator"]),
                    }
                } else {
                    n
                };
                text.parse::<Dist>()
                    .map_err(|e| Diagnostic::new(DiagnosticKind::Syntax, pos, e.to_string()))
            }
            _ => self.fail(&["rational p/q", "`inf`"]),
        }
    }

    fn document(&mut self) -> PResult<Document> {
        let mut blocks = Vec::new();
        loop {
            let block = match self.peek() {
                Tok::Eof => break,
                Tok::Ident(s) => match s.as_str() {
                    "space" => Block::Space(self.space()?),
                    "signature" => Block::Signature(self.signature()?),
                    "algebra" | "partial" => Block::Algebra(self.algebra()?),
                    "presentation" => Block::Presentation(self.presentation()?),
                    "map" => Block::Map(self.map()?),
                    "run" => Block::Run(self.run()?),
                    _ => return self.fail(BLOCK_KEYWORDS),
                },
                _ => return self.fail(BLOCK_KEYWORDS),
            };
            blocks.push(block);
        }
        Ok(Document { blocks })
    }

    fn space(&mut self) -> PResult<SpaceDecl> {
        self.keyword("space")?;
        let name = self.name()?;
        self.expect(Tok::LBrace)?;
        let mut points = Vec::new();
        let mut distances = Vec::new();
        loop {
            match self.peek() {
                Tok::RBrace => break,
                Tok::Ident(d) if d == "d" && self.peek_at(1) == &Tok::LParen => {
                    self.bump();
                    self.bump();
                    let x = self.name()?;
                    self.expect(Tok::Comma)?;
                    let y = self.name()?;
                    self.expect(Tok::RParen)?;
                    self.expect(Tok::Eq)?;
                    distances.push((x, y, self.dist()?));
                }
                _ if self.is_name() && distances.is_empty() => points.push(self.name()?),
                Tok::Comma | Tok::Semi => {
                    self.bump();
                }
                _ if distances.is_empty() => return self.fail(&["point name", "`d(`", "`}`"]),
                _ => return self.fail(&["`d(`", "`}`"]),
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(SpaceDecl { name, points, distances })
    }

    fn signature(&mut self) -> PResult<SignatureDecl> {
        self.keyword("signature")?;
        let name = self.name()?;
        self.expect(Tok::LBrace)?;
        let mut symbols = Vec::new();
        while self.peek() != &Tok::RBrace {
            if self.eat(&Tok::Comma) || self.eat(&Tok::Semi) {
                continue;
            }
            let sym = self.symbol_name()?;
            self.expect(Tok::Colon)?;
            let arity = if self.eat(&Tok::At) {
                ArityExpr::Space(self.name()?)
            } else {
                match self.peek().clone() {
                    Tok::Int(n) => {
                        let pos = self.bump().1;
                        ArityExpr::Finite(n.parse().map_err(|_| {
                            Diagnostic::new(DiagnosticKind::Syntax, pos, format!("arity `{n}` too large"))
                        })?)
                    }
                    _ => return self.fail(&["arity", "`@`"]),
                }
            };
            symbols.push((sym, arity));
        }
        self.expect(Tok::RBrace)?;
        Ok(SignatureDecl { name, symbols })
    }

    fn algebra(&mut self) -> PResult<AlgebraDecl> {
        let partial = matches!(self.peek(), Tok::Ident(s) if s == "partial");
        if partial {
            self.bump();
        }
        self.keyword("algebra")?;
        let name = self.name()?;
        self.expect(Tok::Colon)?;
        let signature = self.name()?;
        self.keyword("on")?;
        let space = self.name()?;
        self.expect(Tok::LBrace)?;
        let mut entries = Vec::new();
        while self.peek() != &Tok::RBrace {
            if self.eat(&Tok::Comma) || self.eat(&Tok::Semi) {
                continue;
            }
            entries.push(self.table_entry()?);
        }
        self.expect(Tok::RBrace)?;
        Ok(AlgebraDecl {
            name,
            partial,
            signature,
            space,
            entries,
        })
    }

    /// `op(a, b) = c`, `a op b = c`, or `c0 = a` for a constant.
    fn table_entry(&mut self) -> PResult<TableEntry> {
        let (op, args) = if matches!(self.peek(), Tok::Op(_)) {
            let op = self.symbol_name()?;
            (op, self.name_args()?)
        } else {
            let first = self.name()?;
            match self.peek() {
                Tok::LParen => (first, self.name_args()?),
                Tok::Op(_) => {
                    let op = self.symbol_name()?;
                    let second = self.name()?;
                    (op, vec![first, second])
                }
                Tok::Eq => (first, Vec::new()),
                _ => return self.fail(&["`(`", "`=`", "operator"]),
            }
        };
        self.expect(Tok::Eq)?;
        let value = self.name()?;
        Ok(TableEntry { op, args, value })
    }

    fn name_args(&mut self) -> PResult<Vec<Name>> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if !self.eat(&Tok::RParen) {
            loop {
                args.push(self.name()?);
                if self.eat(&Tok::RParen) {
                    break;
                }
                if !self.eat(&Tok::Comma) {
                    return self.fail(&["`,`", "`)`"]);
                }
            }
        }
        Ok(args)
    }

    fn presentation(&mut self) -> PResult<PresentationDecl> {
        self.keyword("presentation")?;
        let name = self.name()?;
        self.expect(Tok::Colon)?;
        let signature = self.name()?;
        self.expect(Tok::LBrace)?;
        let mut equations = Vec::new();
        while self.peek() != &Tok::RBrace {
            if self.eat(&Tok::Semi) {
                continue;
            }
            equations.push(self.equation()?);
        }
        self.expect(Tok::RBrace)?;
        Ok(PresentationDecl {
            name,
            signature,
            equations,
        })
    }

    fn equation(&mut self) -> PResult<EquationDecl> {
        let context = if self.is_name() && self.peek_at(1) == &Tok::Turnstile {
            let space = self.name()?;
            self.bump();
            Context::Space(space)
        } else if self.is_name() && self.peek_at(1) == &Tok::TildeBrack {
            let mut hyps = Vec::new();
            loop {
                let x = self.name()?;
                self.expect(Tok::TildeBrack)?;
                let d = self.dist()?;
                self.expect(Tok::RBrack)?;
                let y = self.name()?;
                hyps.push((x, d, y));
                if self.eat(&Tok::Turnstile) {
                    break;
                }
                if !self.eat(&Tok::Comma) {
                    return self.fail(&["`,`", "`|-`"]);
                }
            }
            Context::Hypotheses(hyps)
        } else {
            Context::None
        };
        let lhs = self.term()?;
        if !self.eat(&Tok::EqBrack) {
            return self.fail(&["`=[`", "operator"]);
        }
        let eps = self.dist()?;
        self.expect(Tok::RBrack)?;
        let rhs = self.term()?;
        Ok(EquationDecl { context, lhs, eps, rhs })
    }

    /// Infix operators associate to the left and share one precedence.
    fn term(&mut self) -> PResult<STerm> {
        let mut t = self.primary()?;
        while let Tok::Op(_) = self.peek() {
            let op = self.symbol_name()?;
            let rhs = self.primary()?;
            t = STerm::App(op, vec![t, rhs]);
        }
        Ok(t)
    }

    fn primary(&mut self) -> PResult<STerm> {
        match self.peek() {
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Op(_) => {
                let op = self.symbol_name()?;
                Ok(STerm::App(op, self.term_args()?))
            }
            _ if self.is_name() => {
                let name = self.name()?;
                // A call needs its `(` right after the name.
                if self.peek() == &Tok::LParen && self.toks[self.at - 1].2 == self.toks[self.at].1 {
                    Ok(STerm::App(name, self.term_args()?))
                } else {
                    Ok(STerm::Name(name))
                }
            }
            _ => self.fail(&["term"]),
        }
    }

    fn term_args(&mut self) -> PResult<Vec<STerm>> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if !self.eat(&Tok::RParen) {
            loop {
                args.push(self.term()?);
                if self.eat(&Tok::RParen) {
                    break;
                }
                if !self.eat(&Tok::Comma) {
                    return self.fail(&["`,`", "`)`"]);
                }
            }
        }
        Ok(args)
    }

    fn map(&mut self) -> PResult<MapDecl> {
        self.keyword("map")?;
        let name = self.name()?;
        self.expect(Tok::Colon)?;
        let dom = self.name()?;
        self.expect(Tok::Arrow)?;
        let cod = self.name()?;
        self.expect(Tok::LBrace)?;
        let mut pairs = Vec::new();
        while self.peek() != &Tok::RBrace {
            if self.eat(&Tok::Comma) || self.eat(&Tok::Semi) {
                continue;
            }
            let x = self.name()?;
            self.expect(Tok::Arrow)?;
            pairs.push((x, self.name()?));
        }
        self.expect(Tok::RBrace)?;
        Ok(MapDecl { name, dom, cod, pairs })
    }

    fn run(&mut self) -> PResult<RunDecl> {
        self.keyword("run")?;
        let command = self.name()?;
        self.expect(Tok::LBrace)?;
        let mut args = Vec::new();
        while self.peek() != &Tok::RBrace {
            if self.eat(&Tok::Comma) || self.eat(&Tok::Semi) {
                continue;
            }
            let key = self.name()?;
            // `key=[a]` lexes its `=[` as one token.
            let value = if self.eat(&Tok::EqBrack) {
                self.list_rest()?
            } else {
                self.expect(Tok::Eq)?;
                self.value()?
            };
            args.push((key, value));
        }
        self.expect(Tok::RBrace)?;
        Ok(RunDecl { command, args })
    }

    fn value(&mut self) -> PResult<Value> {
        match self.peek() {
            Tok::LBrack => {
                self.bump();
                self.list_rest()
            }
            Tok::Int(_) => Ok(Value::Dist(self.dist()?)),
            Tok::Ident(s) if s == "inf" => Ok(Value::Dist(self.dist()?)),
            Tok::Ident(_) | Tok::Str(_) => Ok(Value::Name(self.name()?)),
            Tok::Op(_) => Ok(Value::Name(self.symbol_name()?)),
            _ => self.fail(&["name", "number", "`[`"]),
        }
    }

    fn list_rest(&mut self) -> PResult<Value> {
        let mut items = Vec::new();
        if !self.eat(&Tok::RBrack) {
            loop {
                items.push(self.value()?);
                if self.eat(&Tok::RBrack) {
                    break;
                }
                if !self.eat(&Tok::Comma) {
                    return self.fail(&["`,`", "`]`"]);
                }
            }
        }
        Ok(Value::List(items))
    }
}

const BLOCK_KEYWORDS: &[&str] = &[
    "`space`",
    "`signature`",
    "`algebra`",
    "`partial`",
    "`presentation`",
    "`map`",
    "`run`",
];

pub fn parse(text: &str) -> Result<Document, Diagnostic> {
    let toks = lex(text)?;
    Parser { toks, at: 0 }.document()
}
