//! Lexer and recursive-descent parser for .chow programs, with static
//! checking of identifier definition order and binding kinds.

use crate::ast::*;
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Int(n) => write!(f, "integer {n}"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub found: String,
    pub expected: Vec<String>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}, found {}", self.line, self.col, self.message, self.found)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

const KEYWORDS: &[&str] = &[
    "space", "bundle", "class", "print", "assert_eq", "verify", "on", "point", "proj",
    "projbundle", "blowup", "total", "formal", "dim", "rank", "linear", "sum", "dual", "quot",
    "tensorline", "zeta", "chern", "segre", "pullback", "pushforward", "integrate",
];

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0, line: 1, col: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.src[self.pos..].chars().next()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        loop {
            while let Some(c) = self.peek() {
                if c == '#' {
                    while let Some(c2) = self.peek() {
                        if c2 == '\n' {
                            break;
                        }
                        self.bump();
                    }
                } else if c.is_whitespace() {
                    self.bump();
                } else {
                    break;
                }
            }
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek() else {
                out.push(Spanned { tok: Tok::Eof, line, col });
                return Ok(out);
            };
            if c.is_ascii_alphabetic() || c == '_' {
                let start = self.pos;
                while let Some(c2) = self.peek() {
                    if c2.is_ascii_alphanumeric() || c2 == '_' {
                        self.bump();
                    } else {
                        break;
                    }
                }
                out.push(Spanned {
                    tok: Tok::Ident(self.src[start..self.pos].to_string()),
                    line,
                    col,
                });
            } else if c.is_ascii_digit() {
                let start = self.pos;
                while let Some(c2) = self.peek() {
                    if c2.is_ascii_digit() {
                        self.bump();
                    } else {
                        break;
                    }
                }
                let text = &self.src[start..self.pos];
                let value = text.parse::<i64>().map_err(|_| ParseError {
                    line,
                    col,
                    found: text.to_string(),
                    expected: vec!["integer".into()],
                    message: format!("integer literal `{text}` out of range"),
                })?;
                out.push(Spanned { tok: Tok::Int(value), line, col });
            } else if c == '-' && self.src[self.pos..].starts_with("->") {
                self.bump();
                self.bump();
                out.push(Spanned { tok: Tok::Sym("->"), line, col });
            } else {
                let sym = match c {
                    '=' => "=",
                    ',' => ",",
                    '(' => "(",
                    ')' => ")",
                    '{' => "{",
                    '}' => "}",
                    '*' => "*",
                    '+' => "+",
                    '-' => "-",
                    '^' => "^",
                    other => {
                        return Err(ParseError {
                            line,
                            col,
                            found: other.to_string(),
                            expected: vec![],
                            message: format!("unexpected character `{other}`"),
                        })
                    }
                };
                self.bump();
                out.push(Spanned { tok: Tok::Sym(sym), line, col });
            }
        }
    }
}

/// Binding kinds tracked for static checking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Space,
    Bundle,
    Class,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Space => write!(f, "space"),
            Kind::Bundle => write!(f, "bundle"),
            Kind::Class => write!(f, "class"),
        }
    }
}

pub struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    symbols: HashMap<String, Kind>,
}

pub fn parse(src: &str) -> Result<Program, ParseError> {
    let toks = Lexer::new(src).tokens()?;
    let mut p = Parser { toks, pos: 0, symbols: HashMap::new() };
    p.program()
}

impl Parser {
    fn here(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn err(&self, message: impl Into<String>, expected: &[&str]) -> ParseError {
        let s = self.here();
        ParseError {
            line: s.line,
            col: s.col,
            found: s.tok.to_string(),
            expected: expected.iter().map(|e| e.to_string()).collect(),
            message: message.into(),
        }
    }

    fn at_sym(&self, sym: &str) -> bool {
        matches!(&self.here().tok, Tok::Sym(s) if *s == sym)
    }

    fn eat_sym(&mut self, sym: &'static str) -> Result<(), ParseError> {
        if self.at_sym(sym) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err("syntax error", &[sym]))
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.here().tok, Tok::Ident(s) if s == kw)
    }

    fn eat_keyword(&mut self, kw: &'static str) -> Result<(), ParseError> {
        if self.at_keyword(kw) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err("syntax error", &[kw]))
        }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        match &self.here().tok {
            Tok::Int(n) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.err("syntax error", &["integer"])),
        }
    }

    fn uint(&mut self) -> Result<u32, ParseError> {
        let n = self.int()?;
        u32::try_from(n).map_err(|_| self.err("expected a nonnegative integer", &["integer"]))
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match &self.here().tok {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            Tok::Ident(s) => Err(self.err(
                format!("`{s}` is a reserved word"),
                &["identifier"],
            )),
            _ => Err(self.err("syntax error", &["identifier"])),
        }
    }

    fn use_ident(&mut self, want: Kind) -> Result<String, ParseError> {
        let before = (self.here().line, self.here().col);
        let name = self.ident()?;
        match self.symbols.get(&name) {
            Some(kind) if *kind == want => Ok(name),
            Some(kind) => Err(ParseError {
                line: before.0,
                col: before.1,
                found: name.clone(),
                expected: vec![format!("a {want} identifier")],
                message: format!("`{name}` is a {kind}, not a {want}"),
            }),
            None => Err(ParseError {
                line: before.0,
                col: before.1,
                found: name.clone(),
                expected: vec![format!("a {want} identifier")],
                message: format!("unknown identifier `{name}`"),
            }),
        }
    }

    fn define(&mut self, name: &str, kind: Kind) -> Result<(), ParseError> {
        if self.symbols.contains_key(name) {
            return Err(self.err(format!("`{name}` is already defined"), &[]));
        }
        self.symbols.insert(name.to_string(), kind);
        Ok(())
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut statements = Vec::new();
        while !matches!(self.here().tok, Tok::Eof) {
            statements.push(self.stmt()?);
        }
        Ok(Program { statements })
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        let line = self.here().line;
        let kind = if self.at_keyword("space") {
            self.pos += 1;
            let name = self.ident()?;
            self.eat_sym("=")?;
            let expr = self.sexpr()?;
            self.define(&name, Kind::Space)?;
            // blowups implicitly name their exceptional divisor and center
            if matches!(expr, SExpr::Blowup { .. }) {
                self.define(&format!("{name}_E"), Kind::Space)?;
                self.define(&format!("{name}_Z"), Kind::Space)?;
            }
            StmtKind::Space { name, expr }
        } else if self.at_keyword("bundle") {
            self.pos += 1;
            let name = self.ident()?;
            self.eat_keyword("on")?;
            let on = self.use_ident(Kind::Space)?;
            self.eat_sym("=")?;
            let expr = self.bexpr()?;
            self.define(&name, Kind::Bundle)?;
            StmtKind::Bundle { name, on, expr }
        } else if self.at_keyword("class") {
            self.pos += 1;
            let name = self.ident()?;
            self.eat_sym("=")?;
            let expr = self.cexpr()?;
            self.define(&name, Kind::Class)?;
            StmtKind::Class { name, expr }
        } else if self.at_keyword("print") {
            self.pos += 1;
            StmtKind::Print(self.cexpr()?)
        } else if self.at_keyword("assert_eq") {
            self.pos += 1;
            let a = self.cexpr()?;
            self.eat_sym(",")?;
            let b = self.cexpr()?;
            StmtKind::AssertEq(a, b)
        } else if self.at_keyword("verify") {
            self.pos += 1;
            let suite = self.ident()?;
            let mut params = Vec::new();
            if self.at_sym("(") {
                self.pos += 1;
                loop {
                    let key = self.ident()?;
                    self.eat_sym("=")?;
                    let value = match &self.here().tok {
                        Tok::Int(n) => {
                            let v = n.to_string();
                            self.pos += 1;
                            v
                        }
                        Tok::Ident(s) => {
                            let v = s.clone();
                            self.pos += 1;
                            v
                        }
                        _ => {
                            return Err(
                                self.err("syntax error", &["integer", "identifier"])
                            )
                        }
                    };
                    params.push((key, value));
                    if self.at_sym(",") {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                self.eat_sym(")")?;
            }
            StmtKind::Verify { suite, params }
        } else {
            return Err(self.err(
                "syntax error",
                &["space", "bundle", "class", "print", "assert_eq", "verify"],
            ));
        };
        Ok(Stmt { line, kind })
    }

    fn sexpr(&mut self) -> Result<SExpr, ParseError> {
        if self.at_keyword("point") {
            self.pos += 1;
            Ok(SExpr::Point)
        } else if self.at_keyword("proj") {
            self.pos += 1;
            Ok(SExpr::Proj(self.uint()?))
        } else if self.at_keyword("projbundle") {
            self.pos += 1;
            self.eat_sym("(")?;
            let base = self.use_ident(Kind::Space)?;
            self.eat_sym(",")?;
            let bundle = self.use_ident(Kind::Bundle)?;
            self.eat_sym(")")?;
            Ok(SExpr::ProjBundle { base, bundle })
        } else if self.at_keyword("blowup") {
            self.pos += 1;
            self.eat_sym("(")?;
            let base = self.use_ident(Kind::Space)?;
            self.eat_sym(",")?;
            let center = if self.at_keyword("point") {
                self.pos += 1;
                EmbSpec::Point
            } else if self.at_keyword("linear") {
                self.pos += 1;
                EmbSpec::Linear(self.uint()?)
            } else {
                return Err(self.err(
                    "syntax error",
                    &["point", "linear"],
                ));
            };
            self.eat_sym(")")?;
            Ok(SExpr::Blowup { base, center })
        } else if self.at_keyword("total") {
            self.pos += 1;
            self.eat_sym("(")?;
            let base = self.use_ident(Kind::Space)?;
            self.eat_sym(",")?;
            let bundle = self.use_ident(Kind::Bundle)?;
            self.eat_sym(")")?;
            Ok(SExpr::Total { base, bundle })
        } else if self.at_keyword("formal") {
            self.pos += 1;
            self.eat_sym("(")?;
            self.eat_keyword("dim")?;
            self.eat_sym("=")?;
            let dim = self.uint()?;
            let mut bundles = Vec::new();
            while self.at_sym(",") {
                self.pos += 1;
                let name = self.ident()?;
                self.eat_sym("=")?;
                let rank = self.uint()?;
                bundles.push((name, rank));
            }
            self.eat_sym(")")?;
            Ok(SExpr::Formal { dim, bundles })
        } else {
            Err(self.err(
                "syntax error",
                &["point", "proj", "projbundle", "blowup", "total", "formal"],
            ))
        }
    }

    fn bexpr(&mut self) -> Result<BExpr, ParseError> {
        if self.at_keyword("sum") {
            self.pos += 1;
            self.eat_sym("{")?;
            let mut factors = vec![self.cexpr()?];
            while self.at_sym(",") {
                self.pos += 1;
                factors.push(self.cexpr()?);
            }
            self.eat_sym("}")?;
            Ok(BExpr::Sum(factors))
        } else if self.at_keyword("dual") {
            self.pos += 1;
            self.eat_sym("(")?;
            let b = self.use_ident(Kind::Bundle)?;
            self.eat_sym(")")?;
            Ok(BExpr::Dual(b))
        } else if self.at_keyword("quot") {
            self.pos += 1;
            self.eat_sym("(")?;
            let a = self.use_ident(Kind::Bundle)?;
            self.eat_sym(",")?;
            let b = self.use_ident(Kind::Bundle)?;
            self.eat_sym(")")?;
            Ok(BExpr::Quot(a, b))
        } else if self.at_keyword("tensorline") {
            self.pos += 1;
            self.eat_sym("(")?;
            let b = self.use_ident(Kind::Bundle)?;
            self.eat_sym(",")?;
            let c = self.cexpr()?;
            self.eat_sym(")")?;
            Ok(BExpr::TensorLine(b, c))
        } else if self.at_keyword("formal") {
            self.pos += 1;
            self.eat_sym("(")?;
            self.eat_keyword("rank")?;
            self.eat_sym("=")?;
            let rank = self.uint()?;
            self.eat_sym(")")?;
            Ok(BExpr::Formal { rank })
        } else {
            Err(self.err(
                "syntax error",
                &["sum", "dual", "quot", "tensorline", "formal"],
            ))
        }
    }

    fn cexpr(&mut self) -> Result<CExpr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.at_sym("+") {
                self.pos += 1;
                acc = CExpr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.at_sym("-") {
                self.pos += 1;
                acc = CExpr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<CExpr, ParseError> {
        let mut acc = self.factor()?;
        while self.at_sym("*") {
            self.pos += 1;
            acc = CExpr::Mul(Box::new(acc), Box::new(self.factor()?));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<CExpr, ParseError> {
        let base = self.atom()?;
        if self.at_sym("^") {
            self.pos += 1;
            let k = self.uint()?;
            Ok(CExpr::Pow(Box::new(base), k))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<CExpr, ParseError> {
        if self.at_sym("-") {
            self.pos += 1;
            return Ok(CExpr::Neg(Box::new(self.atom()?)));
        }
        if self.at_sym("(") {
            self.pos += 1;
            let e = self.cexpr()?;
            self.eat_sym(")")?;
            return Ok(e);
        }
        match &self.here().tok {
            Tok::Int(n) => {
                let n = *n;
                self.pos += 1;
                Ok(CExpr::Int(n))
            }
            Tok::Ident(s) => match s.as_str() {
                "zeta" => {
                    self.pos += 1;
                    self.eat_sym("(")?;
                    let sp = self.use_ident(Kind::Space)?;
                    self.eat_sym(")")?;
                    Ok(CExpr::Zeta(sp))
                }
                "chern" => {
                    self.pos += 1;
                    self.eat_sym("(")?;
                    let i = self.uint()?;
                    self.eat_sym(",")?;
                    let b = self.use_ident(Kind::Bundle)?;
                    self.eat_sym(")")?;
                    Ok(CExpr::Chern(i, b))
                }
                "segre" => {
                    self.pos += 1;
                    self.eat_sym("(")?;
                    let i = self.uint()?;
                    self.eat_sym(",")?;
                    let b = self.use_ident(Kind::Bundle)?;
                    self.eat_sym(")")?;
                    Ok(CExpr::Segre(i, b))
                }
                "pullback" | "pushforward" => {
                    let push = s == "pushforward";
                    self.pos += 1;
                    self.eat_sym("(")?;
                    let a = self.use_ident(Kind::Space)?;
                    self.eat_sym("->")?;
                    let b = self.use_ident(Kind::Space)?;
                    self.eat_sym(",")?;
                    let e = self.cexpr()?;
                    self.eat_sym(")")?;
                    if push {
                        Ok(CExpr::Pushforward(a, b, Box::new(e)))
                    } else {
                        Ok(CExpr::Pullback(a, b, Box::new(e)))
                    }
                }
                "integrate" => {
                    self.pos += 1;
                    self.eat_sym("(")?;
                    let e = self.cexpr()?;
                    self.eat_sym(")")?;
                    Ok(CExpr::Integrate(Box::new(e)))
                }
                _ => {
                    let name = self.use_ident(Kind::Class)?;
                    Ok(CExpr::Ident(name))
                }
            },
            _ => Err(self.err(
                "syntax error",
                &["integer", "identifier", "zeta", "chern", "segre", "pullback", "pushforward", "integrate", "(", "-"],
            )),
        }
    }
}
