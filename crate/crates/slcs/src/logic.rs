//! SLCS formulas: abstract syntax, a concrete-syntax parser, a
//! round-trippable pretty printer and desugaring of the derived operators.
//!
//! Concrete syntax, loosest to tightest binding:
//!
//! ```text
//! formula := impl | impl ("R"|"P"|"S") impl     R/P/S are non-associative
//! impl    := or ("->" impl)?                    right-associative
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "!" unary | "N" unary | atomish
//! atomish := "true" | "false" | IDENT | "(" formula ")"
//! ```
//!
//! Atoms are identifiers `[A-Za-z_][A-Za-z0-9_]*`; the words `N`, `R`, `P`,
//! `S`, `true`, `false` are reserved. Chaining R/P/S without parentheses is
//! rejected rather than silently associated.

use std::fmt;

use thiserror::Error;

/// An SLCS formula.
///
/// `Atom` through `Prop` are the core kinds the checker evaluates; `False`,
/// `Or`, `Implies` and `Surr` are derived and removed by
/// [`desugar`](Formula::desugar). `Reach(φ, ψ)` is "reachable from": a
/// forward walk from a ψ-point arrives here through φ-points. `Prop(φ, ψ)`
/// is "propagates to": a forward walk from here through φ-points hits a
/// ψ-point. `Surr(φ, ψ)` is "surrounded by ψ while in φ".
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Atom(String),
    True,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Near(Box<Formula>),
    Reach(Box<Formula>, Box<Formula>),
    Prop(Box<Formula>, Box<Formula>),
    False,
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Surr(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }
    pub fn near(f: Formula) -> Formula {
        Formula::Near(Box::new(f))
    }
    pub fn reach(a: Formula, b: Formula) -> Formula {
        Formula::Reach(Box::new(a), Box::new(b))
    }
    pub fn prop(a: Formula, b: Formula) -> Formula {
        Formula::Prop(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }
    pub fn surr(a: Formula, b: Formula) -> Formula {
        Formula::Surr(Box::new(a), Box::new(b))
    }

    /// Rewrites the derived kinds away:
    /// `false = !true`, `a | b = !(!a & !b)`, `a -> b = !(a & !b)` and
    /// `a S b = a & !(a R !(a | b))`. The result contains core kinds only
    /// and the transformation is idempotent.
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::Atom(_) | Formula::True => self.clone(),
            Formula::Not(f) => Formula::not(f.desugar()),
            Formula::And(a, b) => Formula::and(a.desugar(), b.desugar()),
            Formula::Near(f) => Formula::near(f.desugar()),
            Formula::Reach(a, b) => Formula::reach(a.desugar(), b.desugar()),
            Formula::Prop(a, b) => Formula::prop(a.desugar(), b.desugar()),
            Formula::False => Formula::not(Formula::True),
            Formula::Or(a, b) => {
                Formula::not(Formula::and(
                    Formula::not(a.desugar()),
                    Formula::not(b.desugar()),
                ))
            }
            Formula::Implies(a, b) => {
                Formula::not(Formula::and(a.desugar(), Formula::not(b.desugar())))
            }
            Formula::Surr(a, b) => {
                let a = a.desugar();
                let escape = Formula::not(Formula::or(a.clone(), b.desugar()).desugar());
                Formula::and(a.clone(), Formula::not(Formula::reach(a, escape)))
            }
        }
    }

    /// True when no derived kind occurs anywhere in the tree.
    pub fn is_core(&self) -> bool {
        match self {
            Formula::Atom(_) | Formula::True => true,
            Formula::Not(f) | Formula::Near(f) => f.is_core(),
            Formula::And(a, b) | Formula::Reach(a, b) | Formula::Prop(a, b) => {
                a.is_core() && b.is_core()
            }
            Formula::False | Formula::Or(..) | Formula::Implies(..) | Formula::Surr(..) => false,
        }
    }
}

/// Parse failure with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    True,
    False,
    Near,
    Reach,
    Prop,
    Surr,
    Bang,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(name) => return write!(f, "identifier {name:?}"),
            Tok::True => "'true'",
            Tok::False => "'false'",
            Tok::Near => "'N'",
            Tok::Reach => "'R'",
            Tok::Prop => "'P'",
            Tok::Surr => "'S'",
            Tok::Bang => "'!'",
            Tok::Amp => "'&'",
            Tok::Pipe => "'|'",
            Tok::Arrow => "'->'",
            Tok::LParen => "'('",
            Tok::RParen => "')'",
        };
        f.write_str(s)
    }
}

struct Spanned {
    tok: Tok,
    line: u32,
    column: u32,
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    column: u32,
}

impl Cursor {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> char {
        let c = self.chars[self.pos];
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        c
    }
}

fn lex(text: &str) -> Result<(Vec<Spanned>, (u32, u32)), ParseError> {
    let mut toks = Vec::new();
    let mut cur = Cursor { chars: text.chars().collect(), pos: 0, line: 1, column: 1 };
    while let Some(c) = cur.peek() {
        let (line, column) = (cur.line, cur.column);
        let err = |message: String| ParseError { line, column, message };
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut ident = String::new();
            while let Some(c) = cur.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    ident.push(cur.bump());
                } else {
                    break;
                }
            }
            let tok = match ident.as_str() {
                "true" => Tok::True,
                "false" => Tok::False,
                "N" => Tok::Near,
                "R" => Tok::Reach,
                "P" => Tok::Prop,
                "S" => Tok::Surr,
                _ => Tok::Ident(ident),
            };
            toks.push(Spanned { tok, line, column });
            continue;
        }
        let tok = match c {
            '!' => Tok::Bang,
            '&' => Tok::Amp,
            '|' => Tok::Pipe,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '-' => {
                cur.bump();
                match cur.peek() {
                    Some('>') => Tok::Arrow,
                    _ => return Err(err("expected '->'".into())),
                }
            }
            other => return Err(err(format!("unexpected character {other:?}"))),
        };
        cur.bump();
        toks.push(Spanned { tok, line, column });
    }
    Ok((toks, (cur.line, cur.column)))
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (u32, u32),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn next(&mut self) -> Option<&Spanned> {
        let s = self.toks.get(self.pos);
        if s.is_some() {
            self.pos += 1;
        }
        s
    }

    fn here(&self) -> (u32, u32) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.column))
            .unwrap_or(self.end)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (line, column) = self.here();
        Err(ParseError { line, column, message: message.into() })
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(tok) if *tok == want => {
                self.pos += 1;
                Ok(())
            }
            Some(tok) => self.fail(format!("expected {want}, found {tok}")),
            None => self.fail(format!("expected {want}, found end of input")),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.implication()?;
        let op = match self.peek() {
            Some(Tok::Reach) => Formula::reach,
            Some(Tok::Prop) => Formula::prop,
            Some(Tok::Surr) => Formula::surr,
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.implication()?;
        if matches!(self.peek(), Some(Tok::Reach | Tok::Prop | Tok::Surr)) {
            return self.fail("R, P and S are non-associative; parenthesize the chain");
        }
        Ok(op(lhs, rhs))
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if matches!(self.peek(), Some(Tok::Arrow)) {
            self.pos += 1;
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while matches!(self.peek(), Some(Tok::Pipe)) {
            self.pos += 1;
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while matches!(self.peek(), Some(Tok::Amp)) {
            self.pos += 1;
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::Near) => {
                self.pos += 1;
                Ok(Formula::near(self.unary()?))
            }
            _ => self.atomish(),
        }
    }

    fn atomish(&mut self) -> Result<Formula, ParseError> {
        match self.next().map(|s| s.tok.clone()) {
            Some(Tok::True) => Ok(Formula::True),
            Some(Tok::False) => Ok(Formula::False),
            Some(Tok::Ident(name)) => Ok(Formula::Atom(name)),
            Some(Tok::LParen) => {
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Some(tok) => {
                self.pos -= 1;
                self.fail(format!("expected a formula, found {tok}"))
            }
            None => self.fail("expected a formula, found end of input"),
        }
    }
}

/// Parses the concrete syntax described in the module docs.
///
/// ```
/// use slcs::parse;
///
/// let f = parse("!p0 & N (a | b)").unwrap();
/// assert_eq!(f.to_string(), "!p0 & N (a | b)");
/// assert_eq!(parse("p0 &").unwrap_err().to_string(), "line 1, column 5: expected a formula, found end of input");
/// ```
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let (toks, end) = lex(text)?;
    let mut parser = Parser { toks, pos: 0, end };
    let f = parser.formula()?;
    match parser.peek() {
        None => Ok(f),
        Some(tok) => parser.fail(format!("expected end of input, found {tok}")),
    }
}

/// Binding strength used by the printer; higher binds tighter.
fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Reach(..) | Formula::Prop(..) | Formula::Surr(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(..) => 3,
        Formula::And(..) => 4,
        Formula::Not(..) | Formula::Near(..) => 5,
        Formula::Atom(_) | Formula::True | Formula::False => 6,
    }
}

fn show(f: &Formula, min_prec: u8, out: &mut String) {
    let wrap = prec(f) < min_prec;
    if wrap {
        out.push('(');
    }
    match f {
        Formula::Atom(name) => out.push_str(name),
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Not(g) => {
            out.push('!');
            show(g, 5, out);
        }
        Formula::Near(g) => {
            out.push_str("N ");
            show(g, 5, out);
        }
        Formula::And(a, b) => {
            show(a, 4, out);
            out.push_str(" & ");
            show(b, 5, out);
        }
        Formula::Or(a, b) => {
            show(a, 3, out);
            out.push_str(" | ");
            show(b, 4, out);
        }
        Formula::Implies(a, b) => {
            show(a, 3, out);
            out.push_str(" -> ");
            show(b, 2, out);
        }
        Formula::Reach(a, b) => {
            show(a, 2, out);
            out.push_str(" R ");
            show(b, 2, out);
        }
        Formula::Prop(a, b) => {
            show(a, 2, out);
            out.push_str(" P ");
            show(b, 2, out);
        }
        Formula::Surr(a, b) => {
            show(a, 2, out);
            out.push_str(" S ");
            show(b, 2, out);
        }
    }
    if wrap {
        out.push(')');
    }
}

/// Renders with the fewest parentheses that still round-trip:
/// `parse(&f.to_string()) == f` for every formula.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        show(self, 0, &mut out);
        f.write_str(&out)
    }
}
