//! Pratt parser for the ASCII expression grammar.
//!
//! ```text
//! expr    := expr ('+' | '-') expr | expr ('*' | '/') expr | '-' expr
//!          | expr '^' ['-' | '+'] INT | '(' expr ')' | atom
//! atom    := NUMBER | coordinate | name | name '_{' var (',' var)* '}'
//!          | func '(' expr ')'
//! ```
//!
//! Unary minus binds tighter than `*` and looser than `^`, so `-x1^2` is
//! `-(x1^2)`. Numbers are integers or decimals and are read exactly.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Num;
use thiserror::Error;

use super::{Expr, Func, OpaqueDerivative, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown identifier `{name}` at position {position}")]
    UnknownIdentifier { name: String, position: usize },
    #[error("exponent at position {position} is not an integer literal")]
    NonIntegerExponent { position: usize },
    #[error("division by literal zero at position {position}")]
    DivisionByZero { position: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. }
            | ParseError::UnknownIdentifier { position, .. }
            | ParseError::NonIntegerExponent { position }
            | ParseError::DivisionByZero { position } => *position,
        }
    }
}

/// Identifiers an expression may use.
#[derive(Debug, Clone, Default)]
pub struct ParseContext {
    coordinates: Vec<Var>,
    functions: BTreeMap<String, Vec<Var>>,
}

impl ParseContext {
    pub fn new(coordinates: &[Var]) -> Self {
        ParseContext {
            coordinates: coordinates.to_vec(),
            functions: BTreeMap::new(),
        }
    }

    /// Declares an opaque function depending on the given coordinates.
    pub fn with_function(mut self, name: &str, deps: &[Var]) -> Self {
        self.functions.insert(name.to_string(), deps.to_vec());
        self
    }

    pub fn coordinates(&self) -> &[Var] {
        &self.coordinates
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational, bool),
    Ident(String),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Lexer<'_> {
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() || c == b'.' {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let int_end = self.pos;
            let mut is_integer = true;
            let mut frac_digits = 0;
            if self.src.get(self.pos) == Some(&b'.') {
                is_integer = false;
                self.pos += 1;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                    frac_digits += 1;
                }
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let digits: String = text.chars().filter(|c| *c != '.').collect();
            if digits.is_empty() || (int_end == start && frac_digits == 0) {
                return Err(ParseError::Syntax {
                    position: start,
                    message: "malformed number".into(),
                });
            }
            let numer = BigInt::from_str_radix(&digits, 10).unwrap();
            let denom = num_traits::pow(BigInt::from(10), frac_digits);
            return Ok((Tok::Num(BigRational::new(numer, denom), is_integer), start));
        }
        if c.is_ascii_alphabetic() {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                self.pos += 1;
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            return Ok((Tok::Ident(text.to_string()), start));
        }
        if b"+-*/^()_{},".contains(&c) {
            self.pos += 1;
            return Ok((Tok::Op(c as char), start));
        }
        Err(ParseError::Syntax {
            position: start,
            message: format!("unexpected character `{}`", c as char),
        })
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    pos: usize,
    ctx: &'a ParseContext,
}

const UNARY_BP: u8 = 5;
const POW_BP: u8 = 7;

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(), ParseError> {
        let (tok, pos) = self.lexer.next()?;
        self.tok = tok;
        self.pos = pos;
        Ok(())
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            position: self.pos,
            message: message.into(),
        })
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.tok == Tok::Op(c) {
            self.bump()
        } else {
            self.syntax(format!("expected `{c}`"))
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.prefix()?;
        loop {
            let op = match &self.tok {
                Tok::Op(c) if "+-*/^".contains(*c) => *c,
                _ => break,
            };
            let (lbp, rbp) = match op {
                '+' | '-' => (1, 2),
                '*' | '/' => (3, 4),
                _ => (POW_BP, POW_BP + 1),
            };
            if lbp < min_bp {
                break;
            }
            let op_pos = self.pos;
            self.bump()?;
            if op == '^' {
                let n = self.exponent()?;
                lhs = lhs.pow(n);
                continue;
            }
            let rhs = self.expr(rbp)?;
            lhs = match op {
                '+' => lhs + rhs,
                '-' => lhs - rhs,
                '*' => lhs * rhs,
                _ => {
                    if rhs.is_literal_zero() {
                        return Err(ParseError::DivisionByZero { position: op_pos });
                    }
                    lhs / rhs
                }
            };
        }
        Ok(lhs)
    }

    fn exponent(&mut self) -> Result<i64, ParseError> {
        let start = self.pos;
        let parenthesized = self.tok == Tok::Op('(');
        if parenthesized {
            self.bump()?;
        }
        let mut sign = 1;
        match self.tok {
            Tok::Op('-') => {
                sign = -1;
                self.bump()?;
            }
            Tok::Op('+') => self.bump()?,
            _ => {}
        }
        let n: i64 = match &self.tok {
            Tok::Num(q, true) => q
                .numer()
                .try_into()
                .map_err(|_| ParseError::NonIntegerExponent { position: start })?,
            _ => return Err(ParseError::NonIntegerExponent { position: start }),
        };
        self.bump()?;
        if parenthesized {
            self.expect(')')?;
        }
        Ok(sign * n)
    }

    fn prefix(&mut self) -> Result<Expr, ParseError> {
        match self.tok.clone() {
            Tok::Num(q, _) => {
                self.bump()?;
                Ok(Expr::num(q))
            }
            Tok::Op('-') => {
                self.bump()?;
                Ok(-self.expr(UNARY_BP)?)
            }
            Tok::Op('+') => {
                self.bump()?;
                self.expr(UNARY_BP)
            }
            Tok::Op('(') => {
                self.bump()?;
                let e = self.expr(0)?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let pos = self.pos;
                self.bump()?;
                self.identifier(name, pos)
            }
            Tok::End => self.syntax("unexpected end of input"),
            Tok::Op(c) => self.syntax(format!("unexpected `{c}`")),
        }
    }

    fn identifier(&mut self, name: String, pos: usize) -> Result<Expr, ParseError> {
        if let Some(f) = Func::from_name(&name) {
            if self.tok == Tok::Op('(') {
                self.bump()?;
                let arg = self.expr(0)?;
                self.expect(')')?;
                return Ok(Expr::apply(f, arg));
            }
        }
        if let Some(v) = Var::from_name(&name) {
            if self.ctx.coordinates.contains(&v) {
                return Ok(Expr::var(v));
            }
        }
        if let Some(deps) = self.ctx.functions.get(&name) {
            let mut o = OpaqueDerivative::new(&name, deps);
            if self.tok == Tok::Op('_') {
                self.bump()?;
                self.expect('{')?;
                loop {
                    let vpos = self.pos;
                    let Tok::Ident(vname) = self.tok.clone() else {
                        return self.syntax("expected a coordinate in derivative index");
                    };
                    let unknown = || ParseError::UnknownIdentifier {
                        name: vname.clone(),
                        position: vpos,
                    };
                    let v = Var::from_name(&vname).ok_or_else(unknown)?;
                    o = o.derive(v).ok_or_else(|| ParseError::Syntax {
                        position: vpos,
                        message: format!("{name} does not depend on {vname}"),
                    })?;
                    self.bump()?;
                    if self.tok == Tok::Op(',') {
                        self.bump()?;
                    } else {
                        break;
                    }
                }
                self.expect('}')?;
            }
            return Ok(Expr::opaque(o));
        }
        Err(ParseError::UnknownIdentifier {
            name,
            position: pos,
        })
    }
}

/// Parses `text` against the declared identifiers and returns its canonical form.
pub fn parse_expr(text: &str, ctx: &ParseContext) -> Result<Expr, ParseError> {
    let mut p = Parser {
        lexer: Lexer {
            src: text.as_bytes(),
            pos: 0,
        },
        tok: Tok::End,
        pos: 0,
        ctx,
    };
    p.bump()?;
    let e = p.expr(0)?;
    if p.tok != Tok::End {
        return p.syntax("unexpected trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> ParseContext {
        ParseContext::new(&[Var::T, Var::X(0), Var::X(1), Var::X(2)])
            .with_function("F", &[Var::T, Var::X(0), Var::X(1), Var::X(2)])
    }

    fn p(s: &str) -> Expr {
        parse_expr(s, &ctx()).unwrap()
    }

    #[test]
    fn literals_and_identities() {
        assert!(p("0").is_literal_zero());
        assert!(p("x1^2 - x1*x1").is_literal_zero());
        assert_eq!(p("0.25"), Expr::rat(1, 4));
        assert_eq!(p("3/6"), Expr::rat(1, 2));
    }

    #[test]
    fn quotient_round_trip() {
        let e = p("3*x2^2/(2*x1)");
        assert_eq!(e.to_string(), "3*x2^2/(2*x1)");
    }

    #[test]
    fn precedence() {
        assert_eq!(p("-x1^2"), -(Expr::x(1).pow(2)));
        assert_eq!(p("2^-1"), Expr::rat(1, 2));
        assert_eq!(p("x0 - x1 - x2"), Expr::x(0) - Expr::x(1) - Expr::x(2));
        assert_eq!(p("x0/x1/x2"), Expr::x(0) / (Expr::x(1) * Expr::x(2)));
    }

    #[test]
    fn opaque_derivatives() {
        let a = p("F_{x1,t}");
        let b = p("F_{t,x1}");
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "F_{t,x1}");
    }

    #[test]
    fn errors() {
        let c = ctx();
        assert!(matches!(
            parse_expr("x1 + y", &c),
            Err(ParseError::UnknownIdentifier { position: 5, .. })
        ));
        assert!(matches!(
            parse_expr("x3", &c),
            Err(ParseError::UnknownIdentifier { .. })
        ));
        assert!(matches!(
            parse_expr("x1^x2", &c),
            Err(ParseError::NonIntegerExponent { position: 3 })
        ));
        assert!(matches!(
            parse_expr("x1^0.5", &c),
            Err(ParseError::NonIntegerExponent { .. })
        ));
        assert!(matches!(
            parse_expr("x1/(2-2)", &c),
            Err(ParseError::DivisionByZero { position: 2 })
        ));
        assert!(matches!(
            parse_expr("(x1 + ", &c),
            Err(ParseError::Syntax { position: 6, .. })
        ));
        assert!(matches!(
            parse_expr("x1 $ x2", &c),
            Err(ParseError::Syntax { position: 3, .. })
        ));
    }

    #[test]
    fn functions() {
        let e = p("sin(x0)^2 + cos(x0)^2");
        assert_eq!(e.to_string(), "cos(x0)^2 + sin(x0)^2");
        assert!(matches!(
            parse_expr("sinh(x0)", &ctx()),
            Err(ParseError::UnknownIdentifier { .. })
        ));
    }
}
