//! Rendering in the input grammar, so that printed expressions parse back
//! to the same canonical value.

use std::fmt::{self, Display, Write};

use num_rational::BigRational;
use num_traits::{One, Signed};

use super::{split_term, Expr, Node, Symbol, Var};

impl Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Coord(v) => f.write_str(&v.name()),
            Symbol::Opaque(o) => {
                f.write_str(o.name())?;
                let idx = o.multi_index();
                if idx.is_empty() {
                    return Ok(());
                }
                f.write_str("_{")?;
                let mut first = true;
                for (v, n) in idx {
                    for _ in 0..n {
                        if !first {
                            f.write_char(',')?;
                        }
                        first = false;
                        f.write_str(&v.name())?;
                    }
                }
                f.write_char('}')
            }
        }
    }
}

impl Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(&mut s, self);
        f.write_str(&s)
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match e.node() {
        Node::Add(terms) => {
            for (i, t) in terms.iter().enumerate() {
                let (c, mono) = split_term(t);
                if i == 0 {
                    write_term(out, &c, mono);
                } else if c.is_negative() {
                    out.push_str(" - ");
                    write_term(out, &-c, mono);
                } else {
                    out.push_str(" + ");
                    write_term(out, &c, mono);
                }
            }
        }
        _ => {
            let (c, mono) = split_term(e);
            write_term(out, &c, mono);
        }
    }
}

fn write_rational(out: &mut String, q: &BigRational) {
    if q.is_integer() {
        write!(out, "{}", q.numer()).unwrap();
    } else {
        write!(out, "{}/{}", q.numer(), q.denom()).unwrap();
    }
}

/// Writes `coeff * Π mono` as a product-level expression (no top-level sum).
fn write_term(out: &mut String, coeff: &BigRational, mono: &[Expr]) {
    if mono.is_empty() {
        write_rational(out, coeff);
        return;
    }
    let mut numer: Vec<&Expr> = Vec::new();
    let mut denom: Vec<(&Expr, i64)> = Vec::new();
    for f in mono {
        match f.node() {
            Node::Pow(b, n) if *n < 0 && !b.is_literal_zero() => denom.push((b, -n)),
            _ => numer.push(f),
        }
    }
    let p = coeff.numer().abs();
    let q = coeff.denom();
    let negative = coeff.is_negative();
    let has_denominator = !denom.is_empty() || !q.is_one();

    // A rational multiplied directly into a lone sum would be distributed
    // on reparse, so keep it away from a leading parenthesized sum.
    let leads_with_sum = numer.first().is_some_and(|f| matches!(f.node(), Node::Add(_)));
    let trailing_coefficient = leads_with_sum && !coeff.is_one() && denom.is_empty();

    if trailing_coefficient {
        write_factors(out, &numer);
        out.push('*');
        if negative {
            out.push_str("(-");
            write_rational(out, &-coeff.clone());
            out.push(')');
        } else {
            write_rational(out, coeff);
        }
        return;
    }

    if negative {
        out.push('-');
    }
    let coefficient_first = leads_with_sum && has_denominator;
    if coefficient_first {
        write!(out, "{p}").unwrap();
        write_denominator(out, q, &denom);
        if !numer.is_empty() {
            out.push('*');
            write_factors(out, &numer);
        }
        return;
    }
    let mut wrote = false;
    if !p.is_one() || numer.is_empty() {
        write!(out, "{p}").unwrap();
        wrote = true;
    }
    if !numer.is_empty() {
        if wrote {
            out.push('*');
        }
        write_factors(out, &numer);
    }
    if has_denominator {
        write_denominator(out, q, &denom);
    }
}

fn write_denominator(out: &mut String, q: &num_bigint::BigInt, denom: &[(&Expr, i64)]) {
    let mut parts: Vec<String> = Vec::new();
    // `q*(sum)` would be distributed on reparse; divide by `q` separately.
    if !q.is_one() && denom.first().is_some_and(|(b, _)| matches!(b.node(), Node::Add(_))) {
        write!(out, "/{q}").unwrap();
    } else if !q.is_one() {
        parts.push(q.to_string());
    }
    for (b, n) in denom {
        let mut s = String::new();
        write_power(&mut s, b, *n);
        parts.push(s);
    }
    if parts.is_empty() {
        return;
    }
    out.push('/');
    if parts.len() == 1 {
        out.push_str(&parts[0]);
    } else {
        out.push('(');
        out.push_str(&parts.join("*"));
        out.push(')');
    }
}

fn write_factors(out: &mut String, factors: &[&Expr]) {
    for (i, f) in factors.iter().enumerate() {
        if i > 0 {
            out.push('*');
        }
        match f.node() {
            Node::Pow(b, n) => write_power(out, b, *n),
            _ => write_atom(out, f),
        }
    }
}

fn write_power(out: &mut String, base: &Expr, n: i64) {
    write_atom(out, base);
    if n != 1 {
        write!(out, "^{n}").unwrap();
    }
}

/// Writes an expression that can stand as the operand of `*` or `^`.
fn write_atom(out: &mut String, e: &Expr) {
    match e.node() {
        Node::Sym(s) => write!(out, "{s}").unwrap(),
        Node::Num(q) if !q.is_negative() && q.is_integer() => write_rational(out, q),
        Node::Func(f, a) => {
            out.push_str(f.name());
            out.push('(');
            write_expr(out, a);
            out.push(')');
        }
        _ => {
            out.push('(');
            write_expr(out, e);
            out.push(')');
        }
    }
}
