use std::collections::HashMap;

use super::{Expr, Func, Node, Symbol, Var};

/// Partial derivative with respect to a coordinate.
pub fn differentiate(e: &Expr, v: Var) -> Expr {
    derive_along(e, &|s: &Symbol| match s {
        Symbol::Coord(u) if *u == v => Expr::one(),
        Symbol::Coord(_) => Expr::zero(),
        Symbol::Opaque(o) => match o.derive(v) {
            Some(d) => Expr::opaque(d),
            None => Expr::zero(),
        },
    })
}

/// Applies the derivation determined by its values on symbols.
///
/// Any derivation of the expression algebra is fixed by what it does to
/// the generators; this is how vector fields act on coefficients. Shared
/// subexpressions are differentiated once.
pub fn derive_along(e: &Expr, on_symbol: &dyn Fn(&Symbol) -> Expr) -> Expr {
    let mut memo = HashMap::new();
    derive_rec(e, on_symbol, &mut memo)
}

fn derive_rec(
    e: &Expr,
    on_symbol: &dyn Fn(&Symbol) -> Expr,
    memo: &mut HashMap<usize, Expr>,
) -> Expr {
    if let Some(d) = memo.get(&e.ptr_id()) {
        return d.clone();
    }
    let d = match e.node() {
        Node::Num(_) => Expr::zero(),
        Node::Sym(s) => on_symbol(s),
        Node::Add(xs) => Expr::add_all(xs.iter().map(|x| derive_rec(x, on_symbol, memo))),
        Node::Mul(xs) => {
            let mut terms = Vec::with_capacity(xs.len());
            for (i, x) in xs.iter().enumerate() {
                let dx = derive_rec(x, on_symbol, memo);
                if dx.is_literal_zero() {
                    continue;
                }
                let mut factors = Vec::with_capacity(xs.len());
                factors.push(dx);
                factors.extend(
                    xs.iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, y)| y.clone()),
                );
                terms.push(Expr::mul_all(factors));
            }
            Expr::add_all(terms)
        }
        Node::Pow(b, n) => {
            let db = derive_rec(b, on_symbol, memo);
            if db.is_literal_zero() {
                Expr::zero()
            } else {
                Expr::mul_all([Expr::int(*n), b.pow(n - 1), db])
            }
        }
        Node::Func(f, a) => {
            let da = derive_rec(a, on_symbol, memo);
            if da.is_literal_zero() {
                Expr::zero()
            } else {
                let outer = match f {
                    Func::Exp => e.clone(),
                    Func::Log => a.recip(),
                    Func::Sin => Expr::apply(Func::Cos, a.clone()),
                    Func::Cos => -Expr::apply(Func::Sin, a.clone()),
                    Func::Sqrt => Expr::rat(1, 2) * e.recip(),
                };
                outer * da
            }
        }
    };
    memo.insert(e.ptr_id(), d.clone());
    d
}

/// Replaces symbols for which `map` returns a value and re-canonicalizes.
pub fn substitute(e: &Expr, map: &dyn Fn(&Symbol) -> Option<Expr>) -> Expr {
    let mut memo = HashMap::new();
    subst_rec(e, map, &mut memo)
}

fn subst_rec(
    e: &Expr,
    map: &dyn Fn(&Symbol) -> Option<Expr>,
    memo: &mut HashMap<usize, Expr>,
) -> Expr {
    if let Some(r) = memo.get(&e.ptr_id()) {
        return r.clone();
    }
    let r = match e.node() {
        Node::Num(_) => e.clone(),
        Node::Sym(s) => map(s).unwrap_or_else(|| e.clone()),
        Node::Add(xs) => Expr::add_all(xs.iter().map(|x| subst_rec(x, map, memo))),
        Node::Mul(xs) => Expr::mul_all(xs.iter().map(|x| subst_rec(x, map, memo))),
        Node::Pow(b, n) => subst_rec(b, map, memo).pow(*n),
        Node::Func(f, a) => Expr::apply(*f, subst_rec(a, map, memo)),
    };
    memo.insert(e.ptr_id(), r.clone());
    r
}
