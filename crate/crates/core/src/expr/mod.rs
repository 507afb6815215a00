//! Immutable symbolic expressions over jet coordinates.
//!
//! Every [`Expr`] is built through canonicalizing constructors: sums and
//! products are flattened, like terms and like bases are collected, and
//! children are kept sorted under a fixed total order. Two expressions that
//! are equal as trees are therefore equal as values, and printing is
//! deterministic. Products are never distributed over sums (except for a
//! bare rational factor), so canonical form is not a normal form for
//! rational functions; deciding identities is left to [`is_zero`].

mod diff;
mod eval;
mod parse;
mod print;
mod zero;

pub use diff::{derive_along, differentiate, substitute};
pub use eval::{eval_float, eval_numeric, Assignment, EvalError, Number};
pub use parse::{parse_expr, ParseContext, ParseError};
pub use zero::{is_zero, sample_rational, Verdict, ZeroCheck, ZeroTest};

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Coordinates and auxiliary symbols.
///
/// `T` is the independent variable on jet space and the spectral parameter
/// on web space, `X(i)` are the jet or web coordinates, `Y(i)` the auxiliary
/// coordinates of the bi-Hamiltonian extension and `U(i)` placeholders for
/// unknowns in linear solves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    T,
    X(u8),
    Y(u8),
    U(u8),
}

impl Var {
    /// Position of this variable in an opaque multi-index.
    pub fn slot(self) -> usize {
        match self {
            Var::T => 0,
            Var::X(i) => 1 + i as usize,
            Var::Y(i) => 11 + i as usize,
            Var::U(i) => 21 + i as usize,
        }
    }

    fn from_slot(slot: usize) -> Var {
        match slot {
            0 => Var::T,
            1..=10 => Var::X((slot - 1) as u8),
            11..=20 => Var::Y((slot - 11) as u8),
            _ => Var::U((slot - 21) as u8),
        }
    }

    pub fn name(self) -> String {
        match self {
            Var::T => "t".to_string(),
            Var::X(i) => format!("x{i}"),
            Var::Y(i) => format!("y{i}"),
            Var::U(i) => format!("u{i}"),
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        if name == "t" {
            return Some(Var::T);
        }
        let (head, digits) = name.split_at(1.min(name.len()));
        if digits.len() != 1 {
            return None;
        }
        let d = digits.parse::<u8>().ok()?;
        match head {
            "x" => Some(Var::X(d)),
            "y" => Some(Var::Y(d)),
            "u" => Some(Var::U(d)),
            _ => None,
        }
    }
}

/// A partial derivative of an unspecified smooth function.
///
/// The multi-index counts derivatives per variable slot and is stored
/// trimmed, so mixed partials taken in any order compare equal. The
/// dependency mask lists which variables the function depends on; it is
/// not part of the symbol's identity.
#[derive(Clone, Debug)]
pub struct OpaqueDerivative {
    name: Arc<str>,
    deps: u32,
    index: Vec<u16>,
}

impl OpaqueDerivative {
    pub fn new(name: &str, deps: &[Var]) -> Self {
        let deps = deps.iter().fold(0u32, |m, v| m | (1 << v.slot()));
        OpaqueDerivative {
            name: Arc::from(name),
            deps,
            index: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn depends_on(&self, v: Var) -> bool {
        self.deps & (1 << v.slot()) != 0
    }

    pub fn dependencies(&self) -> Vec<Var> {
        (0..32)
            .filter(|s| self.deps & (1 << s) != 0)
            .map(Var::from_slot)
            .collect()
    }

    /// Number of derivatives taken with respect to `v`.
    pub fn order_in(&self, v: Var) -> u16 {
        self.index.get(v.slot()).copied().unwrap_or(0)
    }

    pub fn total_order(&self) -> u32 {
        self.index.iter().map(|&c| c as u32).sum()
    }

    /// The multi-index as `(variable, count)` pairs in fixed coordinate order.
    pub fn multi_index(&self) -> Vec<(Var, u16)> {
        self.index
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(s, &c)| (Var::from_slot(s), c))
            .collect()
    }

    /// Derivative with respect to `v`, or `None` if the function does not
    /// depend on `v`.
    pub fn derive(&self, v: Var) -> Option<OpaqueDerivative> {
        if !self.depends_on(v) {
            return None;
        }
        let mut index = self.index.clone();
        let s = v.slot();
        if index.len() <= s {
            index.resize(s + 1, 0);
        }
        index[s] += 1;
        Some(OpaqueDerivative {
            name: self.name.clone(),
            deps: self.deps,
            index,
        })
    }

    pub fn derive_many(&self, vars: &[Var]) -> Option<OpaqueDerivative> {
        vars.iter().try_fold(self.clone(), |o, &v| o.derive(v))
    }
}

impl PartialEq for OpaqueDerivative {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.index == other.index
    }
}

impl Eq for OpaqueDerivative {}

impl Hash for OpaqueDerivative {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.name.hash(state);
        self.index.hash(state);
    }
}

impl PartialOrd for OpaqueDerivative {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OpaqueDerivative {
    fn cmp(&self, other: &Self) -> Ordering {
        self.name
            .cmp(&other.name)
            .then_with(|| self.total_order().cmp(&other.total_order()))
            .then_with(|| other.index.cmp(&self.index))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Coord(Var),
    Opaque(OpaqueDerivative),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Cos,
    Exp,
    Log,
    Sin,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Debug)]
pub enum Node {
    Num(BigRational),
    Sym(Symbol),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, i64),
    Func(Func, Expr),
}

impl Node {
    fn rank(&self) -> u8 {
        match self {
            Node::Num(_) => 0,
            Node::Sym(_) => 1,
            Node::Func(..) => 2,
            Node::Pow(..) => 3,
            Node::Mul(_) => 4,
            Node::Add(_) => 5,
        }
    }
}

#[derive(Debug)]
struct Inner {
    hash: u64,
    node: Node,
}

/// Shared, immutable, canonical expression.
#[derive(Clone)]
pub struct Expr(Arc<Inner>);

/// FNV-1a; deterministic across runs, which keeps sampling seeds and hence
/// reports reproducible.
struct Fnv(u64);

impl Hasher for Fnv {
    fn finish(&self) -> u64 {
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn write(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 ^= *b as u64;
            self.0 = self.0.wrapping_mul(0x100000001b3);
        }
    }
}

fn hash_node(node: &Node) -> u64 {
    let mut h = Fnv(0xcbf29ce484222325);
    h.write_u8(node.rank());
    match node {
        Node::Num(q) => {
            h.write(&q.numer().to_signed_bytes_le());
            h.write_u8(0xff);
            h.write(&q.denom().to_signed_bytes_le());
        }
        Node::Sym(s) => s.hash(&mut h),
        Node::Add(xs) | Node::Mul(xs) => {
            for x in xs {
                h.write_u64(x.0.hash);
            }
        }
        Node::Pow(b, n) => {
            h.write_u64(b.0.hash);
            h.write_i64(*n);
        }
        Node::Func(f, a) => {
            h.write_u8(*f as u8);
            h.write_u64(a.0.hash);
        }
    }
    h.finish()
}

impl Expr {
    fn raw(node: Node) -> Expr {
        let hash = hash_node(&node);
        Expr(Arc::new(Inner { hash, node }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    /// Structural hash; stable across runs.
    pub fn structural_hash(&self) -> u64 {
        self.0.hash
    }

    pub(crate) fn ptr_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn num(q: BigRational) -> Expr {
        Expr::raw(Node::Num(q))
    }

    pub fn int(n: i64) -> Expr {
        Expr::num(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn rat(p: i64, q: i64) -> Expr {
        Expr::num(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn var(v: Var) -> Expr {
        Expr::raw(Node::Sym(Symbol::Coord(v)))
    }

    pub fn x(i: usize) -> Expr {
        Expr::var(Var::X(i as u8))
    }

    pub fn t() -> Expr {
        Expr::var(Var::T)
    }

    pub fn opaque(o: OpaqueDerivative) -> Expr {
        Expr::raw(Node::Sym(Symbol::Opaque(o)))
    }

    pub fn symbol(s: Symbol) -> Expr {
        Expr::raw(Node::Sym(s))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self.node() {
            Node::Num(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_literal_zero(&self) -> bool {
        matches!(self.node(), Node::Num(q) if q.is_zero())
    }

    pub fn is_literal_one(&self) -> bool {
        matches!(self.node(), Node::Num(q) if q.is_one())
    }

    pub fn add_all<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        canonical_add(terms.into_iter().collect())
    }

    pub fn mul_all<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        canonical_mul(factors.into_iter().collect())
    }

    pub fn pow(&self, n: i64) -> Expr {
        canonical_pow(self.clone(), n)
    }

    pub fn recip(&self) -> Expr {
        self.pow(-1)
    }

    pub fn scale(&self, q: &BigRational) -> Expr {
        canonical_mul(vec![Expr::num(q.clone()), self.clone()])
    }

    pub fn apply(f: Func, arg: Expr) -> Expr {
        canonical_func(f, arg)
    }

    /// All symbols occurring in the expression, in canonical order.
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut seen = std::collections::HashSet::new();
        let mut out = BTreeSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.ptr_id()) {
                continue;
            }
            match e.node() {
                Node::Num(_) => {}
                Node::Sym(s) => {
                    out.insert(s.clone());
                }
                Node::Add(xs) | Node::Mul(xs) => stack.extend(xs.iter().cloned()),
                Node::Pow(b, _) => stack.push(b.clone()),
                Node::Func(_, a) => stack.push(a.clone()),
            }
        }
        out
    }

    pub fn has_functions(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.ptr_id()) {
                continue;
            }
            match e.node() {
                Node::Func(..) => return true,
                Node::Add(xs) | Node::Mul(xs) => stack.extend(xs.iter().cloned()),
                Node::Pow(b, _) => stack.push(b.clone()),
                _ => {}
            }
        }
        false
    }

    /// Number of distinct nodes in the shared DAG.
    pub fn dag_size(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.ptr_id()) {
                continue;
            }
            match e.node() {
                Node::Add(xs) | Node::Mul(xs) => stack.extend(xs.iter().cloned()),
                Node::Pow(b, _) => stack.push(b.clone()),
                Node::Func(_, a) => stack.push(a.clone()),
                _ => {}
            }
        }
        seen.len()
    }

    /// Whether `v` occurs in the expression, either bare or as a dependency
    /// of an opaque symbol.
    pub fn depends_on(&self, v: Var) -> bool {
        self.symbols().iter().any(|s| match s {
            Symbol::Coord(u) => *u == v,
            Symbol::Opaque(o) => o.depends_on(v),
        })
    }

    /// Coefficients of the expression as a polynomial in `v`, lowest degree
    /// first. `v` must occur only polynomially; the result is obtained by
    /// repeated differentiation and substitution `v = 0`.
    pub fn polynomial_coefficients(&self, v: Var, max_degree: usize) -> Vec<Expr> {
        let mut out = Vec::with_capacity(max_degree + 1);
        let mut current = self.clone();
        let mut factorial = BigRational::one();
        let zero = Expr::zero();
        for d in 0..=max_degree {
            if d > 0 {
                factorial *= BigRational::from_integer(BigInt::from(d));
                current = differentiate(&current, v);
            }
            let at_zero = substitute(&current, &|s| match s {
                Symbol::Coord(u) if *u == v => Some(zero.clone()),
                _ => None,
            });
            out.push(at_zero.scale(&factorial.recip()));
        }
        out
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.hash == other.0.hash && self.cmp(other) == Ordering::Equal)
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        let (a, b) = (self.node(), other.node());
        match a.rank().cmp(&b.rank()) {
            Ordering::Equal => {}
            o => return o,
        }
        match (a, b) {
            (Node::Num(p), Node::Num(q)) => p.cmp(q),
            (Node::Sym(p), Node::Sym(q)) => p.cmp(q),
            (Node::Func(f, x), Node::Func(g, y)) => f.cmp(g).then_with(|| x.cmp(y)),
            (Node::Pow(x, m), Node::Pow(y, n)) => x.cmp(y).then_with(|| m.cmp(n)),
            (Node::Mul(xs), Node::Mul(ys)) | (Node::Add(xs), Node::Add(ys)) => cmp_slices(xs, ys),
            _ => unreachable!("ranks equal"),
        }
    }
}

fn cmp_slices(xs: &[Expr], ys: &[Expr]) -> Ordering {
    // Compare from the back: the leading rational of a product or sum is the
    // least informative part.
    for (x, y) in xs.iter().rev().zip(ys.iter().rev()) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    xs.len().cmp(&ys.len())
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

/// Splits a term into its rational coefficient and the remaining factors.
fn split_term(e: &Expr) -> (BigRational, &[Expr]) {
    match e.node() {
        Node::Num(q) => (q.clone(), &[]),
        Node::Mul(fs) => match fs[0].node() {
            Node::Num(q) => (q.clone(), &fs[1..]),
            _ => (BigRational::one(), &fs[..]),
        },
        _ => (BigRational::one(), std::slice::from_ref(e)),
    }
}

fn rebuild_term(coeff: BigRational, mono: &[Expr]) -> Expr {
    if mono.is_empty() {
        return Expr::num(coeff);
    }
    if coeff.is_one() && mono.len() == 1 {
        return mono[0].clone();
    }
    let mut fs = Vec::with_capacity(mono.len() + 1);
    if !coeff.is_one() {
        fs.push(Expr::num(coeff));
    }
    fs.extend(mono.iter().cloned());
    Expr::raw(Node::Mul(fs))
}

fn canonical_add(terms: Vec<Expr>) -> Expr {
    let mut constant = BigRational::zero();
    let mut flat: Vec<Expr> = Vec::with_capacity(terms.len());
    for t in terms {
        match t.node() {
            Node::Num(q) => constant += q,
            Node::Add(xs) => {
                for x in xs {
                    match x.node() {
                        Node::Num(q) => constant += q,
                        _ => flat.push(x.clone()),
                    }
                }
            }
            _ => flat.push(t),
        }
    }
    let mut split: Vec<(BigRational, &[Expr])> = flat.iter().map(split_term).collect();
    split.sort_by(|a, b| cmp_slices(a.1, b.1));
    let mut out: Vec<Expr> = Vec::with_capacity(split.len() + 1);
    if !constant.is_zero() {
        out.push(Expr::num(constant));
    }
    let mut i = 0;
    while i < split.len() {
        let mono = split[i].1;
        let mut coeff = split[i].0.clone();
        let mut j = i + 1;
        while j < split.len() && cmp_slices(split[j].1, mono) == Ordering::Equal {
            coeff += &split[j].0;
            j += 1;
        }
        if !coeff.is_zero() {
            out.push(rebuild_term(coeff, mono));
        }
        i = j;
    }
    match out.len() {
        0 => Expr::zero(),
        1 => out.pop().unwrap(),
        _ => Expr::raw(Node::Add(out)),
    }
}

fn split_power(e: &Expr) -> (&Expr, i64) {
    match e.node() {
        Node::Pow(b, n) => (b, *n),
        _ => (e, 1),
    }
}

fn canonical_mul(factors: Vec<Expr>) -> Expr {
    let mut coeff = BigRational::one();
    let mut flat: Vec<Expr> = Vec::with_capacity(factors.len());
    for f in factors {
        match f.node() {
            Node::Num(q) => coeff *= q,
            Node::Mul(xs) => {
                for x in xs {
                    match x.node() {
                        Node::Num(q) => coeff *= q,
                        _ => flat.push(x.clone()),
                    }
                }
            }
            _ => flat.push(f),
        }
    }
    if coeff.is_zero() {
        return Expr::zero();
    }
    let mut split: Vec<(&Expr, i64)> = flat.iter().map(split_power).collect();
    split.sort_by(|a, b| a.0.cmp(b.0));
    let mut out: Vec<Expr> = Vec::with_capacity(split.len() + 1);
    let mut i = 0;
    while i < split.len() {
        let base = split[i].0;
        let mut n = split[i].1;
        let mut j = i + 1;
        while j < split.len() && split[j].0 == base {
            n += split[j].1;
            j += 1;
        }
        match n {
            0 => {}
            1 => out.push(base.clone()),
            _ => out.push(Expr::raw(Node::Pow(base.clone(), n))),
        }
        i = j;
    }
    if out.is_empty() {
        return Expr::num(coeff);
    }
    if out.len() == 1 {
        if coeff.is_one() {
            return out.pop().unwrap();
        }
        // A rational factor is distributed over a lone sum.
        if let Node::Add(terms) = out[0].node() {
            return canonical_add(
                terms
                    .iter()
                    .map(|t| {
                        let (c, m) = split_term(t);
                        rebuild_term(c * &coeff, m)
                    })
                    .collect(),
            );
        }
    }
    if !coeff.is_one() {
        out.insert(0, Expr::num(coeff));
    }
    Expr::raw(Node::Mul(out))
}

fn rational_pow(q: &BigRational, n: i64) -> BigRational {
    let base = if n < 0 { q.recip() } else { q.clone() };
    let mut acc = BigRational::one();
    for _ in 0..n.unsigned_abs() {
        acc *= &base;
    }
    acc
}

fn canonical_pow(base: Expr, n: i64) -> Expr {
    if n == 0 {
        return Expr::one();
    }
    if n == 1 {
        return base;
    }
    match base.node() {
        Node::Num(q) => {
            if q.is_zero() && n < 0 {
                // A literal pole is kept; evaluation reports division by zero.
                Expr::raw(Node::Pow(base.clone(), n))
            } else {
                Expr::num(rational_pow(q, n))
            }
        }
        Node::Pow(b, m) => canonical_pow(b.clone(), m * n),
        Node::Mul(fs) => canonical_mul(fs.iter().map(|f| canonical_pow(f.clone(), n)).collect()),
        _ => Expr::raw(Node::Pow(base, n)),
    }
}

fn canonical_func(f: Func, arg: Expr) -> Expr {
    if let Some(q) = arg.as_rational() {
        match f {
            Func::Exp | Func::Cos if q.is_zero() => return Expr::one(),
            Func::Sin | Func::Sqrt if q.is_zero() => return Expr::zero(),
            Func::Log | Func::Sqrt if q.is_one() => {
                return if f == Func::Log { Expr::zero() } else { Expr::one() }
            }
            _ => {}
        }
    }
    Expr::raw(Node::Func(f, arg))
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Huge numerator or denominator: scale both down by a common power of two.
            let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
            let n = (q.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (q.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl std::ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl std::ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                std::ops::$tr::$m(&self, &rhs)
            }
        }
        impl std::ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                std::ops::$tr::$m(&self, rhs)
            }
        }
        impl std::ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                std::ops::$tr::$m(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| canonical_add(vec![a.clone(), b.clone()]));
binop!(Sub, sub, |a, b| canonical_add(vec![
    a.clone(),
    canonical_mul(vec![Expr::int(-1), b.clone()])
]));
binop!(Mul, mul, |a, b| canonical_mul(vec![a.clone(), b.clone()]));
binop!(Div, div, |a, b| canonical_mul(vec![
    a.clone(),
    canonical_pow(b.clone(), -1)
]));

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        canonical_mul(vec![Expr::int(-1), self.clone()])
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<BigRational> for Expr {
    fn from(q: BigRational) -> Expr {
        Expr::num(q)
    }
}

impl From<Var> for Expr {
    fn from(v: Var) -> Expr {
        Expr::var(v)
    }
}

/// Exact rational `p/q`.
pub fn rational(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Binomial coefficient as an exact rational; zero outside `0..=n`.
pub fn binomial(n: i64, r: i64) -> BigRational {
    if r < 0 || n < 0 || r > n {
        return BigRational::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..r {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    BigRational::from_integer(acc)
}
