use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::{rational_to_f64, Expr, Func, Node, Symbol};

pub type Assignment = HashMap<Symbol, BigRational>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero at the sample point")]
    DivisionByZero,
    #[error("symbol {0} has no value")]
    Unassigned(String),
    #[error("{0} evaluated outside its domain")]
    Domain(&'static str),
}

/// Result of numeric evaluation.
///
/// Float results carry a magnitude bound: the value a computation of the
/// same shape would have with every sign made positive. Rounding error is
/// proportional to it, so a float counts as zero when it is small relative
/// to its magnitude rather than to itself.
#[derive(Debug, Clone, PartialEq)]
pub enum Number {
    Exact(BigRational),
    Float { value: f64, magnitude: f64 },
}

impl Number {
    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Exact(q) => rational_to_f64(q),
            Number::Float { value, .. } => *value,
        }
    }

    /// Zero within relative tolerance; exact values compare exactly.
    pub fn is_negligible(&self, tolerance: f64) -> bool {
        match self {
            Number::Exact(q) => q.is_zero(),
            Number::Float { value, magnitude } => value.abs() <= tolerance * magnitude,
        }
    }
}

/// Evaluates exactly when no elementary function occurs, in floating point
/// otherwise.
pub fn eval_numeric(e: &Expr, assignment: &Assignment) -> Result<Number, EvalError> {
    if e.has_functions() {
        let (value, magnitude) = eval_float(e, assignment)?;
        Ok(Number::Float { value, magnitude })
    } else {
        let mut memo = HashMap::new();
        exact_rec(e, assignment, &mut memo).map(Number::Exact)
    }
}

fn lookup(s: &Symbol, assignment: &Assignment) -> Result<BigRational, EvalError> {
    assignment
        .get(s)
        .cloned()
        .ok_or_else(|| EvalError::Unassigned(Expr::symbol(s.clone()).to_string()))
}

fn exact_rec(
    e: &Expr,
    a: &Assignment,
    memo: &mut HashMap<usize, BigRational>,
) -> Result<BigRational, EvalError> {
    if let Some(v) = memo.get(&e.ptr_id()) {
        return Ok(v.clone());
    }
    let v = match e.node() {
        Node::Num(q) => q.clone(),
        Node::Sym(s) => lookup(s, a)?,
        Node::Add(xs) => {
            let mut acc = BigRational::zero();
            for x in xs {
                acc += exact_rec(x, a, memo)?;
            }
            acc
        }
        Node::Mul(xs) => {
            let mut acc = BigRational::one();
            for x in xs {
                acc *= exact_rec(x, a, memo)?;
            }
            acc
        }
        Node::Pow(b, n) => {
            let b = exact_rec(b, a, memo)?;
            if b.is_zero() && *n < 0 {
                return Err(EvalError::DivisionByZero);
            }
            let base = if *n < 0 { b.recip() } else { b };
            num_traits::pow::pow(base, n.unsigned_abs() as usize)
        }
        Node::Func(..) => unreachable!("exact path excludes functions"),
    };
    memo.insert(e.ptr_id(), v.clone());
    Ok(v)
}

/// Floating-point evaluation returning `(value, magnitude)`.
pub fn eval_float(e: &Expr, assignment: &Assignment) -> Result<(f64, f64), EvalError> {
    let mut memo = HashMap::new();
    float_rec(e, assignment, &mut memo)
}

fn float_rec(
    e: &Expr,
    a: &Assignment,
    memo: &mut HashMap<usize, (f64, f64)>,
) -> Result<(f64, f64), EvalError> {
    if let Some(v) = memo.get(&e.ptr_id()) {
        return Ok(*v);
    }
    let r = match e.node() {
        Node::Num(q) => {
            let v = rational_to_f64(q);
            (v, v.abs())
        }
        Node::Sym(s) => {
            let v = rational_to_f64(&lookup(s, a)?);
            (v, v.abs())
        }
        Node::Add(xs) => {
            let (mut v, mut m) = (0.0, 0.0);
            for x in xs {
                let (xv, xm) = float_rec(x, a, memo)?;
                v += xv;
                m += xm;
            }
            (v, m)
        }
        Node::Mul(xs) => {
            let (mut v, mut m) = (1.0, 1.0);
            for x in xs {
                let (xv, xm) = float_rec(x, a, memo)?;
                v *= xv;
                m *= xm;
            }
            (v, m)
        }
        Node::Pow(b, n) => {
            let (bv, bm) = float_rec(b, a, memo)?;
            if *n < 0 && bv == 0.0 {
                return Err(EvalError::DivisionByZero);
            }
            let v = bv.powi(*n as i32);
            let m = if *n > 0 {
                bm.powi(*n as i32)
            } else {
                // Relative error of a reciprocal follows that of its base.
                v.abs() * (bm / bv.abs()) * n.unsigned_abs() as f64
            };
            (v, m)
        }
        Node::Func(f, x) => {
            let (xv, xm) = float_rec(x, a, memo)?;
            match f {
                Func::Exp => {
                    let v = xv.exp();
                    (v, v * (1.0 + xm))
                }
                Func::Log => {
                    if xv <= 0.0 {
                        return Err(EvalError::Domain("log"));
                    }
                    let v = xv.ln();
                    (v, v.abs() + xm / xv)
                }
                Func::Sin => (xv.sin(), xv.sin().abs() + xm),
                Func::Cos => (xv.cos(), xv.cos().abs() + xm),
                Func::Sqrt => {
                    if xv < 0.0 {
                        return Err(EvalError::Domain("sqrt"));
                    }
                    let v = xv.sqrt();
                    let m = if v > 0.0 { v + xm / (2.0 * v) } else { xm.sqrt() };
                    (v, m)
                }
            }
        }
    };
    if r.0.is_nan() {
        return Err(EvalError::Domain("arithmetic"));
    }
    memo.insert(e.ptr_id(), r);
    Ok(r)
}
