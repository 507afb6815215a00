use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::expr::{differentiate, eval_float, sample_rational, substitute, Assignment, Expr, Symbol, Var, Verdict, ZeroTest};
use crate::jet::{combine_verdicts, lie_bracket, Frame, VectorField};
use crate::residual::Residual;

use super::{rat, spectral, VeroneseWeb};

/// `L_i(t) = −(t − t_0)(∂_iw/∂_0w)∂_0 + a_i(t − t_i)∂_i` for `i = 1..=k`.
///
/// The factor `t − t_0` on the first term makes `L_i(t)` tangent to the
/// leaves of `ω(t)`.
pub fn lax_tuple(web: &VeroneseWeb, t: &Expr) -> Vec<VectorField> {
    let frame = web.frame();
    let t0 = rat(&web.t[0]);
    (1..=web.k)
        .map(|i| {
            let mut l = VectorField::zero(&frame);
            l.set(Var::X(0), -((t - &t0) * web.partial(i) / web.partial(0)));
            l.set(Var::X(i as u8), rat(&web.a(i)) * (t - rat(&web.t[i])));
            l
        })
        .collect()
}

/// Components of `[L_i, L_j]`, each polynomial in `t`.
#[derive(Debug, Clone)]
pub struct LaxPair {
    pub i: usize,
    pub j: usize,
    pub components: Vec<Residual>,
}

impl LaxPair {
    pub fn verdict(&self) -> Verdict {
        combine_verdicts(self.components.iter().map(Residual::verdict))
    }
}

pub fn lax_commutator_residuals(web: &VeroneseWeb, test: &ZeroTest) -> BTreeMap<(usize, usize), LaxPair> {
    let ls = lax_tuple(web, &spectral());
    let frame = web.frame();
    let mut out = BTreeMap::new();
    for i in 1..=web.k {
        for j in i + 1..=web.k {
            let b = lie_bracket(&ls[i - 1], &ls[j - 1]).expect("same frame");
            let components = frame
                .vars()
                .iter()
                .zip(b.components())
                .filter(|(_, c)| !c.is_literal_zero())
                .map(|(v, c)| Residual::new(format!("[L{i},L{j}]^{v}"), format!("∂_{v} component of [L{i}(t),L{j}(t)]"), c.clone(), test))
                .collect();
            out.insert((i, j), LaxPair { i, j, components });
        }
    }
    out
}

/// `(ã_i − ã_j)∂_0w ∂_i∂_jw + ã_j ∂_iw ∂_j∂_0w − ã_i ∂_jw ∂_i∂_0w` with
/// `ã_i = (t_0 − t_i)/(t_{k+1} − t_i)`.
///
/// With these constants the residual for `(i, j)` is the Hirota residual
/// of `(0, i, j)` up to a nonzero constant factor.
pub fn eq1_residuals(web: &VeroneseWeb, test: &ZeroTest) -> BTreeMap<(usize, usize), Residual> {
    let at = |i: usize| rat(&(BigRational::one() - web.a(i)));
    let mut out = BTreeMap::new();
    for i in 1..=web.k {
        for j in i + 1..=web.k {
            let e = Expr::add_all([
                (at(i) - at(j)) * web.partial(0) * web.second(i, j),
                at(j) * web.partial(i) * web.second(j, 0),
                -(at(i) * web.partial(j) * web.second(i, 0)),
            ]);
            out.insert(
                (i, j),
                Residual::new(format!("E{i}{j}"), format!("(a{i}-a{j})*w_0*w_{i}{j} + a{j}*w_{i}*w_{j}0 - a{i}*w_{j}*w_{i}0"), e, test),
            );
        }
    }
    out
}

/// `Π(t) = Σ_i L_i(t) ∧ ∂_{y_i}` on `x0..xk, y1..yk` as an antisymmetric matrix.
pub fn bivector(web: &VeroneseWeb, t: &Expr) -> (Frame, Vec<Vec<Expr>>) {
    let frame = Frame::extended(web.k);
    let n = frame.len();
    let mut pi = vec![vec![Expr::zero(); n]; n];
    for (idx, l) in lax_tuple(web, t).iter().enumerate() {
        let y = frame.position(Var::Y(idx as u8 + 1)).expect("extended frame");
        for (m, c) in l.components().iter().enumerate() {
            if !c.is_literal_zero() {
                pi[m][y] = c.clone();
                pi[y][m] = -c;
            }
        }
    }
    (frame, pi)
}

/// Schouten bracket `[Π, Π]^{abc} = 2 Σ_m cycl(Π^{am} ∂_m Π^{bc})` over
/// `a < b < c`.
pub fn schouten(frame: &Frame, pi: &[Vec<Expr>]) -> Vec<((usize, usize, usize), Expr)> {
    let vars = frame.vars();
    let n = vars.len();
    let d: Vec<Vec<Vec<Expr>>> = (0..n)
        .map(|m| pi.iter().map(|row| row.iter().map(|e| differentiate(e, vars[m])).collect()).collect())
        .collect();
    let term = |a: usize, b: usize, c: usize| {
        Expr::add_all((0..n).filter(|m| !pi[a][*m].is_literal_zero()).map(|m| &pi[a][m] * &d[m][b][c]))
    };
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let e = Expr::int(2) * Expr::add_all([term(a, b, c), term(b, c, a), term(c, a, b)]);
                out.push(((a, b, c), e));
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct JacobiCheck {
    /// Largest `|J|/max(1, M)` over samples, `M` the magnitude bound of the
    /// float evaluation.
    pub max_residual: f64,
    pub samples: usize,
    /// Second `t`-derivative of `Π(t)`.
    pub pencil: Verdict,
}

/// Samples the Schouten bracket of `Π(t)` at random base points.
pub fn bihamiltonian_jacobi_residual(
    web: &VeroneseWeb,
    t_samples: &[BigRational],
    points: usize,
    seed: u64,
    test: &ZeroTest,
) -> JacobiCheck {
    let (frame, pi) = bivector(web, &spectral());
    let pencil = combine_verdicts(pi.iter().flatten().map(|e| {
        let d2 = differentiate(&differentiate(e, Var::T), Var::T);
        crate::expr::is_zero(&d2, test).verdict
    }));
    let jac = schouten(&frame, &pi);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_residual: f64 = 0.0;
    let mut samples = 0;
    for s in t_samples {
        let at_s: Vec<Expr> = jac
            .iter()
            .map(|(_, e)| substitute(e, &|sym| matches!(sym, Symbol::Coord(Var::T)).then(|| rat(s))))
            .collect();
        let mut taken = 0;
        let mut attempts = 0;
        while taken < points && attempts < 16 * points {
            attempts += 1;
            let a: Assignment = frame.vars().iter().map(|v| (Symbol::Coord(*v), sample_rational(&mut rng, 4))).collect();
            let vals: Option<Vec<(f64, f64)>> = at_s.iter().map(|e| eval_float(e, &a).ok()).collect();
            let Some(vals) = vals else { continue };
            taken += 1;
            samples += 1;
            for (v, m) in vals {
                max_residual = max_residual.max(v.abs() / m.max(1.0));
            }
        }
    }
    JacobiCheck {
        max_residual,
        samples,
        pencil,
    }
}
