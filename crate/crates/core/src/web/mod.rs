//! Veronese webs in adapted coordinates.
//!
//! A web is given by a function `w(x0, ..., xk)` and distinct spectral
//! constants `t0, ..., t_{k+1}`: the leaf through a point at `t = ti` is a
//! level set of `xi` for `i ≤ k` and of `w` for `i = k+1`. The spectral
//! parameter is represented by the symbol `t` wherever a result is
//! polynomial in it.

mod bryant;
pub mod corpus;
mod connection;
mod lax;

pub use bryant::{bryant_forms, BryantForms};
pub use connection::{
    canonical_connection, flatness_verdict, interpolated_alpha, null_metric_residuals, printed_alpha_tilde,
    printed_weyl_metric,    printed_weyl_f, ricci_null_residual, torsion, weyl_form, weyl_metric, Christoffels, FlatnessCheck,
    SampledResidual, WebConnection, WeylData,
};
pub use lax::{
    bihamiltonian_jacobi_residual, bivector, eq1_residuals, lax_commutator_residuals, lax_tuple, schouten,
    JacobiCheck, LaxPair,
};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::expr::{differentiate, is_zero, parse_expr, sample_rational, Expr, ParseContext, Var, Verdict, ZeroTest};
use crate::jet::{wedge3, Frame, OneForm, VectorField};
use crate::residual::Residual;

#[derive(Debug, Clone)]
pub struct VeroneseWeb {
    k: usize,
    w: Expr,
    t: Vec<BigRational>,
    first: Vec<Expr>,
    second: Vec<Vec<Expr>>,
}

impl VeroneseWeb {
    /// Validates the spectral constants and transversality.
    ///
    /// Every `∂_iw` must have a nonzero verdict; a zero or undecided one
    /// means two foliations of the family coincide somewhere generically.
    pub fn new(k: usize, w: Expr, t: Vec<BigRational>, test: &ZeroTest) -> Result<VeroneseWeb> {
        if k == 0 || k + 1 > crate::ode::MAX_ORDER {
            return Err(Error::Input(format!("web dimension k = {k} is outside 1..={}", crate::ode::MAX_ORDER - 1)));
        }
        if t.len() != k + 2 {
            return Err(Error::Input(format!("expected {} spectral constants, got {}", k + 2, t.len())));
        }
        for (i, a) in t.iter().enumerate() {
            if t[..i].contains(a) {
                return Err(Error::RepeatedParameters);
            }
        }
        let frame = Frame::web(k);
        if let Some(s) = w.symbols().iter().find(|s| match s {
            crate::expr::Symbol::Coord(v) => frame.position(*v).is_none(),
            crate::expr::Symbol::Opaque(_) => true,
        }) {
            return Err(Error::Input(format!(
                "{} is not a coordinate of a web with k = {k}",
                Expr::symbol(s.clone())
            )));
        }
        let vars = frame.vars();
        let first: Vec<Expr> = vars.iter().map(|v| differentiate(&w, *v)).collect();
        for (i, d) in first.iter().enumerate() {
            if is_zero(d, test).verdict != Verdict::NonZero {
                return Err(Error::Degenerate(format!("∂_{i}w vanishes identically")));
            }
        }
        let second = first
            .iter()
            .map(|d| vars.iter().map(|v| differentiate(d, *v)).collect())
            .collect();
        let web = VeroneseWeb { k, w, t, first, second };
        for (i, j, l) in web.triples() {
            let s = web.a_coefficient(i, j, l) + web.a_coefficient(j, l, i) + web.a_coefficient(l, i, j);
            assert!(s.is_zero(), "cyclic sum of a_ij,l vanishes identically");
        }
        Ok(web)
    }

    /// Parses `w` over `x0, ..., xk`.
    pub fn parse(k: usize, text: &str, t: Vec<BigRational>, test: &ZeroTest) -> Result<VeroneseWeb> {
        let w = parse_expr(text, &Self::parse_context(k))?;
        VeroneseWeb::new(k, w, t, test)
    }

    pub fn parse_context(k: usize) -> ParseContext {
        ParseContext::new(Frame::web(k).vars())
    }

    /// Default spectral constants `0, 1, ..., k+1`.
    pub fn default_parameters(k: usize) -> Vec<BigRational> {
        (0..=k as i64 + 1).map(|i| BigRational::from_integer(i.into())).collect()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn w(&self) -> &Expr {
        &self.w
    }

    pub fn parameters(&self) -> &[BigRational] {
        &self.t
    }

    pub fn frame(&self) -> Frame {
        Frame::web(self.k)
    }

    /// `∂_iw`.
    pub fn partial(&self, i: usize) -> &Expr {
        &self.first[i]
    }

    /// `∂_i∂_jw`.
    pub fn second(&self, i: usize, j: usize) -> &Expr {
        &self.second[i][j]
    }

    /// `a_{ij,l} = (t_i − t_j)(t_{k+1} − t_l)`.
    pub fn a_coefficient(&self, i: usize, j: usize, l: usize) -> BigRational {
        (&self.t[i] - &self.t[j]) * (&self.t[self.k + 1] - &self.t[l])
    }

    /// `a_i = (t_{k+1} − t_0)/(t_{k+1} − t_i)`.
    pub fn a(&self, i: usize) -> BigRational {
        let last = &self.t[self.k + 1];
        (last - &self.t[0]) / (last - &self.t[i])
    }

    fn triples(&self) -> Vec<(usize, usize, usize)> {
        let n = self.k + 1;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for l in j + 1..n {
                    out.push((i, j, l));
                }
            }
        }
        out
    }

    /// `Π_{l ≠ j, l ≤ k+1} (t_l − t_j)`.
    fn node_weight(&self, j: usize) -> BigRational {
        self.t
            .iter()
            .enumerate()
            .filter(|(l, _)| *l != j)
            .fold(BigRational::one(), |acc, (_, tl)| acc * (tl - &self.t[j]))
    }

    /// True when `s` is one of the spectral constants.
    pub fn is_spectral(&self, s: &BigRational) -> bool {
        self.t.contains(s)
    }

    /// `n` distinct rationals outside the spectral set.
    pub fn sample_parameters<R: Rng>(&self, rng: &mut R, n: usize, bits: u32) -> Vec<BigRational> {
        let mut out: Vec<BigRational> = Vec::with_capacity(n);
        while out.len() < n {
            let s = sample_rational(rng, bits);
            if !self.is_spectral(&s) && !out.contains(&s) {
                out.push(s);
            }
        }
        out
    }
}

fn rat(q: &BigRational) -> Expr {
    Expr::num(q.clone())
}

/// The spectral parameter as a symbol.
pub fn spectral() -> Expr {
    Expr::var(Var::T)
}

/// `ω(t) = Σ_i (t_{k+1} − t_i) Π_{j≠i, j≤k} (t − t_j) ∂_iw dx_i`.
///
/// `t` may be a number or [`spectral`].
pub fn omega(web: &VeroneseWeb, t: &Expr) -> OneForm {
    let k = web.k;
    let comps = (0..=k)
        .map(|i| {
            let mut factors = vec![rat(&(&web.t[k + 1] - &web.t[i])), web.first[i].clone()];
            factors.extend((0..=k).filter(|j| *j != i).map(|j| t - rat(&web.t[j])));
            Expr::mul_all(factors)
        })
        .collect();
    OneForm::from_components(&web.frame(), comps)
}

/// `n`-th `t`-derivative of the null curve
/// `V(t) = Σ_j (t − t_j)^k / (∂_jw Π_{l≠j}(t_l − t_j)) ∂_j`.
pub fn null_vector(web: &VeroneseWeb, t: &Expr, n: usize) -> VectorField {
    let k = web.k;
    let comps = (0..=k)
        .map(|j| {
            if n > k {
                return Expr::zero();
            }
            let falling = ((k - n + 1)..=k).fold(BigRational::one(), |acc, m| acc * BigRational::from_integer(BigInt::from(m)));
            let c = falling / web.node_weight(j);
            rat(&c) * (t - rat(&web.t[j])).pow((k - n) as i64) * web.first[j].recip()
        })
        .collect();
    VectorField::from_components(&web.frame(), comps)
}

/// Polynomial null curve and its dual one-form, coefficient by coefficient.
#[derive(Debug, Clone)]
pub struct NullCurve {
    /// `V_0, ..., V_k` with `V(t) = Σ t^i V_i`.
    pub fields: Vec<VectorField>,
    /// `ω_0, ..., ω_k` with `ω(t) = Σ t^i ω_i`.
    pub forms: Vec<OneForm>,
}

/// Coefficients of `Π (t − r)` over the given roots, lowest degree first.
fn poly_from_roots<'a>(roots: impl IntoIterator<Item = &'a BigRational>) -> Vec<BigRational> {
    let mut p = vec![BigRational::one()];
    for r in roots {
        let mut next = vec![BigRational::zero(); p.len() + 1];
        for (d, c) in p.iter().enumerate() {
            next[d + 1] += c;
            next[d] -= c * r;
        }
        p = next;
    }
    p
}

pub fn null_curve(web: &VeroneseWeb) -> NullCurve {
    let k = web.k;
    let frame = web.frame();
    let mut fields = vec![VectorField::zero(&frame); k + 1];
    let mut forms = vec![OneForm::zero(&frame); k + 1];
    for j in 0..=k {
        let roots = vec![web.t[j].clone(); k];
        let p = poly_from_roots(&roots);
        let scale = web.node_weight(j).recip();
        let inv = web.first[j].recip();
        for (d, c) in p.iter().enumerate() {
            let mut f = fields[d].clone();
            f.set(Var::X(j as u8), rat(&(c * &scale)) * &inv);
            fields[d] = f;
        }
        let q = poly_from_roots(web.t[..=k].iter().enumerate().filter(|(m, _)| *m != j).map(|(_, r)| r));
        let lead = &web.t[k + 1] - &web.t[j];
        for (d, c) in q.iter().enumerate() {
            let mut comps = forms[d].components().to_vec();
            comps[j] = rat(&(c * &lead)) * &web.first[j];
            forms[d] = OneForm::from_components(&frame, comps);
        }
    }
    NullCurve { fields, forms }
}

impl NullCurve {
    pub fn at(&self, t: &Expr) -> VectorField {
        let frame = self.fields[0].frame().clone();
        let terms: Vec<(Expr, &VectorField)> =
            self.fields.iter().enumerate().map(|(i, f)| (t.pow(i as i64), f)).collect();
        VectorField::combination(&frame, &terms).expect("coefficients share a frame")
    }

    pub fn omega_at(&self, t: &Expr) -> OneForm {
        let frame = self.forms[0].frame().clone();
        self.forms
            .iter()
            .enumerate()
            .fold(OneForm::zero(&frame), |acc, (i, f)| acc.add(&f.scale(&t.pow(i as i64))).expect("same frame"))
    }

    /// `ω^(i)(t)(V^(j)(t))` for `i + j < k`, which vanish for a null curve
    /// dual to `ω`.
    pub fn duality_residuals(&self, web: &VeroneseWeb, samples: &[BigRational], test: &ZeroTest) -> Vec<Residual> {
        let k = web.k;
        let mut out = Vec::new();
        for s in samples {
            let s = rat(s);
            for i in 0..k {
                let form = derivative_form(web, &s, i);
                for j in 0..k - i {
                    let e = form.eval(&null_vector(web, &s, j)).expect("same frame");
                    out.push(Residual::new(
                        format!("ω^({i})(V^({j}))"),
                        format!("ω^({i})(t)(V^({j})(t)) at t = {s}"),
                        e,
                        test,
                    ));
                }
            }
        }
        out
    }
}

/// `n`-th `t`-derivative of `ω` at `t`.
fn derivative_form(web: &VeroneseWeb, t: &Expr, n: usize) -> OneForm {
    let sym = omega(web, &spectral());
    let mut comps: Vec<Expr> = sym.components().to_vec();
    for _ in 0..n {
        comps = comps.iter().map(|c| differentiate(c, Var::T)).collect();
    }
    let comps = comps
        .iter()
        .map(|c| {
            crate::expr::substitute(c, &|s| match s {
                crate::expr::Symbol::Coord(Var::T) => Some(t.clone()),
                _ => None,
            })
        })
        .collect();
    OneForm::from_components(&web.frame(), comps)
}

/// `Σ_{cycl(i,j,l)} a_{ij,l} ∂_i∂_jw ∂_lw` for `i < j < l`.
pub fn hirota_residuals(web: &VeroneseWeb, test: &ZeroTest) -> BTreeMap<(usize, usize, usize), Residual> {
    web.triples()
        .into_iter()
        .map(|(i, j, l)| {
            let term = |a: usize, b: usize, c: usize| rat(&web.a_coefficient(a, b, c)) * &web.second[a][b] * &web.first[c];
            let e = Expr::add_all([term(i, j, l), term(j, l, i), term(l, i, j)]);
            let r = Residual::new(
                format!("H{i}{j}{l}"),
                format!("a_{i}{j},{l}*w_{i}{j}*w_{l} + a_{j}{l},{i}*w_{j}{l}*w_{i} + a_{l}{i},{j}*w_{l}{i}*w_{j}"),
                e,
                test,
            );
            ((i, j, l), r)
        })
        .collect()
}

/// True when every residual has a zero verdict.
pub fn all_zero<'a>(residuals: impl IntoIterator<Item = &'a Residual>) -> bool {
    residuals.into_iter().all(Residual::is_zero)
}

#[derive(Debug, Clone)]
pub struct ZakharevichCheck {
    pub holds: bool,
    pub values: Vec<BigRational>,
    /// Coefficients of `ω(s)∧dω(s)`, per test value.
    pub residuals: Vec<Residual>,
}

/// Checks `ω(s)∧dω(s) = 0` at `k+3` test values.
///
/// Values in the spectral set are rejected: there the condition is void,
/// so they would not count towards the `k+3`.
pub fn zakharevich_verdict(web: &VeroneseWeb, values: &[BigRational], test: &ZeroTest) -> Result<ZakharevichCheck> {
    let need = web.k + 3;
    if values.len() != need {
        return Err(Error::InvalidSamples(format!("{need} values required, got {}", values.len())));
    }
    for (i, s) in values.iter().enumerate() {
        if values[..i].contains(s) {
            return Err(Error::InvalidSamples(format!("{s} repeated")));
        }
        if web.is_spectral(s) {
            return Err(Error::InvalidSamples(format!("{s} is a spectral constant")));
        }
    }
    let mut residuals = Vec::new();
    for s in values {
        let w = omega(web, &rat(s));
        let three = wedge3(&w, &w.exterior_derivative()).expect("same frame");
        for ((u, v, x), c) in three.index_triples().into_iter().zip(three.components()) {
            residuals.push(Residual::new(
                format!("Z{u}{v}{x}"),
                format!("(ω∧dω)_{u}{v}{x} at t = {s}"),
                c.clone(),
                test,
            ));
        }
    }
    Ok(ZakharevichCheck {
        holds: all_zero(&residuals),
        values: values.to_vec(),
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact() -> ZeroTest {
        ZeroTest {
            tolerance: 0.0,
            ..ZeroTest::default()
        }
    }

    fn web(k: usize, w: &str) -> VeroneseWeb {
        VeroneseWeb::parse(k, w, VeroneseWeb::default_parameters(k), &exact()).unwrap()
    }

    #[test]
    fn omega_for_linear_w() {
        let web = web(2, "x0 + x1 + x2");
        let w = omega(&web, &spectral());
        let t = spectral();
        let expected = [
            Expr::int(3) * (&t - Expr::int(1)) * (&t - Expr::int(2)),
            Expr::int(2) * &t * (&t - Expr::int(2)),
            &t * (&t - Expr::int(1)),
        ];
        for (c, e) in w.components().iter().zip(&expected) {
            assert!(is_zero(&(c - e), &exact()).is_zero());
        }
    }

    #[test]
    fn omega_at_spectral_values() {
        let web = web(3, "x0*x1 + x2 + x3^3");
        let w = omega(&web, &Expr::int(2));
        for (i, c) in w.components().iter().enumerate() {
            assert_eq!(c.is_literal_zero(), i != 2);
        }
        // at t_{k+1} the form is proportional to dw
        let last = omega(&web, &Expr::int(4));
        let ratio = &last.components()[0] / web.partial(0);
        for i in 1..=3 {
            assert!(is_zero(&(&last.components()[i] - &ratio * web.partial(i)), &exact()).is_zero());
        }
    }

    #[test]
    fn null_curve_coefficients_agree_with_closed_form() {
        let web = web(3, "x0 + x1^2 + x2 + x3");
        let curve = null_curve(&web);
        let s = Expr::rat(7, 3);
        let d = curve.at(&s).sub(&null_vector(&web, &s, 0)).unwrap();
        assert_eq!(d.vanishes(&exact()), Verdict::Zero);
        let d = curve.omega_at(&s).sub(&omega(&web, &s)).unwrap();
        assert!(d.components().iter().all(|c| is_zero(c, &exact()).is_zero()));
    }

    #[test]
    fn duality() {
        let web = web(3, "x0 + x1^2 + x2*x3 + x3");
        let curve = null_curve(&web);
        let samples = [BigRational::new(7.into(), 3.into()), BigRational::new((-5).into(), 2.into())];
        assert!(all_zero(&curve.duality_residuals(&web, &samples, &exact())));
        let top = omega(&web, &Expr::rat(7, 3)).eval(&null_vector(&web, &Expr::rat(7, 3), 3)).unwrap();
        assert_eq!(is_zero(&top, &exact()).verdict, Verdict::NonZero);
    }

    #[test]
    fn hirota_examples() {
        assert!(all_zero(hirota_residuals(&web(2, "x0 + x1 + x2"), &exact()).values()));
        assert!(all_zero(hirota_residuals(&web(3, "x0^2 + x1^3 + x2 + x3^5"), &exact()).values()));
        // x0*x1*x2 solves the system: the cyclic sum of a_ij,l vanishes.
        assert!(all_zero(hirota_residuals(&web(2, "x0*x1*x2"), &exact()).values()));
        let r = hirota_residuals(&web(2, "x0*x1 + x2^2"), &exact());
        assert_eq!(r[&(0, 1, 2)].verdict(), Verdict::NonZero);
    }

    #[test]
    fn validation() {
        let t = VeroneseWeb::default_parameters(3);
        assert!(matches!(VeroneseWeb::parse(3, "x0*x1", t.clone(), &exact()), Err(Error::Degenerate(_))));
        let mut rep = t.clone();
        rep[2] = rep[1].clone();
        assert_eq!(VeroneseWeb::parse(3, "x0+x1+x2+x3", rep, &exact()).unwrap_err(), Error::RepeatedParameters);
        assert!(matches!(VeroneseWeb::parse(2, "x0+x1+x3", VeroneseWeb::default_parameters(2), &exact()), Err(Error::Parse(_))));
        assert!(matches!(VeroneseWeb::parse(2, "x0+x1+x2", t, &exact()), Err(Error::Input(_))));
    }

    #[test]
    fn zakharevich_rejects_spectral_values() {
        let web = web(2, "x0 + x1 + x2");
        let inside: Vec<BigRational> = (0..5).map(|i| BigRational::from_integer((i - 1).into())).collect();
        assert!(matches!(zakharevich_verdict(&web, &inside, &exact()), Err(Error::InvalidSamples(_))));
        let few: Vec<BigRational> = (10..13).map(|i| BigRational::from_integer(i.into())).collect();
        assert!(zakharevich_verdict(&web, &few, &exact()).is_err());
        let ok: Vec<BigRational> = (10..15).map(|i| BigRational::from_integer(i.into())).collect();
        assert!(zakharevich_verdict(&web, &ok, &exact()).unwrap().holds);
        let bad = VeroneseWeb::parse(2, "x0*x1 + x2^2", VeroneseWeb::default_parameters(2), &exact()).unwrap();
        assert!(!zakharevich_verdict(&bad, &ok, &exact()).unwrap().holds);
    }
}
