//! Curvatures, Wünschmann conditions and Cartan-type obstructions of a
//! scalar ODE `x^(k+1) = F(t, x, x', ..., x^(k))`.
//!
//! Jet coordinates are `t, x0, ..., xk` with `xi` standing for the i-th
//! derivative. The chain `V, V', ..., V^(k+1)` is kept normalized: the
//! scaling function `g` that makes the `V^(k)` coefficient of `V^(k+1)`
//! vanish is never constructed, only the ratios `X_F^j(g)/g`. Every residual
//! below is a relative invariant, so dropping `g` changes no verdict.

pub mod classical;
mod connection;

pub use connection::{
    beta_coefficient, connection_residuals, connection_residuals_on_frame, Beta, ConnectionResiduals, FrameForm,
};

use crate::error::{Error, Result};
use crate::expr::{binomial, parse_expr, Expr, OpaqueDerivative, ParseContext, Var, Verdict, ZeroTest};
use crate::jet::{lie_bracket, total_derivative_field, Frame, ScalingRule, VectorField};
use crate::residual::Residual;

/// Highest supported order; coordinates run up to `x9`.
pub const MAX_ORDER: usize = 10;

#[derive(Debug, Clone)]
pub struct OdeProblem {
    order: usize,
    rhs: Expr,
    is_abstract: bool,
}

impl OdeProblem {
    pub fn new(order: usize, rhs: Expr) -> Result<OdeProblem> {
        check_order(order)?;
        let frame = Frame::jet(order - 1);
        if let Some(v) = rhs.symbols().iter().find_map(|s| match s {
            crate::expr::Symbol::Coord(v) if frame.position(*v).is_none() => Some(*v),
            _ => None,
        }) {
            return Err(Error::Input(format!("{v} is not a coordinate of an order-{order} equation")));
        }
        Ok(OdeProblem {
            order,
            rhs,
            is_abstract: false,
        })
    }

    /// The equation with an unspecified right-hand side `F(t, x0, ..., xk)`.
    pub fn generic(order: usize) -> Result<OdeProblem> {
        check_order(order)?;
        Ok(OdeProblem {
            order,
            rhs: generic_rhs(order),
            is_abstract: true,
        })
    }

    /// Parses a right-hand side; the literal `abstract` yields [`OdeProblem::generic`].
    pub fn parse(order: usize, text: &str) -> Result<OdeProblem> {
        check_order(order)?;
        if text.trim() == "abstract" {
            return OdeProblem::generic(order);
        }
        let rhs = parse_expr(text, &Self::parse_context(order))?;
        OdeProblem::new(order, rhs)
    }

    /// Identifiers available to a right-hand side: `t, x0, ..., xk`.
    pub fn parse_context(order: usize) -> ParseContext {
        ParseContext::new(Frame::jet(order.saturating_sub(1)).vars())
    }

    /// Identifiers available in expressions derived from this equation,
    /// including `F` and its partials for the generic equation.
    pub fn output_context(&self) -> ParseContext {
        let frame = self.frame();
        let ctx = ParseContext::new(frame.vars());
        if self.is_abstract {
            ctx.with_function("F", frame.vars())
        } else {
            ctx
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `k = order − 1`.
    pub fn k(&self) -> usize {
        self.order - 1
    }

    pub fn rhs(&self) -> &Expr {
        &self.rhs
    }

    pub fn is_abstract(&self) -> bool {
        self.is_abstract
    }

    pub fn frame(&self) -> Frame {
        Frame::jet(self.k())
    }

    pub fn total_derivative(&self) -> VectorField {
        total_derivative_field(self.order, &self.rhs).expect("order checked at construction")
    }
}

fn check_order(order: usize) -> Result<()> {
    if order < 2 {
        return Err(Error::Order { got: order, min: 2 });
    }
    if order > MAX_ORDER {
        return Err(Error::Input(format!("order {order} exceeds the supported maximum {MAX_ORDER}")));
    }
    Ok(())
}

/// The opaque right-hand side `F(t, x0, ..., xk)`.
pub fn generic_rhs(order: usize) -> Expr {
    Expr::opaque(OpaqueDerivative::new("F", Frame::jet(order - 1).vars()))
}

/// The normalized chain `V^(i)` and curvatures of an equation.
#[derive(Debug, Clone)]
pub struct CurvatureChain {
    problem: OdeProblem,
    xf: VectorField,
    /// `X_F(g)/g = ∂_kF/(k+1)`.
    multiplier: Expr,
    fields: Vec<VectorField>,
    curvatures: Vec<Expr>,
    extraction: Vec<Residual>,
}

/// Builds `V^(0..=k+1)` and extracts `K_0..K_{k-1}` from
/// `V^(k+1) = Σ_j (−1)^{j+1} K_j V^(j)`.
///
/// Aborts if the `V^(k)` coefficient or the `∂_t` component of `V^(k+1)`
/// fails to vanish; either would mean the chain itself is wrong.
pub fn curvature_chain(problem: &OdeProblem, test: &ZeroTest) -> Result<CurvatureChain> {
    let k = problem.k();
    let frame = problem.frame();
    let xf = problem.total_derivative();
    let rule = ScalingRule::for_equation(problem.order, &problem.rhs);
    let g = rule.normalized_powers(&xf, k + 1);

    let mut ads = vec![VectorField::coordinate(&frame, Var::X(k as u8))];
    for _ in 0..=k {
        let next = lie_bracket(&xf, ads.last().unwrap())?;
        ads.push(next);
    }
    let mut fields = Vec::with_capacity(k + 2);
    for i in 0..=k + 1 {
        let terms: Vec<(Expr, &VectorField)> = (0..=i)
            .map(|j| (Expr::num(binomial(i as i64, j as i64)) * &g[j], &ads[i - j]))
            .collect();
        fields.push(VectorField::combination(&frame, &terms)?);
    }

    let top = &fields[k + 1];
    let mut rest: Vec<Expr> = (0..=k).map(|l| top.component(Var::X(l as u8))).collect();
    let mut coeffs = vec![Expr::zero(); k + 1];
    for l in 0..=k {
        let j = k - l;
        let lead = fields[j].component(Var::X(l as u8));
        let c = if lead.is_literal_one() {
            rest[l].clone()
        } else if (-&lead).is_literal_one() {
            -&rest[l]
        } else {
            &rest[l] / &lead
        };
        for (m, r) in rest.iter_mut().enumerate().skip(l) {
            let f = fields[j].component(Var::X(m as u8));
            if !f.is_literal_zero() {
                *r = &*r - &c * &f;
            }
        }
        coeffs[j] = c;
    }
    let extraction = vec![
        Residual::new(
            "top_coefficient",
            format!("coefficient of V^({k}) in V^({})", k + 1),
            coeffs[k].clone(),
            test,
        ),
        Residual::new(
            "t_component",
            format!("dt component of V^({})", k + 1),
            top.component(Var::T),
            test,
        ),
    ];
    for r in &extraction {
        if r.verdict() != Verdict::Zero {
            return Err(Error::ExtractionFailure(format!("{} ({:?})", r.formula, r.verdict())));
        }
    }
    let curvatures = coeffs[..k]
        .iter()
        .enumerate()
        .map(|(j, c)| if j % 2 == 0 { -c } else { c.clone() })
        .collect();
    Ok(CurvatureChain {
        problem: problem.clone(),
        multiplier: rule.multiplier,
        xf,
        fields,
        curvatures,
        extraction,
    })
}

impl CurvatureChain {
    pub fn problem(&self) -> &OdeProblem {
        &self.problem
    }

    pub fn k(&self) -> usize {
        self.problem.k()
    }

    pub fn total_derivative(&self) -> &VectorField {
        &self.xf
    }

    /// `X_F(g)/g`.
    pub fn multiplier(&self) -> &Expr {
        &self.multiplier
    }

    /// `V^(i)` for `i = 0..=k+1`.
    pub fn field(&self, i: usize) -> &VectorField {
        &self.fields[i]
    }

    pub fn fields(&self) -> &[VectorField] {
        &self.fields
    }

    /// `K_j` for `j = 0..k`.
    pub fn curvature(&self, j: usize) -> &Expr {
        &self.curvatures[j]
    }

    pub fn curvatures(&self) -> &[Expr] {
        &self.curvatures
    }

    pub fn extraction_residuals(&self) -> &[Residual] {
        &self.extraction
    }

    /// `e' = X_F(e)`.
    pub fn prime(&self, e: &Expr) -> Expr {
        self.xf.apply(e)
    }

    /// `V^(i)(e)`.
    pub fn along(&self, i: usize, e: &Expr) -> Expr {
        self.fields[i].apply(e)
    }
}

/// `γ_k = −binomial(k+2, 3)/2`.
pub fn gamma(k: usize) -> Expr {
    Expr::num(-binomial(k as i64 + 2, 3) / num_rational::BigRational::from_integer(2.into()))
}

/// Wünschmann residuals; empty for order 2.
///
/// Orders 3 and 4 give the complete set. For higher orders only the
/// simplest condition is produced and it is marked as necessary only.
pub fn wunschmann_residuals(chain: &CurvatureChain, test: &ZeroTest) -> Vec<Residual> {
    let k = chain.k();
    let kk = |j: usize| chain.curvature(j).clone();
    match k {
        1 => Vec::new(),
        2 => vec![Residual::new(
            "W0",
            "K0 + K1'/2",
            kk(0) + Expr::rat(1, 2) * chain.prime(&kk(1)),
            test,
        )],
        3 => vec![
            Residual::new(
                "W0",
                "K0 + 3*K1'/10 - 9*K2^2/100",
                kk(0) + Expr::rat(3, 10) * chain.prime(&kk(1)) - Expr::rat(9, 100) * kk(2).pow(2),
                test,
            ),
            Residual::new("W1", "K1 + K2'", kk(1) + chain.prime(&kk(2)), test),
        ],
        _ => vec![Residual::new(
            format!("W{}", k - 2),
            format!("K{} + {}*K{}'/2", k - 2, k - 1, k - 1),
            kk(k - 2) + Expr::rat(k as i64 - 1, 2) * chain.prime(&kk(k - 1)),
            test,
        )
        .with_note("necessary condition only")],
    }
}

fn vname(i: usize) -> String {
    match i {
        0 => "V".into(),
        1 => "V'".into(),
        2 => "V''".into(),
        3 => "V'''".into(),
        _ => format!("V^({i})"),
    }
}

/// Obstructions to a totally geodesic paraconformal connection.
pub fn cartan_residuals(chain: &CurvatureChain, test: &ZeroTest) -> Vec<Residual> {
    let k = chain.k();
    let top = chain.curvature(k - 1).clone();
    let top1 = chain.prime(&top);
    let at = |i: usize, e: &Expr| chain.along(i, e);
    match k {
        1 => vec![Residual::new(
            "C",
            "4*V'(K0) + V(K0')",
            Expr::int(4) * at(1, &top) + at(0, &top1),
            test,
        )],
        2 => vec![Residual::new(
            "C",
            "2*V'(K1) + V(K1')",
            Expr::int(2) * at(1, &top) + at(0, &top1),
            test,
        )],
        3 => vec![Residual::new(
            "C",
            "4*V'(K2) + 3*V(K2')",
            Expr::int(4) * at(1, &top) + Expr::int(3) * at(0, &top1),
            test,
        )],
        _ => {
            let kn = format!("K{}", k - 1);
            let mut out: Vec<Residual> = (0..=k - 4)
                .map(|i| {
                    Residual::new(
                        format!("T{i}"),
                        format!("{}({kn})", vname(i)),
                        at(i, &top),
                        test,
                    )
                })
                .collect();
            out.push(Residual::new(
                "C",
                format!("4*{}({kn}) + 3*{}({kn}')", vname(k - 2), vname(k - 3)),
                Expr::int(4) * at(k - 2, &top) + Expr::int(3) * at(k - 3, &top1),
                test,
            ));
            let g = gamma(k);
            let sign = if k % 2 == 0 { Expr::one() } else { Expr::int(-1) };
            let lhs = (Expr::int(2) / &g - Expr::one()) * &top * at(k - 3, &top);
            let rhs = &sign * (at(k - 2, &top1) - Expr::int(2) * at(k - 1, &top));
            out.push(
                Residual::new(
                    "E1",
                    format!(
                        "(2/γ - 1)*{kn}*{a}({kn}) - (-1)^k*({b}({kn}') - 2*{c}({kn}))",
                        a = vname(k - 3),
                        b = vname(k - 2),
                        c = vname(k - 1)
                    ),
                    lhs - rhs,
                    test,
                )
                .with_note("conjecturally redundant"),
            );
            let top2 = chain.prime(&top1);
            let lhs = (Expr::int(2) / (Expr::int(3) * &g) - Expr::one()) * &top * at(k - 2, &top)
                + (g.recip() + Expr::rat(k as i64 - 3, 2)) * &top1 * at(k - 3, &top);
            let rhs = -&sign
                * Expr::rat(1, 3)
                * (at(k - 2, &top2) - at(k - 1, &top1) + at(k, &top));
            out.push(
                Residual::new(
                    "E2",
                    format!(
                        "(2/(3γ) - 1)*{kn}*{b}({kn}) + (1/γ + (k-3)/2)*{kn}'*{a}({kn}) \
                         + (-1)^k*({b}({kn}'') - {c}({kn}') + {d}({kn}))/3",
                        a = vname(k - 3),
                        b = vname(k - 2),
                        c = vname(k - 1),
                        d = vname(k)
                    ),
                    lhs - rhs,
                    test,
                )
                .with_note("conjecturally redundant"),
            );
            out
        }
    }
}

/// Overall classification of an equation from its residuals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    TotallyGeodesic,
    WunschmannOnly,
    NoStructure,
    NecessaryConditionsOnly,
}

impl Classification {
    pub fn label(self) -> &'static str {
        match self {
            Classification::TotallyGeodesic => "totally-geodesic paraconformal",
            Classification::WunschmannOnly => "Wünschmann only",
            Classification::NoStructure => "no structure",
            Classification::NecessaryConditionsOnly => "necessary-conditions-only (order ≥ 5)",
        }
    }
}

/// Combines verdicts. Orders 2 to 4 are decided completely; from order 5 on
/// only necessary conditions are available, so vanishing everything
/// computed yields [`Classification::NecessaryConditionsOnly`].
pub fn classify(order: usize, wunschmann: &[Residual], cartan: &[Residual]) -> Classification {
    let w_ok = wunschmann.iter().all(Residual::is_zero);
    let c_ok = cartan.iter().all(Residual::is_zero);
    if !w_ok {
        return Classification::NoStructure;
    }
    if order >= 5 {
        // The Wünschmann residual computed here is necessary only, so a
        // failing obstruction does not certify the Wünschmann condition.
        return if c_ok {
            Classification::NecessaryConditionsOnly
        } else {
            Classification::NoStructure
        };
    }
    if c_ok {
        Classification::TotallyGeodesic
    } else {
        Classification::WunschmannOnly
    }
}
