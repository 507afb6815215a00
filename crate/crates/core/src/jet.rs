//! Vector fields and differential forms with symbolic coefficients.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{derive_along, differentiate, is_zero, Expr, Symbol, Var, Verdict, ZeroTest};

/// Ordered coordinate system on which fields and forms are expanded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame(Arc<[Var]>);

impl Frame {
    pub fn new(vars: Vec<Var>) -> Frame {
        Frame(vars.into())
    }

    /// `t, x0, ..., xk`.
    pub fn jet(k: usize) -> Frame {
        let mut v = vec![Var::T];
        v.extend((0..=k).map(|i| Var::X(i as u8)));
        Frame::new(v)
    }

    /// `x0, ..., xk`.
    pub fn web(k: usize) -> Frame {
        Frame::new((0..=k).map(|i| Var::X(i as u8)).collect())
    }

    /// `x0, ..., xk, y1, ..., yk`.
    pub fn extended(k: usize) -> Frame {
        let mut v: Vec<Var> = (0..=k).map(|i| Var::X(i as u8)).collect();
        v.extend((1..=k).map(|i| Var::Y(i as u8)));
        Frame::new(v)
    }

    pub fn vars(&self) -> &[Var] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn position(&self, v: Var) -> Option<usize> {
        self.0.iter().position(|u| *u == v)
    }
}

fn check_frames(a: &Frame, b: &Frame) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::FrameMismatch)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    frame: Frame,
    comps: Vec<Expr>,
}

impl VectorField {
    pub fn zero(frame: &Frame) -> VectorField {
        VectorField {
            frame: frame.clone(),
            comps: vec![Expr::zero(); frame.len()],
        }
    }

    pub fn from_components(frame: &Frame, comps: Vec<Expr>) -> VectorField {
        assert_eq!(comps.len(), frame.len(), "one component per frame element");
        VectorField {
            frame: frame.clone(),
            comps,
        }
    }

    /// The coordinate field of `v`.
    pub fn coordinate(frame: &Frame, v: Var) -> VectorField {
        let mut f = VectorField::zero(frame);
        let i = frame.position(v).expect("variable belongs to the frame");
        f.comps[i] = Expr::one();
        f
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    /// Component along `∂_v`; zero for variables outside the frame.
    pub fn component(&self, v: Var) -> Expr {
        self.frame
            .position(v)
            .map(|i| self.comps[i].clone())
            .unwrap_or_else(Expr::zero)
    }

    pub fn set(&mut self, v: Var, e: Expr) {
        let i = self.frame.position(v).expect("variable belongs to the frame");
        self.comps[i] = e;
    }

    /// Directional derivative of a scalar.
    pub fn apply(&self, f: &Expr) -> Expr {
        derive_along(f, &|s: &Symbol| match s {
            Symbol::Coord(v) => self.component(*v),
            Symbol::Opaque(o) => Expr::add_all(
                self.frame
                    .vars()
                    .iter()
                    .zip(&self.comps)
                    .filter(|(_, c)| !c.is_literal_zero())
                    .filter_map(|(v, c)| o.derive(*v).map(|d| c * Expr::opaque(d))),
            ),
        })
    }

    pub fn scale(&self, f: &Expr) -> VectorField {
        self.map(|c| c * f)
    }

    pub fn map(&self, g: impl Fn(&Expr) -> Expr) -> VectorField {
        VectorField {
            frame: self.frame.clone(),
            comps: self.comps.iter().map(g).collect(),
        }
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        check_frames(&self.frame, &other.frame)?;
        Ok(VectorField {
            frame: self.frame.clone(),
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField> {
        check_frames(&self.frame, &other.frame)?;
        Ok(VectorField {
            frame: self.frame.clone(),
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect(),
        })
    }

    /// `Σ c_i X_i` over fields sharing a frame.
    pub fn combination(frame: &Frame, terms: &[(Expr, &VectorField)]) -> Result<VectorField> {
        let mut comps = vec![Vec::new(); frame.len()];
        for (c, f) in terms {
            check_frames(frame, &f.frame)?;
            if c.is_literal_zero() {
                continue;
            }
            for (acc, fc) in comps.iter_mut().zip(&f.comps) {
                if !fc.is_literal_zero() {
                    acc.push(c * fc);
                }
            }
        }
        Ok(VectorField {
            frame: frame.clone(),
            comps: comps.into_iter().map(Expr::add_all).collect(),
        })
    }

    pub fn is_literal_zero(&self) -> bool {
        self.comps.iter().all(Expr::is_literal_zero)
    }

    /// Verdict that every component vanishes.
    pub fn vanishes(&self, test: &ZeroTest) -> Verdict {
        combine_verdicts(self.comps.iter().map(|c| is_zero(c, test).verdict))
    }
}

/// Conjunction of verdicts: nonzero dominates, then indeterminate.
pub fn combine_verdicts(vs: impl IntoIterator<Item = Verdict>) -> Verdict {
    let mut out = Verdict::Zero;
    for v in vs {
        match v {
            Verdict::NonZero => return Verdict::NonZero,
            Verdict::Indeterminate => out = Verdict::Indeterminate,
            Verdict::Zero => {}
        }
    }
    out
}

/// `[A,B]^i = A(B^i) − B(A^i)`.
pub fn lie_bracket(a: &VectorField, b: &VectorField) -> Result<VectorField> {
    check_frames(&a.frame, &b.frame)?;
    Ok(VectorField {
        frame: a.frame.clone(),
        comps: a
            .comps
            .iter()
            .zip(&b.comps)
            .map(|(ac, bc)| a.apply(bc) - b.apply(ac))
            .collect(),
    })
}

/// The total derivative `∂_t + x1∂_0 + ... + xk∂_{k-1} + F∂_k` of an
/// equation of order `order = k + 1`.
pub fn total_derivative_field(order: usize, rhs: &Expr) -> Result<VectorField> {
    if order < 2 {
        return Err(Error::Order { got: order, min: 2 });
    }
    let k = order - 1;
    let frame = Frame::jet(k);
    let mut comps = vec![Expr::one()];
    comps.extend((1..=k).map(Expr::x));
    comps.push(rhs.clone());
    Ok(VectorField::from_components(&frame, comps))
}

/// Derivative rule `X(g) = m·g` for a function `g` that is never built.
///
/// Quantities `X^j(g)` are tracked through the normalized coefficients
/// `G_j = X^j(g)/g`, with `G_0 = 1` and `G_{j+1} = X(G_j) + G_j·m`.
#[derive(Debug, Clone)]
pub struct ScalingRule {
    pub base: String,
    pub multiplier: Expr,
}

impl ScalingRule {
    /// The rule `X_F(g) = (∂_kF/(k+1))·g`.
    pub fn for_equation(order: usize, rhs: &Expr) -> ScalingRule {
        let k = order - 1;
        ScalingRule {
            base: "g".into(),
            multiplier: differentiate(rhs, Var::X(k as u8)) * Expr::rat(1, order as i64),
        }
    }

    /// Coefficient of `g` in `X(e·g)`.
    pub fn apply(&self, field: &VectorField, e: &Expr) -> Expr {
        field.apply(e) + e * &self.multiplier
    }

    /// `G_0, ..., G_n`.
    pub fn normalized_powers(&self, field: &VectorField, n: usize) -> Vec<Expr> {
        let mut out = vec![Expr::one()];
        for _ in 0..n {
            let next = self.apply(field, out.last().unwrap());
            out.push(next);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneForm {
    frame: Frame,
    comps: Vec<Expr>,
}

impl OneForm {
    pub fn zero(frame: &Frame) -> OneForm {
        OneForm {
            frame: frame.clone(),
            comps: vec![Expr::zero(); frame.len()],
        }
    }

    pub fn from_components(frame: &Frame, comps: Vec<Expr>) -> OneForm {
        assert_eq!(comps.len(), frame.len(), "one component per frame element");
        OneForm {
            frame: frame.clone(),
            comps,
        }
    }

    /// `dv`.
    pub fn coordinate(frame: &Frame, v: Var) -> OneForm {
        let mut f = OneForm::zero(frame);
        let i = frame.position(v).expect("variable belongs to the frame");
        f.comps[i] = Expr::one();
        f
    }

    /// `df` of a scalar.
    pub fn differential(frame: &Frame, f: &Expr) -> OneForm {
        OneForm {
            frame: frame.clone(),
            comps: frame.vars().iter().map(|v| differentiate(f, *v)).collect(),
        }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn component(&self, v: Var) -> Expr {
        self.frame
            .position(v)
            .map(|i| self.comps[i].clone())
            .unwrap_or_else(Expr::zero)
    }

    /// `ω(X)`.
    pub fn eval(&self, x: &VectorField) -> Result<Expr> {
        check_frames(&self.frame, &x.frame)?;
        Ok(Expr::add_all(
            self.comps
                .iter()
                .zip(&x.comps)
                .filter(|(a, b)| !a.is_literal_zero() && !b.is_literal_zero())
                .map(|(a, b)| a * b),
        ))
    }

    pub fn scale(&self, f: &Expr) -> OneForm {
        self.map(|c| c * f)
    }

    pub fn map(&self, g: impl Fn(&Expr) -> Expr) -> OneForm {
        OneForm {
            frame: self.frame.clone(),
            comps: self.comps.iter().map(g).collect(),
        }
    }

    pub fn add(&self, other: &OneForm) -> Result<OneForm> {
        check_frames(&self.frame, &other.frame)?;
        Ok(OneForm {
            frame: self.frame.clone(),
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &OneForm) -> Result<OneForm> {
        check_frames(&self.frame, &other.frame)?;
        Ok(OneForm {
            frame: self.frame.clone(),
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect(),
        })
    }

    /// `(dω)_{uv} = ∂_u ω_v − ∂_v ω_u`.
    pub fn exterior_derivative(&self) -> TwoForm {
        let vars = self.frame.vars();
        let n = vars.len();
        let partials: Vec<Vec<Expr>> = self
            .comps
            .iter()
            .map(|c| vars.iter().map(|v| differentiate(c, *v)).collect())
            .collect();
        let mut comps = Vec::with_capacity(n * (n - 1) / 2);
        for u in 0..n {
            for v in u + 1..n {
                comps.push(&partials[v][u] - &partials[u][v]);
            }
        }
        TwoForm {
            frame: self.frame.clone(),
            comps,
        }
    }

    /// Lie derivative `(L_X ω)_v = X(ω_v) + Σ_u ω_u ∂_v X^u`.
    pub fn lie_derivative(&self, x: &VectorField) -> Result<OneForm> {
        check_frames(&self.frame, &x.frame)?;
        let vars = self.frame.vars();
        let comps = vars
            .iter()
            .zip(&self.comps)
            .map(|(v, wv)| {
                let mut terms = vec![x.apply(wv)];
                for (wu, xu) in self.comps.iter().zip(&x.comps) {
                    if !wu.is_literal_zero() {
                        terms.push(wu * differentiate(xu, *v));
                    }
                }
                Expr::add_all(terms)
            })
            .collect();
        Ok(OneForm {
            frame: self.frame.clone(),
            comps,
        })
    }
}

/// Antisymmetric two-form stored over index pairs `u < v` in frame order.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoForm {
    frame: Frame,
    comps: Vec<Expr>,
}

fn pair_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u < v);
    u * (2 * n - u - 1) / 2 + (v - u - 1)
}

impl TwoForm {
    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// Coefficient on the ordered pair of frame positions (antisymmetrized).
    pub fn at(&self, u: usize, v: usize) -> Expr {
        let n = self.frame.len();
        match u.cmp(&v) {
            std::cmp::Ordering::Less => self.comps[pair_index(n, u, v)].clone(),
            std::cmp::Ordering::Greater => -&self.comps[pair_index(n, v, u)],
            std::cmp::Ordering::Equal => Expr::zero(),
        }
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn eval(&self, x: &VectorField, y: &VectorField) -> Result<Expr> {
        check_frames(&self.frame, &x.frame)?;
        check_frames(&self.frame, &y.frame)?;
        let n = self.frame.len();
        let mut terms = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                let c = &self.comps[pair_index(n, u, v)];
                if c.is_literal_zero() {
                    continue;
                }
                terms.push(c * (&x.comps[u] * &y.comps[v] - &x.comps[v] * &y.comps[u]));
            }
        }
        Ok(Expr::add_all(terms))
    }

    /// `(dη)_{uvw} = ∂_u η_vw − ∂_v η_uw + ∂_w η_uv`.
    pub fn exterior_derivative(&self) -> ThreeForm {
        let vars = self.frame.vars();
        let n = vars.len();
        let mut comps = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                for w in v + 1..n {
                    comps.push(Expr::add_all([
                        differentiate(&self.at(v, w), vars[u]),
                        -differentiate(&self.at(u, w), vars[v]),
                        differentiate(&self.at(u, v), vars[w]),
                    ]));
                }
            }
        }
        ThreeForm {
            frame: self.frame.clone(),
            comps,
        }
    }
}

/// Totally antisymmetric three-form over index triples `u < v < w`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeForm {
    frame: Frame,
    comps: Vec<Expr>,
}

impl ThreeForm {
    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// Triples of frame positions in the order of [`ThreeForm::components`].
    pub fn index_triples(&self) -> Vec<(usize, usize, usize)> {
        let n = self.frame.len();
        let mut out = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                for w in v + 1..n {
                    out.push((u, v, w));
                }
            }
        }
        out
    }
}

/// `(ω∧η)_{uvw} = ω_u η_vw − ω_v η_uw + ω_w η_uv`.
pub fn wedge3(omega: &OneForm, eta: &TwoForm) -> Result<ThreeForm> {
    check_frames(&omega.frame, &eta.frame)?;
    let n = omega.frame.len();
    let mut comps = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            for w in v + 1..n {
                comps.push(Expr::add_all([
                    &omega.comps[u] * eta.at(v, w),
                    -(&omega.comps[v] * eta.at(u, w)),
                    &omega.comps[w] * eta.at(u, v),
                ]));
            }
        }
    }
    Ok(ThreeForm {
        frame: omega.frame.clone(),
        comps,
    })
}

/// Inverse of a square symbolic matrix by Gauss–Jordan elimination.
///
/// Pivots are accepted only with a nonzero verdict; constant pivots are
/// preferred to keep entries small.
pub fn invert(matrix: &[Vec<Expr>], test: &ZeroTest) -> Result<Vec<Vec<Expr>>> {
    let n = matrix.len();
    let mut a: Vec<Vec<Expr>> = matrix
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "square matrix");
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Expr::one() } else { Expr::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let candidates: Vec<usize> = (col..n).filter(|&r| !a[r][col].is_literal_zero()).collect();
        let pivot = candidates
            .iter()
            .copied()
            .find(|&r| a[r][col].as_rational().is_some())
            .or_else(|| {
                candidates
                    .iter()
                    .copied()
                    .find(|&r| is_zero(&a[r][col], test).verdict == Verdict::NonZero)
            })
            .ok_or(Error::Singular)?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        a[col] = a[col].iter().map(|e| e * &inv).collect();
        for r in 0..n {
            if r == col || a[r][col].is_literal_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            let pivot_row = a[col].clone();
            a[r] = a[r]
                .iter()
                .zip(&pivot_row)
                .map(|(x, p)| if p.is_literal_zero() { x.clone() } else { x - &factor * p })
                .collect();
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solves `M x = b`.
pub fn solve_linear(matrix: &[Vec<Expr>], rhs: &[Expr], test: &ZeroTest) -> Result<Vec<Expr>> {
    let inv = invert(matrix, test)?;
    Ok(inv
        .iter()
        .map(|row| Expr::add_all(row.iter().zip(rhs).map(|(a, b)| a * b)))
        .collect())
}

/// One-forms `θ_i` on `basis` with `θ_i(fields[j]) = δ_ij`.
///
/// The fields must have no components outside `basis`; the forms are
/// expanded over the fields' frame with zero coefficients elsewhere.
pub fn dual_coframe(fields: &[VectorField], basis: &[Var], test: &ZeroTest) -> Result<Vec<OneForm>> {
    let Some(first) = fields.first() else {
        return Ok(Vec::new());
    };
    let frame = first.frame.clone();
    for f in fields {
        check_frames(&frame, &f.frame)?;
    }
    if fields.len() != basis.len() {
        return Err(Error::Singular);
    }
    // θ = (Mᵀ)⁻¹ with M[j][c] = fields[j]^c.
    let transposed: Vec<Vec<Expr>> = basis
        .iter()
        .map(|v| fields.iter().map(|f| f.component(*v)).collect())
        .collect();
    let inv = invert(&transposed, test)?;
    Ok(inv
        .into_iter()
        .map(|row| {
            let mut form = OneForm::zero(&frame);
            for (v, c) in basis.iter().zip(row) {
                let i = frame.position(*v).expect("basis inside frame");
                form.comps[i] = c;
            }
            form
        })
        .collect())
}
