use crate::error::{Error, Result};
use crate::expr::{binomial, Expr, ZeroTest};
use crate::jet::{dual_coframe, OneForm, VectorField};
use crate::residual::Residual;

use super::{gamma, vname, CurvatureChain};

/// A one-form on jet space recorded by its values on `V^(0..=k)`.
///
/// Derivatives along `X_F` stay in this representation because
/// `[X_F, V^(j)] = V^(j+1) − (X_F(g)/g)·V^(j)` and `V^(k+1)` is expressed
/// through the curvatures.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameForm(pub Vec<Expr>);

impl FrameForm {
    pub fn zero(chain: &CurvatureChain) -> FrameForm {
        FrameForm(vec![Expr::zero(); chain.k() + 1])
    }

    pub fn from_form(chain: &CurvatureChain, form: &OneForm) -> Result<FrameForm> {
        (0..=chain.k())
            .map(|j| form.eval(chain.field(j)))
            .collect::<Result<Vec<_>>>()
            .map(FrameForm)
    }

    /// `df` restricted to the chain.
    pub fn differential(chain: &CurvatureChain, f: &Expr) -> FrameForm {
        FrameForm((0..=chain.k()).map(|j| chain.along(j, f)).collect())
    }

    pub fn values(&self) -> &[Expr] {
        &self.0
    }

    /// Value on `V^(k+1)`.
    fn top_value(&self, chain: &CurvatureChain) -> Expr {
        Expr::add_all(chain.curvatures().iter().enumerate().map(|(j, kj)| {
            let c = if j % 2 == 0 { -kj } else { kj.clone() };
            c * &self.0[j]
        }))
    }

    /// Lie derivative along `X_F`.
    pub fn prime(&self, chain: &CurvatureChain) -> FrameForm {
        let k = chain.k();
        let m = chain.multiplier();
        let next = |j: usize| {
            if j < k {
                self.0[j + 1].clone()
            } else {
                self.top_value(chain)
            }
        };
        FrameForm(
            (0..=k)
                .map(|j| chain.prime(&self.0[j]) - next(j) + m * &self.0[j])
                .collect(),
        )
    }

    pub fn add(&self, other: &FrameForm) -> FrameForm {
        FrameForm(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, f: &Expr) -> FrameForm {
        FrameForm(self.0.iter().map(|a| a * f).collect())
    }
}

fn primes(chain: &CurvatureChain, form: &FrameForm, n: usize) -> Vec<FrameForm> {
    let mut out = vec![form.clone()];
    for _ in 0..n {
        let next = out.last().unwrap().prime(chain);
        out.push(next);
    }
    out
}

/// The one-form `β = b·θ_k` determined algebraically from order 4 on.
#[derive(Debug, Clone)]
pub struct Beta {
    /// `β(V^(k))`.
    pub b: Expr,
    /// `β` in coordinates; `θ_k` annihilates `X_F` and `V^(0..k)`.
    pub form: OneForm,
    pub values: FrameForm,
}

/// `b = −V(K_2)/5` at order 4 and `b = (−1)^k·2·V^(k−3)(K_{k−1})/binomial(k+2,3)`
/// above.
pub fn beta_coefficient(chain: &CurvatureChain, test: &ZeroTest) -> Result<Beta> {
    let k = chain.k();
    if k < 3 {
        return Err(Error::Order {
            got: k + 1,
            min: 4,
        });
    }
    let top = chain.curvature(k - 1);
    let b = if k == 3 {
        Expr::rat(-1, 5) * chain.along(0, top)
    } else {
        let sign = if k % 2 == 0 { 2 } else { -2 };
        Expr::int(sign) * chain.along(k - 3, top) / Expr::num(binomial(k as i64 + 2, 3))
    };
    let mut fields: Vec<VectorField> = chain.fields()[..=k].to_vec();
    fields.push(chain.total_derivative().clone());
    let frame = chain.problem().frame();
    let coframe = dual_coframe(&fields, frame.vars(), test)?;
    let form = coframe[k].scale(&b);
    let mut values = vec![Expr::zero(); k + 1];
    values[k] = b.clone();
    Ok(Beta {
        b,
        form,
        values: FrameForm(values),
    })
}

#[derive(Debug, Clone)]
pub struct ConnectionResiduals {
    /// `γβ''' + (−1)^k K'β + 2(−1)^k Kβ' − (−1)^k dK` on `V^(j)`, `K = K_{k−1}`.
    pub beta_equation: Vec<Residual>,
    /// `2α' + kβ''` on `V^(j)`.
    pub trace: Vec<Residual>,
    /// `nabla[i][j]`: coefficient one-form of `V^(j)` in `∇V^(i)`.
    pub nabla: Vec<Vec<FrameForm>>,
}

/// Residuals of the connection equations for given `α`, `β`.
pub fn connection_residuals(
    chain: &CurvatureChain,
    alpha: &OneForm,
    beta: &OneForm,
    test: &ZeroTest,
) -> Result<ConnectionResiduals> {
    let a = FrameForm::from_form(chain, alpha)?;
    let b = FrameForm::from_form(chain, beta)?;
    Ok(connection_residuals_on_frame(chain, &a, &b, test))
}

/// As [`connection_residuals`] with forms given by their values on the chain.
pub fn connection_residuals_on_frame(
    chain: &CurvatureChain,
    alpha: &FrameForm,
    beta: &FrameForm,
    test: &ZeroTest,
) -> ConnectionResiduals {
    let k = chain.k();
    let kk = chain.curvature(k - 1);
    let kk1 = chain.prime(kk);
    let ap = primes(chain, alpha, k);
    let bp = primes(chain, beta, (k + 1).max(3));
    let sign = if k % 2 == 0 { Expr::one() } else { Expr::int(-1) };
    let dk = FrameForm::differential(chain, kk);
    let g = gamma(k);

    let beta_equation = (0..=k)
        .map(|j| {
            let e = Expr::add_all([
                &g * &bp[3].0[j],
                &sign * &kk1 * &bp[0].0[j],
                Expr::int(2) * &sign * kk * &bp[1].0[j],
                -(&sign * &dk.0[j]),
            ]);
            Residual::new(
                format!("R({})", vname(j)),
                format!("γβ''' + (-1)^k*K{km}'β + 2(-1)^k*K{km}β' - (-1)^k*dK{km} on {}", vname(j), km = k - 1),
                e,
                test,
            )
        })
        .collect();
    let trace = (0..=k)
        .map(|j| {
            Residual::new(
                format!("S({})", vname(j)),
                format!("2α' + kβ'' on {}", vname(j)),
                Expr::int(2) * &ap[1].0[j] + Expr::int(k as i64) * &bp[2].0[j],
                test,
            )
        })
        .collect();

    let mut nabla = Vec::with_capacity(k + 1);
    for i in 0..=k {
        let mut row = vec![FrameForm::zero(chain); k + 1];
        for (j, slot) in row.iter_mut().enumerate().take(i + 1) {
            let ca = Expr::num(binomial(i as i64, j as i64));
            let cb = Expr::num(binomial(i as i64, j as i64 - 1));
            let mut acc = ap[i - j].scale(&ca);
            if j >= 1 {
                acc = acc.add(&bp[i - j + 1].scale(&cb));
            }
            *slot = acc;
        }
        if i < k {
            row[i + 1] = row[i + 1].add(&bp[0].scale(&Expr::num(binomial(i as i64, i as i64))));
        } else {
            // β·V^(k+1) folded back through the curvatures.
            for (j, kj) in chain.curvatures().iter().enumerate() {
                let c = if j % 2 == 0 { -kj } else { kj.clone() };
                row[j] = row[j].add(&bp[0].scale(&c));
            }
        }
        nabla.push(row);
    }
    ConnectionResiduals {
        beta_equation,
        trace,
        nabla,
    }
}
