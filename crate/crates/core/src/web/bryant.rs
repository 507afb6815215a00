
use crate::error::{Error, Result};
use crate::expr::{Expr, ZeroTest};
use crate::jet::{invert, lie_bracket, OneForm, VectorField};
use crate::residual::Residual;

use super::connection::solve_overdetermined;
use super::{all_zero, hirota_residuals, null_curve, rat, VeroneseWeb};

/// Torsion-free connection of a four-dimensional web in the basis `V_0..V_3`
/// of the null curve `V(t) = Σ t^i V_i`.
///
/// One-forms are stored by their coefficients over the dual coframe `η`.
#[derive(Debug, Clone)]
pub struct BryantForms {
    pub fields: Vec<VectorField>,
    pub coframe: Vec<OneForm>,
    /// `c[i][j][l]` with `[V_i, V_j] = Σ_l c[i][j][l] V_l`.
    pub c: Vec<Vec<Vec<Expr>>>,
    /// Coefficient formulas for `β_0, β_1, β_2`.
    pub beta: Vec<Vec<Expr>>,
    /// `t`-independent part of `α(t) = α_0 − 3tβ_2`.
    pub alpha: Vec<Expr>,
    /// Torsion of the connection assembled from `beta` and `alpha`.
    pub torsion: Vec<Residual>,
    /// `β_0, β_1, β_2, α_0` from solving the torsion equations directly.
    pub solved_beta: Vec<Vec<Expr>>,
    pub solved_alpha: Vec<Expr>,
    /// Torsion equations left over after the solve.
    pub obstructions: Vec<Residual>,
}

impl BryantForms {
    /// `Σ_a coeffs[a] η_a`.
    pub fn form(&self, coeffs: &[Expr]) -> OneForm {
        let frame = self.coframe[0].frame().clone();
        coeffs
            .iter()
            .zip(&self.coframe)
            .fold(OneForm::zero(&frame), |acc, (c, e)| acc.add(&e.scale(c)).expect("same frame"))
    }

    /// True when all printed `β_i` have zero verdicts.
    pub fn beta_vanishes(&self, test: &ZeroTest) -> bool {
        self.beta.iter().flatten().all(|e| crate::expr::is_zero(e, test).is_zero())
    }
}

/// Form coefficients `N_b^l` of `∇V_b = Σ_l N_b^l V_l` evaluated on `V_a`.
///
/// `beta[q][a]` and `alpha[a]` are values on `V_a`; `α_1 = −3β_2`.
fn nabla(beta: &[Vec<Expr>], alpha: &[Expr], a: usize, b: usize, l: usize) -> Expr {
    let mut terms = Vec::new();
    match b as i64 - l as i64 {
        0 => terms.push(alpha[a].clone()),
        1 => terms.push(Expr::int(-3) * &beta[2][a]),
        _ => {}
    }
    let q = b as i64 - l as i64 + 1;
    if (0..=2).contains(&q) && l > 0 {
        terms.push(Expr::int(l as i64) * &beta[q as usize][a]);
    }
    Expr::add_all(terms)
}

fn torsion_residuals(c: &[Vec<Vec<Expr>>], beta: &[Vec<Expr>], alpha: &[Expr], test: &ZeroTest) -> Vec<Residual> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in a + 1..4 {
            for l in 0..4 {
                let e = nabla(beta, alpha, a, b, l) - nabla(beta, alpha, b, a, l) - &c[a][b][l];
                out.push(Residual::new(
                    format!("bryant T^{l}_{a}{b}"),
                    format!("η_{l}(T(V_{a},V_{b})) for the Bryant connection"),
                    e,
                    test,
                ));
            }
        }
    }
    out
}

/// Structural functions and `β_i`, `α` for a web with `k = 3`.
pub fn bryant_forms(web: &VeroneseWeb, test: &ZeroTest) -> Result<BryantForms> {
    if web.k != 3 {
        return Err(Error::Unsupported(format!("Bryant forms need k = 3, got k = {}", web.k)));
    }
    if !all_zero(hirota_residuals(web, test).values()) {
        return Err(Error::Inconsistent("Hirota residuals do not vanish".into()));
    }
    let frame = web.frame();
    let fields = null_curve(web).fields;
    // V_i = Σ_j C[i][j] ∂_j/∂_jw, so η_l = Σ_j D[l][j] ∂_jw dx_j with D = (Cᵀ)⁻¹.
    let ct: Vec<Vec<Expr>> = (0..4)
        .map(|j| {
            (0..4)
                .map(|i| {
                    let coeff = fields[i].components()[j].clone() * web.partial(j);
                    coeff.as_rational().map(|q| rat(q)).unwrap_or(coeff)
                })
                .collect()
        })
        .collect();
    let d = invert(&ct, test)?;
    let coframe: Vec<OneForm> = d
        .iter()
        .map(|row| OneForm::from_components(&frame, (0..4).map(|j| &row[j] * web.partial(j)).collect()))
        .collect();
    let mut c = vec![vec![vec![Expr::zero(); 4]; 4]; 4];
    for i in 0..4 {
        for j in i + 1..4 {
            let br = lie_bracket(&fields[i], &fields[j])?;
            for l in 0..4 {
                let v = coframe[l].eval(&br)?;
                c[j][i][l] = -&v;
                c[i][j][l] = v;
            }
        }
    }
    let cc = |i: usize, j: usize, l: usize| c[i][j][l].clone();
    let third = |e: Expr| Expr::rat(1, 3) * e;
    let beta = vec![
        vec![third(cc(0, 2, 3)), third(cc(1, 2, 3)), Expr::int(2) * cc(0, 3, 2) - cc(0, 2, 1), -cc(0, 3, 1)],
        vec![
            cc(0, 3, 3) - cc(0, 2, 2),
            third(cc(0, 1, 0)) + third(cc(1, 3, 3)) - cc(0, 3, 2),
            third(cc(2, 3, 3)) + third(cc(0, 2, 0)) - cc(0, 3, 1),
            cc(0, 3, 0) - cc(1, 3, 1),
        ],
        vec![-cc(0, 3, 2), Expr::int(2) * cc(0, 3, 1) - cc(1, 3, 2), third(cc(1, 2, 0)), third(cc(1, 3, 0))],
    ];
    let alpha = vec![
        Expr::int(3) * cc(0, 2, 2) - Expr::int(2) * cc(0, 3, 3),
        Expr::int(3) * cc(0, 3, 2) - cc(0, 1, 0),
        -cc(0, 2, 0),
        -cc(0, 3, 0),
    ];
    let torsion = torsion_residuals(&c, &beta, &alpha, test);

    // Unknowns: β_q(V_a) at 4q + a, α_0(V_a) at 12 + a.
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let unit = |n: usize| -> Vec<Vec<Expr>> {
        (0..4)
            .map(|q| (0..4).map(|a| if 4 * q + a == n { Expr::one() } else { Expr::zero() }).collect())
            .collect()
    };
    for a in 0..4 {
        for b in a + 1..4 {
            for l in 0..4 {
                let row = (0..16)
                    .map(|n| {
                        let u = unit(n);
                        let (bq, al) = (&u[..3], &u[3]);
                        nabla(bq, al, a, b, l) - nabla(bq, al, b, a, l)
                    })
                    .collect();
                rows.push(row);
                rhs.push(c[a][b][l].clone());
            }
        }
    }
    let (solution, leftover) = solve_overdetermined(&rows, &rhs, test)?;
    let solved_beta = (0..3).map(|q| solution[4 * q..4 * q + 4].to_vec()).collect();
    let solved_alpha = solution[12..].to_vec();
    let obstructions = leftover
        .into_iter()
        .enumerate()
        .map(|(n, e)| Residual::new(format!("obstruction{n}"), "reduced torsion equation", e, test))
        .collect();
    Ok(BryantForms {
        fields,
        coframe,
        c,
        beta,
        alpha,
        torsion,
        solved_beta,
        solved_alpha,
        obstructions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::is_zero;

    fn exact() -> ZeroTest {
        ZeroTest {
            tolerance: 0.0,
            ..ZeroTest::default()
        }
    }

    #[test]
    fn flat_web_has_vanishing_forms() {
        let web = VeroneseWeb::parse(3, "x0 + x1 + x2 + x3", VeroneseWeb::default_parameters(3), &exact()).unwrap();
        let b = bryant_forms(&web, &exact()).unwrap();
        assert!(b.c.iter().flatten().flatten().all(|e| is_zero(e, &exact()).is_zero()));
        assert!(b.beta_vanishes(&exact()));
        assert!(all_zero(&b.torsion));
    }

    #[test]
    fn coframe_is_dual() {
        let web = VeroneseWeb::parse(3, "x0*x1*x2 + x3", VeroneseWeb::default_parameters(3), &exact());
        let Ok(web) = web else { return };
        let Ok(b) = bryant_forms(&web, &exact()) else { return };
        for (l, eta) in b.coframe.iter().enumerate() {
            for (i, v) in b.fields.iter().enumerate() {
                let e = eta.eval(v).unwrap() - if i == l { Expr::one() } else { Expr::zero() };
                assert!(is_zero(&e, &exact()).is_zero());
            }
        }
    }

    #[test]
    fn rejects_other_dimensions() {
        let web = VeroneseWeb::parse(2, "x0 + x1 + x2", VeroneseWeb::default_parameters(2), &exact()).unwrap();
        assert!(matches!(bryant_forms(&web, &exact()), Err(Error::Unsupported(_))));
    }
}
