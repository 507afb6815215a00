use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expr::{
    differentiate, eval_float, is_zero, sample_rational, substitute, Assignment, Expr, Symbol, Var, Verdict, ZeroTest,
};
use crate::jet::{invert, lie_bracket, Frame, OneForm, VectorField};
use crate::residual::Residual;

use super::{all_zero, hirota_residuals, null_vector, omega, rat, spectral, VeroneseWeb};

/// Coordinate Christoffel symbols: `∇_{∂_j}∂_i = Σ_m Γ[j][i][m] ∂_m`.
#[derive(Debug, Clone)]
pub struct Christoffels {
    frame: Frame,
    gamma: Vec<Vec<Vec<Expr>>>,
}

impl Christoffels {
    pub fn new(frame: &Frame, gamma: Vec<Vec<Vec<Expr>>>) -> Christoffels {
        let n = frame.len();
        assert!(gamma.len() == n && gamma.iter().all(|r| r.len() == n && r.iter().all(|c| c.len() == n)));
        Christoffels {
            frame: frame.clone(),
            gamma,
        }
    }

    /// `∇_{∂_j}∂_i = (∂_j∂_iw/∂_iw + α_j) ∂_i`.
    pub fn diagonal(web: &VeroneseWeb, alpha: &OneForm) -> Christoffels {
        let n = web.k + 1;
        let mut gamma = vec![vec![vec![Expr::zero(); n]; n]; n];
        for (j, row) in gamma.iter_mut().enumerate() {
            for (i, cell) in row.iter_mut().enumerate() {
                cell[i] = web.second(i, j) / web.partial(i) + &alpha.components()[j];
            }
        }
        Christoffels::new(&web.frame(), gamma)
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn get(&self, j: usize, i: usize, m: usize) -> &Expr {
        &self.gamma[j][i][m]
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Christoffels {
        Christoffels {
            frame: self.frame.clone(),
            gamma: self.gamma.iter().map(|r| r.iter().map(|c| c.iter().map(&f).collect()).collect()).collect(),
        }
    }

    /// `∇_Y Z`.
    pub fn covariant(&self, y: &VectorField, z: &VectorField) -> VectorField {
        let n = self.frame.len();
        let comps = (0..n)
            .map(|m| {
                let mut terms = vec![y.apply(&z.components()[m])];
                for j in 0..n {
                    for i in 0..n {
                        let g = &self.gamma[j][i][m];
                        if !g.is_literal_zero() {
                            terms.push(&y.components()[j] * &z.components()[i] * g);
                        }
                    }
                }
                Expr::add_all(terms)
            })
            .collect();
        VectorField::from_components(&self.frame, comps)
    }

    /// `T^m_{ji} = Γ[j][i][m] − Γ[i][j][m]` for `j < i`.
    pub fn torsion_components(&self) -> Vec<((usize, usize, usize), Expr)> {
        let n = self.frame.len();
        let mut out = Vec::new();
        for j in 0..n {
            for i in j + 1..n {
                for m in 0..n {
                    out.push(((j, i, m), &self.gamma[j][i][m] - &self.gamma[i][j][m]));
                }
            }
        }
        out
    }

    /// `r[a][b][c][m] = (R(∂_a, ∂_b)∂_c)^m`.
    pub fn curvature(&self) -> Vec<Vec<Vec<Vec<Expr>>>> {
        let vars = self.frame.vars();
        let n = vars.len();
        let mut r = vec![vec![vec![vec![Expr::zero(); n]; n]; n]; n];
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                if b < a {
                    for c in 0..n {
                        for m in 0..n {
                            r[a][b][c][m] = -&r[b][a][c][m];
                        }
                    }
                    continue;
                }
                for c in 0..n {
                    for m in 0..n {
                        let mut terms = vec![
                            differentiate(&self.gamma[b][c][m], vars[a]),
                            -differentiate(&self.gamma[a][c][m], vars[b]),
                        ];
                        for p in 0..n {
                            terms.push(&self.gamma[b][c][p] * &self.gamma[a][p][m]);
                            terms.push(-(&self.gamma[a][c][p] * &self.gamma[b][p][m]));
                        }
                        r[a][b][c][m] = Expr::add_all(terms);
                    }
                }
            }
        }
        r
    }

    /// `Ric(∂_b, ∂_c) = Σ_a (R(∂_a, ∂_b)∂_c)^a`.
    pub fn ricci(&self) -> Vec<Vec<Expr>> {
        let r = self.curvature();
        let n = self.frame.len();
        (0..n)
            .map(|b| (0..n).map(|c| Expr::add_all((0..n).map(|a| r[a][b][c][a].clone()))).collect())
            .collect()
    }

    /// `(∇_j g)_{ab}` for a symmetric tensor `g`.
    pub fn covariant_tensor(&self, g: &[Vec<Expr>]) -> Vec<Vec<Vec<Expr>>> {
        let vars = self.frame.vars();
        let n = vars.len();
        (0..n)
            .map(|j| {
                (0..n)
                    .map(|a| {
                        (0..n)
                            .map(|b| {
                                let mut terms = vec![differentiate(&g[a][b], vars[j])];
                                for m in 0..n {
                                    terms.push(-(&self.gamma[j][a][m] * &g[m][b]));
                                    terms.push(-(&self.gamma[j][b][m] * &g[a][m]));
                                }
                                Expr::add_all(terms)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }
}

/// Metric and Weyl form of a three-dimensional web.
#[derive(Debug, Clone)]
pub struct WeylData {
    /// `β = f·ω(t)`.
    pub f: Expr,
    /// `α(t) = α̃ − t·f·ω''`.
    pub alpha_tilde: OneForm,
    pub metric: Vec<Vec<Expr>>,
    pub weyl_form: OneForm,
    /// `(∇_j g)_{ab} − φ_j g_{ab}`.
    pub compatibility: Vec<Residual>,
}

#[derive(Debug, Clone)]
pub struct WebConnection {
    pub k: usize,
    pub christoffels: Christoffels,
    /// The `t`-independent part of the connection form; equal to `α` for
    /// `k ≠ 2`.
    pub alpha: OneForm,
    pub weyl: Option<WeylData>,
    /// Side conditions met while constructing the connection: the span
    /// property of `[V, V']` and the interpolation check for `k > 2`, the
    /// overdetermined torsion equations for `k = 2`.
    pub checks: Vec<Residual>,
}

/// The connection singled out for a web with vanishing Hirota residuals.
///
/// `k = 1`: `α = −(w01/w1)dx0 − (w01/w0)dx1`.
/// `k = 2`: the torsion-free Weyl connection with `β = f·ω`.
/// `k > 2`: `∇∂_i = (d∂_iw/∂_iw + α)∂_i` with `α(V(t)) = h(t)`, where
/// `[V(t), V'(t)] = h(t)V'(t) mod V(t)`.
pub fn canonical_connection(web: &VeroneseWeb, test: &ZeroTest) -> Result<WebConnection> {
    if !all_zero(hirota_residuals(web, test).values()) {
        return Err(Error::Inconsistent("Hirota residuals do not vanish".into()));
    }
    match web.k {
        1 => {
            let w01 = web.second(0, 1);
            let alpha = OneForm::from_components(
                &web.frame(),
                vec![-(w01 / web.partial(1)), -(w01 / web.partial(0))],
            );
            Ok(WebConnection {
                k: 1,
                christoffels: Christoffels::diagonal(web, &alpha),
                alpha,
                weyl: None,
                checks: Vec::new(),
            })
        }
        2 => weyl_connection(web, test),
        _ => {
            let (alpha, checks) = interpolated_alpha(web, test)?;
            Ok(WebConnection {
                k: web.k,
                christoffels: Christoffels::diagonal(web, &alpha),
                alpha,
                weyl: None,
                checks,
            })
        }
    }
}

/// Interpolation nodes `max(t_i) + 1, ..., max(t_i) + n`.
fn nodes(web: &VeroneseWeb, n: usize) -> Vec<BigRational> {
    let top = web.t.iter().max().expect("nonempty").clone();
    (1..=n as i64).map(|m| &top + BigRational::from_integer(m.into())).collect()
}

/// `h(s)` with `[V(s), V'(s)] = a V(s) + h V'(s)`, plus residuals of the
/// remaining components.
fn bracket_coefficient(web: &VeroneseWeb, s: &BigRational, test: &ZeroTest) -> (Expr, Vec<Residual>) {
    let s = rat(s);
    let v = null_vector(web, &s, 0);
    let vp = null_vector(web, &s, 1);
    let b = lie_bracket(&v, &vp).expect("same frame");
    let (v0, v1) = (&v.components()[0], &v.components()[1]);
    let (p0, p1) = (&vp.components()[0], &vp.components()[1]);
    let (b0, b1) = (&b.components()[0], &b.components()[1]);
    let det = v0 * p1 - v1 * p0;
    let h = (v0 * b1 - v1 * b0) / &det;
    let a = (b0 * p1 - b1 * p0) / &det;
    let rest = (2..=web.k)
        .map(|m| {
            let e = &b.components()[m] - &a * &v.components()[m] - &h * &vp.components()[m];
            Residual::new(
                format!("span[V,V']^x{m}"),
                format!("x{m} component of [V,V'] - a*V - h*V' at t = {s}"),
                e,
                test,
            )
        })
        .collect();
    (h, rest)
}

/// Solves `α(V(s)) = h(s)` at `k+1` nodes and checks one more.
pub fn interpolated_alpha(web: &VeroneseWeb, test: &ZeroTest) -> Result<(OneForm, Vec<Residual>)> {
    let k = web.k;
    let ns = nodes(web, k + 2);
    let mut checks = Vec::new();
    let mut hs = Vec::with_capacity(k + 2);
    for s in &ns {
        let (h, rest) = bracket_coefficient(web, s, test);
        checks.extend(rest);
        hs.push(h);
    }
    // α_j = ∂_jw · Π_{l≠j}(t_l − t_j) · β_j with Σ_j (s − t_j)^k β_j = h(s).
    let matrix: Vec<Vec<Expr>> = ns[..=k]
        .iter()
        .map(|s| (0..=k).map(|j| rat(&num_traits::pow::pow(s - &web.t[j], k))).collect())
        .collect();
    let inv = invert(&matrix, test)?;
    let comps: Vec<Expr> = (0..=k)
        .map(|j| {
            let beta = Expr::add_all(inv[j].iter().zip(&hs).map(|(m, h)| m * h));
            rat(&web.node_weight(j)) * web.partial(j) * beta
        })
        .collect();
    let alpha = OneForm::from_components(&web.frame(), comps);
    let last = &ns[k + 1];
    let check = Residual::new(
        "interpolation",
        format!("α(V(t)) - h(t) at t = {last}"),
        alpha.eval(&null_vector(web, &rat(last), 0))? - &hs[k + 1],
        test,
    );
    if check.verdict() == Verdict::NonZero {
        return Err(Error::Inconsistent(format!("h is not of degree ≤ {k} in t")));
    }
    checks.push(check);
    Ok((alpha, checks))
}

/// Row reduction of an overdetermined linear system.
///
/// Returns the solution and the reduced equations that must vanish for it
/// to be consistent.
pub(crate) fn solve_overdetermined(rows: &[Vec<Expr>], rhs: &[Expr], test: &ZeroTest) -> Result<(Vec<Expr>, Vec<Expr>)> {
    let unknowns = rows[0].len();
    let mut a: Vec<Vec<Expr>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let mut pivot_rows = Vec::with_capacity(unknowns);
    let mut used = vec![false; a.len()];
    for col in 0..unknowns {
        let pivot = (0..a.len())
            .filter(|r| !used[*r] && !a[*r][col].is_literal_zero())
            .find(|r| is_zero(&a[*r][col], test).verdict == Verdict::NonZero)
            .ok_or(Error::Singular)?;
        used[pivot] = true;
        let inv = a[pivot][col].recip();
        a[pivot] = a[pivot].iter().map(|e| e * &inv).collect();
        let prow = a[pivot].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == pivot || row[col].is_literal_zero() {
                continue;
            }
            let factor = row[col].clone();
            *row = row.iter().zip(&prow).map(|(x, p)| if p.is_literal_zero() { x.clone() } else { x - &factor * p }).collect();
        }
        pivot_rows.push(pivot);
    }
    let solution = pivot_rows.iter().map(|r| a[*r][unknowns].clone()).collect();
    let leftover = (0..a.len()).filter(|r| !used[*r]).map(|r| a[r][unknowns].clone()).collect();
    Ok((solution, leftover))
}

fn placeholder(i: usize) -> Expr {
    Expr::var(Var::U(i as u8))
}

fn set_placeholders(e: &Expr, values: &[Expr]) -> Expr {
    substitute(e, &|s| match s {
        Symbol::Coord(Var::U(i)) => values.get(*i as usize).cloned(),
        _ => None,
    })
}

/// Conformal metric with null vectors `V(t)`:
/// `g_ij = (t3−ti)(t3−tj) H_ij ∂_iw ∂_jw` with `H_ii = (tj−tl)²` and
/// `H_ij = (tl−ti)(tl−tj)`, `{i, j, l} = {0, 1, 2}`.
pub fn weyl_metric(web: &VeroneseWeb) -> Vec<Vec<Expr>> {
    let t = &web.t;
    let h = |i: usize, j: usize| -> BigRational {
        if i == j {
            let (a, b) = ((i + 1) % 3, (i + 2) % 3);
            (&t[a] - &t[b]) * (&t[a] - &t[b])
        } else {
            let l = 3 - i - j;
            (&t[l] - &t[i]) * (&t[l] - &t[j])
        }
    };
    metric_from(web, h)
}

/// `g_ij = (t3−ti)(t3−tj)(ti² + tj² − ti tj − Σ tl²) ∂_iw ∂_jw` as printed.
pub fn printed_weyl_metric(web: &VeroneseWeb) -> Vec<Vec<Expr>> {
    let t = &web.t;
    let sum_sq: BigRational = t[..3].iter().map(|x| x * x).sum();
    metric_from(web, |i, j| &t[i] * &t[i] + &t[j] * &t[j] - &t[i] * &t[j] - &sum_sq)
}

fn metric_from(web: &VeroneseWeb, h: impl Fn(usize, usize) -> BigRational) -> Vec<Vec<Expr>> {
    let t = &web.t;
    (0..3)
        .map(|i| {
            (0..3)
                .map(|j| rat(&((&t[3] - &t[i]) * (&t[3] - &t[j]) * h(i, j))) * web.partial(i) * web.partial(j))
                .collect()
        })
        .collect()
}

/// `φ = Σ_i (Σ_{j≠i} ∂_i∂_jw/∂_jw) dx_i`.
pub fn weyl_form(web: &VeroneseWeb) -> OneForm {
    let comps = (0..3)
        .map(|i| Expr::add_all((0..3).filter(|j| *j != i).map(|j| web.second(i, j) / web.partial(j))))
        .collect();
    OneForm::from_components(&web.frame(), comps)
}

/// `f` as printed for the torsion-free Weyl connection.
pub fn printed_weyl_f(web: &VeroneseWeb) -> Expr {
    let t = &web.t;
    let (w0, w1, w2) = (web.partial(0), web.partial(1), web.partial(2));
    let c = ((&t[3] - &t[1]) * (&t[0] - &t[2])).recip() / BigRational::from_integer(4.into());
    rat(&c) * (web.second(0, 1) / (w0 * w1) - web.second(1, 2) / (w1 * w2))
}

/// `α̃` as printed, cyclic over `(0, 1, 2)`.
pub fn printed_alpha_tilde(web: &VeroneseWeb) -> OneForm {
    let t = &web.t;
    let comps = (0..3)
        .map(|i| {
            let (j, l) = ((i + 1) % 3, (i + 2) % 3);
            let cj = (&t[j] - BigRational::from_integer(3.into()) * &t[l]) / (&t[j] - &t[l]);
            let cl = (&t[l] - BigRational::from_integer(3.into()) * &t[j]) / (&t[l] - &t[j]);
            Expr::rat(-1, 4)
                * (rat(&cj) * web.second(i, j) / web.partial(j) + rat(&cl) * web.second(i, l) / web.partial(l))
        })
        .collect();
    OneForm::from_components(&web.frame(), comps)
}

/// Torsion-free connection with `∇V(t) = α(t)V(t) + f·ω(t)V'(t)`.
///
/// With `V(t) = Σ_m P_m(t) ∂_m/∂_mw`, the coefficients `A` in
/// `∇_{∂_j}(∂_i/∂_iw) = Σ_m A[j][i][m] ∂_m/∂_mw` follow from matching
/// powers of `t`; `f` and `α̃` are then fixed by vanishing torsion.
fn weyl_connection(web: &VeroneseWeb, test: &ZeroTest) -> Result<WebConnection> {
    let frame = web.frame();
    let t = spectral();
    let om = omega(web, &t);
    let f = placeholder(0);
    let at: Vec<Expr> = (0..3).map(|j| placeholder(j + 1)).collect();
    let om2: Vec<Expr> = om
        .components()
        .iter()
        .map(|c| differentiate(&differentiate(c, Var::T), Var::T))
        .collect();
    // P_m(t) = (t − t_m)² / Π_{l≠m}(t_l − t_m), coefficients by degree.
    let p: Vec<Vec<BigRational>> = (0..3)
        .map(|m| {
            let w = web.node_weight(m).recip();
            let tm = &web.t[m];
            vec![tm * tm * &w, -BigRational::from_integer(2.into()) * tm * &w, w]
        })
        .collect();
    let q: Vec<Vec<Expr>> = (0..3).map(|d| (0..3).map(|i| rat(&p[i][d])).collect()).collect();
    let qinv = invert(&q, test)?;

    let mut checks = Vec::new();
    let mut a = vec![vec![vec![Expr::zero(); 3]; 3]; 3];
    for j in 0..3 {
        let alpha_t = &at[j] - &t * &f * &om2[j];
        for m in 0..3 {
            let pm = Expr::add_all((0..3).map(|d| rat(&p[m][d]) * t.pow(d as i64)));
            let pm1 = differentiate(&pm, Var::T);
            let rhs = &alpha_t * &pm + &f * &om.components()[j] * pm1;
            let coeffs = rhs.polynomial_coefficients(Var::T, 3);
            checks.push(Residual::new(
                format!("cubic{j}{m}"),
                format!("t^3 coefficient of α_{j}(t)P_{m}(t) + fω_{j}(t)P_{m}'(t)"),
                coeffs[3].clone(),
                test,
            ));
            for i in 0..3 {
                a[j][i][m] = Expr::add_all((0..3).map(|d| &qinv[i][d] * &coeffs[d]));
            }
        }
    }
    let gamma_u: Vec<Vec<Vec<Expr>>> = (0..3)
        .map(|j| {
            (0..3)
                .map(|i| {
                    (0..3)
                        .map(|m| {
                            let base = web.partial(i) * &a[j][i][m] / web.partial(m);
                            if m == i {
                                base + web.second(i, j) / web.partial(i)
                            } else {
                                base
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let placeholders = Christoffels::new(&frame, gamma_u);
    let torsion = placeholders.torsion_components();
    let zeros: Vec<Expr> = vec![Expr::zero(); 4];
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (_, e) in &torsion {
        rows.push((0..4).map(|u| differentiate(e, Var::U(u as u8))).collect::<Vec<_>>());
        rhs.push(-set_placeholders(e, &zeros));
    }
    let (solution, leftover) = solve_overdetermined(&rows, &rhs, test)?;
    for (n, e) in leftover.into_iter().enumerate() {
        checks.push(Residual::new(format!("torsion_rank{n}"), "reduced torsion equation", e, test));
    }
    let christoffels = placeholders.map(|e| set_placeholders(e, &solution));
    let alpha_tilde = OneForm::from_components(&frame, solution[1..].to_vec());
    let metric = weyl_metric(web);
    let phi = weyl_form(web);
    let nabla_g = christoffels.covariant_tensor(&metric);
    let mut compatibility = Vec::new();
    for j in 0..3 {
        for a in 0..3 {
            for b in a..3 {
                let e = &nabla_g[j][a][b] - &phi.components()[j] * &metric[a][b];
                compatibility.push(Residual::new(
                    format!("(∇g-φg)_{j}{a}{b}"),
                    format!("(∇_{j} g)_{a}{b} - φ_{j} g_{a}{b}"),
                    e,
                    test,
                ));
            }
        }
    }
    Ok(WebConnection {
        k: 2,
        christoffels,
        alpha: alpha_tilde.clone(),
        weyl: Some(WeylData {
            f: solution[0].clone(),
            alpha_tilde,
            metric,
            weyl_form: phi,
            compatibility,
        }),
        checks,
    })
}

/// `g(V(s), V(s))` at the given parameter values.
pub fn null_metric_residuals(web: &VeroneseWeb, metric: &[Vec<Expr>], samples: &[BigRational], test: &ZeroTest) -> Vec<Residual> {
    samples
        .iter()
        .map(|s| {
            let v = null_vector(web, &rat(s), 0);
            let c = v.components();
            let e = Expr::add_all((0..c.len()).flat_map(|a| (0..c.len()).map(move |b| (a, b))).map(|(a, b)| &metric[a][b] * &c[a] * &c[b]));
            Residual::new("g(V,V)", format!("g(V(t),V(t)) at t = {s}"), e, test)
        })
        .collect()
}

/// Torsion coefficients of a web connection.
pub fn torsion(conn: &WebConnection, test: &ZeroTest) -> Vec<Residual> {
    conn.christoffels
        .torsion_components()
        .into_iter()
        .filter(|(_, e)| !e.is_literal_zero())
        .map(|((j, i, m), e)| Residual::new(format!("T^{m}_{j}{i}"), format!("x{m} component of T(∂_{j},∂_{i})"), e, test))
        .collect()
}

#[derive(Debug, Clone)]
pub struct FlatnessCheck {
    pub flat: bool,
    pub residuals: Vec<Residual>,
}

/// Flatness of a web.
///
/// For `k > 2` the criterion is vanishing torsion of the canonical
/// connection. For `k = 2` it is `∂_i(∂_jw/∂_lw) = 0` for `i ∉ {j, l}`,
/// which characterizes webs separable after a change of each coordinate.
pub fn flatness_verdict(web: &VeroneseWeb, test: &ZeroTest) -> Result<FlatnessCheck> {
    match web.k {
        1 => Err(Error::Unsupported("every three-web in the plane is a Veronese web; flatness is not decided here".into())),
        2 => {
            let vars = web.frame().vars().to_vec();
            let mut residuals = Vec::new();
            for j in 0..3 {
                for l in j + 1..3 {
                    let i = 3 - j - l;
                    let e = differentiate(&(web.partial(j) / web.partial(l)), vars[i]);
                    residuals.push(Residual::new(format!("ratio{i}{j}{l}"), format!("∂_{i}(w_{j}/w_{l})"), e, test));
                }
            }
            Ok(FlatnessCheck {
                flat: all_zero(&residuals),
                residuals,
            })
        }
        _ => {
            let conn = canonical_connection(web, test)?;
            let residuals = torsion(&conn, test);
            Ok(FlatnessCheck {
                flat: all_zero(&residuals),
                residuals,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledResidual {
    /// Largest `|v|/max(1, M)`, `M` the magnitude bound of the evaluation.
    pub max_residual: f64,
    pub samples: usize,
}

/// `Ric(V(s), V(s))` at random base points for each `s`.
pub fn ricci_null_residual(
    web: &VeroneseWeb,
    conn: &WebConnection,
    t_samples: &[BigRational],
    points: usize,
    seed: u64,
) -> SampledResidual {
    let ric = conn.christoffels.ricci();
    let n = web.k + 1;
    let exprs: Vec<Expr> = t_samples
        .iter()
        .map(|s| {
            let v = null_vector(web, &rat(s), 0);
            let c = v.components();
            Expr::add_all((0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| &ric[a][b] * &c[a] * &c[b]))
        })
        .collect();
    sample_max(&web.frame(), &exprs, points, seed)
}

pub(crate) fn sample_max(frame: &Frame, exprs: &[Expr], points: usize, seed: u64) -> SampledResidual {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_residual: f64 = 0.0;
    let mut samples = 0;
    let mut attempts = 0;
    while samples < points && attempts < 16 * points.max(1) {
        attempts += 1;
        let a: Assignment = frame.vars().iter().map(|v| (Symbol::Coord(*v), sample_rational(&mut rng, 4))).collect();
        let vals: Option<Vec<(f64, f64)>> = exprs.iter().map(|e| eval_float(e, &a).ok()).collect();
        let Some(vals) = vals else { continue };
        samples += 1;
        for (v, m) in vals {
            max_residual = max_residual.max(v.abs() / m.max(1.0));
        }
    }
    SampledResidual { max_residual, samples }
}
