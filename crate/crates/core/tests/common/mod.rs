//! Oracles shared by integration tests.

use num_rational::BigRational;

use jetinv::expr::{eval_float, Assignment, Expr, Symbol};
use jetinv::web::{null_vector, Christoffels, VeroneseWeb};

/// `Ric(V(s), V(s))` from central differences of numerically evaluated Christoffel symbols.
pub fn finite_difference_ricci(web: &VeroneseWeb, gamma: &Christoffels, point: &[f64], s: &BigRational) -> f64 {
    let vars = web.frame().vars().to_vec();
    let n = vars.len();
    let at = |p: &[f64]| -> Vec<Vec<Vec<f64>>> {
        let a: Assignment = vars
            .iter()
            .zip(p)
            .map(|(v, x)| (Symbol::Coord(*v), BigRational::from_float(*x).unwrap()))
            .collect();
        (0..n)
            .map(|j| (0..n).map(|i| (0..n).map(|m| eval_float(gamma.get(j, i, m), &a).unwrap().0).collect()).collect())
            .collect()
    };
    let h = 1e-5;
    let g = at(point);
    let dg: Vec<Vec<Vec<Vec<f64>>>> = (0..n)
        .map(|a| {
            let mut plus = point.to_vec();
            let mut minus = point.to_vec();
            plus[a] += h;
            minus[a] -= h;
            let (gp, gm) = (at(&plus), at(&minus));
            (0..n)
                .map(|j| (0..n).map(|i| (0..n).map(|m| (gp[j][i][m] - gm[j][i][m]) / (2.0 * h)).collect()).collect())
                .collect()
        })
        .collect();
    // R^m_{c,ab} = ∂_aΓ[b][c][m] − ∂_bΓ[a][c][m] + Γ[b][c][p]Γ[a][p][m] − Γ[a][c][p]Γ[b][p][m]
    let mut ric = vec![vec![0.0; n]; n];
    for b in 0..n {
        for c in 0..n {
            for a in 0..n {
                let mut r = dg[a][b][c][a] - dg[b][a][c][a];
                for p in 0..n {
                    r += g[b][c][p] * g[a][p][a] - g[a][c][p] * g[b][p][a];
                }
                ric[b][c] += r;
            }
        }
    }
    let a: Assignment = vars
        .iter()
        .zip(point)
        .map(|(v, x)| (Symbol::Coord(*v), BigRational::from_float(*x).unwrap()))
        .collect();
    let v: Vec<f64> = null_vector(web, &Expr::num(s.clone()), 0)
        .components()
        .iter()
        .map(|e| eval_float(e, &a).unwrap().0)
        .collect();
    (0..n).flat_map(|b| (0..n).map(move |c| (b, c))).map(|(b, c)| ric[b][c] * v[b] * v[c]).sum()
}

