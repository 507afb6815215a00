//! Closed-form expressions for the generic equation, written directly in
//! terms of partial derivatives of `F`. They are independent of the chain
//! computation and serve as cross-checks for it.

use crate::expr::{differentiate, Expr, OpaqueDerivative, Var};
use crate::jet::{Frame, VectorField};

use super::{generic_rhs, CurvatureChain};

/// Partial derivative of the generic `F` of an equation of the given order.
pub fn partial(order: usize, vars: &[Var]) -> Expr {
    let base = OpaqueDerivative::new("F", Frame::jet(order - 1).vars());
    Expr::opaque(base.derive_many(vars).expect("F depends on every jet coordinate"))
}

fn x(i: usize) -> Var {
    Var::X(i as u8)
}

fn q(p: i64, d: i64) -> Expr {
    Expr::rat(p, d)
}

/// `X_F` applied `n` times.
fn xf_pow(xf: &VectorField, e: &Expr, n: usize) -> Expr {
    (0..n).fold(e.clone(), |acc, _| xf.apply(&acc))
}

fn generic_xf(order: usize) -> VectorField {
    crate::jet::total_derivative_field(order, &generic_rhs(order)).expect("order ≥ 2")
}

/// Curvatures `K_0..K_{k−1}` of the generic equation of order 2, 3 or 4.
pub fn curvatures(order: usize) -> Option<Vec<Expr>> {
    let xf = generic_xf(order);
    let p = |i: usize| partial(order, &[x(i)]);
    let xn = |e: &Expr, n: usize| xf_pow(&xf, e, n);
    match order {
        2 => Some(vec![
            -p(0) + q(1, 2) * xn(&p(1), 1) - q(1, 4) * p(1).pow(2),
        ]),
        3 => {
            let (f0, f1, f2) = (p(0), p(1), p(2));
            let k0 = Expr::add_all([
                f0,
                -xn(&f1, 1),
                q(1, 3) * &f1 * &f2,
                q(2, 3) * xn(&f2, 2),
                q(-2, 3) * xn(&f2, 1) * &f2,
                q(2, 27) * f2.pow(3),
            ]);
            let k1 = f1 - xn(&f2, 1) + q(1, 3) * f2.pow(2);
            Some(vec![k0, k1])
        }
        4 => {
            let (f0, f1, f2, f3) = (p(0), p(1), p(2), p(3));
            let x3 = xn(&f3, 1);
            let k0 = Expr::add_all([
                -f0,
                xn(&f1, 1),
                -xn(&f2, 2),
                q(3, 4) * xn(&f3, 3),
                q(-9, 16) * x3.pow(2),
                q(18, 64) * &x3 * f3.pow(2),
                q(-3, 256) * f3.pow(4),
                q(-1, 4) * &f1 * &f3,
                q(1, 2) * xn(&f2, 1) * &f3,
                q(-3, 4) * xn(&f3, 2) * &f3,
                q(1, 4) * &x3 * &f2,
                q(-1, 16) * &f2 * f3.pow(2),
            ]);
            let k1 = Expr::add_all([
                -f1,
                Expr::int(2) * xn(&f2, 1),
                Expr::int(-2) * xn(&f3, 2),
                q(-1, 2) * &f2 * &f3,
                q(3, 2) * &x3 * &f3,
                q(-1, 8) * f3.pow(3),
            ]);
            let k2 = -f2 + q(3, 2) * &x3 - q(3, 8) * f3.pow(2);
            Some(vec![k0, k1, k2])
        }
        _ => None,
    }
}

/// `K_{k−1} = (−1)^k (∂_{k−1}F − (k/2) X_F(∂_kF) + k/(2(k+1)) (∂_kF)^2)`.
pub fn top_curvature(order: usize) -> Expr {
    let k = order - 1;
    let xf = generic_xf(order);
    let fk = partial(order, &[x(k)]);
    let body = partial(order, &[x(k - 1)]) - q(k as i64, 2) * xf.apply(&fk)
        + q(k as i64, 2 * (k as i64 + 1)) * fk.pow(2);
    if k % 2 == 0 {
        body
    } else {
        -body
    }
}

/// `V' = −∂_{k−1} − (k/(k+1)) ∂_kF ∂_k`.
pub fn first_field(order: usize) -> VectorField {
    let k = order - 1;
    let frame = Frame::jet(k);
    let mut v = VectorField::zero(&frame);
    v.set(x(k - 1), Expr::int(-1));
    v.set(x(k), -(q(k as i64, k as i64 + 1) * partial(order, &[x(k)])));
    v
}

/// `V` through `V^(k)` for orders 2 to 4.
///
/// At order 4 the `∂_2F` contributions to `V''` and `V'''` and the factor
/// `∂_3F` on the `X_F(∂_3F)` term of the last `V'''` component are
/// included; the chain recursion produces them.
pub fn fields(order: usize) -> Option<Vec<VectorField>> {
    let k = order - 1;
    let frame = Frame::jet(k);
    let xf = generic_xf(order);
    let p = |i: usize| partial(order, &[x(i)]);
    let field = |pairs: Vec<(usize, Expr)>| {
        let mut v = VectorField::zero(&frame);
        for (i, e) in pairs {
            v.set(x(i), e);
        }
        v
    };
    match order {
        2 => Some(vec![
            field(vec![(1, Expr::one())]),
            field(vec![(0, Expr::int(-1)), (1, q(-1, 2) * p(1))]),
        ]),
        3 => {
            let f2 = p(2);
            Some(vec![
                field(vec![(2, Expr::one())]),
                field(vec![(1, Expr::int(-1)), (2, q(-2, 3) * &f2)]),
                field(vec![
                    (0, Expr::one()),
                    (1, q(1, 3) * &f2),
                    (2, p(1) + q(4, 9) * f2.pow(2) - q(2, 3) * xf.apply(&f2)),
                ]),
            ])
        }
        4 => {
            let f3 = p(3);
            let x3 = xf.apply(&f3);
            Some(vec![
                field(vec![(3, Expr::one())]),
                field(vec![(2, Expr::int(-1)), (3, q(-3, 4) * &f3)]),
                field(vec![
                    (1, Expr::one()),
                    (2, q(1, 2) * &f3),
                    (3, p(2) + q(9, 16) * f3.pow(2) - q(3, 4) * &x3),
                ]),
                field(vec![
                    (0, Expr::int(-1)),
                    (1, q(-1, 4) * &f3),
                    (2, q(5, 4) * &x3 - p(2) - q(7, 16) * f3.pow(2)),
                    (
                        3,
                        Expr::add_all([
                            q(27, 16) * &x3 * &f3,
                            q(-3, 4) * xf_pow(&xf, &f3, 2),
                            xf.apply(&p(2)),
                            -p(1),
                            q(-5, 4) * p(2) * &f3,
                            q(-27, 64) * f3.pow(3),
                        ]),
                    ),
                ]),
            ])
        }
        _ => None,
    }
}

/// The classical projective-structure invariant of `x'' = F(t, x, x')` in
/// coordinates.
pub fn cartan_order2() -> Expr {
    let d = |vars: &[Var]| partial(2, vars);
    let (t, x0, x1) = (Var::T, x(0), x(1));
    let f = d(&[]);
    let y = Expr::x(1);
    Expr::add_all([
        d(&[x0, x0]),
        q(-1, 2) * &f * d(&[x0, x1, x1]),
        q(-1, 2) * d(&[x0]) * d(&[x1, x1]),
        q(-2, 3) * d(&[t, x0, x1]),
        q(1, 6) * d(&[t, t, x1, x1]),
        q(1, 3) * &y * d(&[t, x0, x1, x1]),
        q(1, 6) * d(&[t]) * d(&[x1, x1, x1]),
        q(1, 3) * &f * d(&[t, x1, x1, x1]),
        q(-2, 3) * &y * d(&[x0, x0, x1]),
        q(1, 6) * y.pow(2) * d(&[x0, x0, x1, x1]),
        q(1, 6) * &y * d(&[x0]) * d(&[x1, x1, x1]),
        q(1, 3) * &y * &f * d(&[x0, x1, x1, x1]),
        q(2, 3) * d(&[x1]) * d(&[x0, x1]),
        q(-1, 6) * d(&[x1]) * d(&[t, x1, x1]),
        q(-1, 6) * &y * d(&[x1]) * d(&[x0, x1, x1]),
        q(1, 6) * f.pow(2) * d(&[x1, x1, x1, x1]),
    ])
}

/// The Wünschmann invariant of `x''' = F` in coordinates.
pub fn wunschmann_order3() -> Expr {
    let xf = generic_xf(3);
    let (f1, f2) = (partial(3, &[x(1)]), partial(3, &[x(2)]));
    Expr::add_all([
        partial(3, &[x(0)]),
        q(-1, 2) * xf.apply(&f1),
        q(1, 3) * &f1 * &f2,
        q(1, 6) * xf_pow(&xf, &f2, 2),
        q(-1, 3) * xf.apply(&f2) * &f2,
        q(2, 27) * f2.pow(3),
    ])
}

/// The conformal-geodesic obstruction of `x''' = F` in coordinates.
pub fn cartan_order3() -> Expr {
    let xf = generic_xf(3);
    Expr::add_all([
        xf_pow(&xf, &partial(3, &[x(2), x(2)]), 2),
        -xf.apply(&partial(3, &[x(1), x(2)])),
        partial(3, &[x(0), x(2)]),
    ])
}

/// The first of the two classical fourth-order conditions, written through
/// the curvatures:
/// `K0 + K1' + 7K2''/10 − 9K2²/100 − ∂_3F (K1 + K2')/4`.
pub fn wunschmann_order4_alternative(chain: &CurvatureChain) -> Expr {
    let k = chain.curvatures();
    let f3 = differentiate(chain.problem().rhs(), x(3));
    let k2p = chain.prime(&k[2]);
    Expr::add_all([
        k[0].clone(),
        chain.prime(&k[1]),
        q(7, 10) * chain.prime(&k2p),
        q(-9, 100) * k[2].pow(2),
        q(-1, 4) * f3 * (&k[1] + &k2p),
    ])
}
