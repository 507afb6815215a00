use jetinv::expr::{is_zero, Expr, OpaqueDerivative, Var, Verdict, ZeroTest};
use jetinv::jet::{Frame, OneForm};
use jetinv::ode::{
    beta_coefficient, cartan_residuals, classical, classify, connection_residuals_on_frame, curvature_chain,
    wunschmann_residuals, Classification, CurvatureChain, FrameForm, OdeProblem,
};

fn exact() -> ZeroTest {
    ZeroTest {
        tolerance: 0.0,
        ..ZeroTest::default()
    }
}

fn generic(order: usize) -> CurvatureChain {
    curvature_chain(&OdeProblem::generic(order).unwrap(), &exact()).unwrap()
}

fn concrete(order: usize, rhs: &str) -> CurvatureChain {
    curvature_chain(&OdeProblem::parse(order, rhs).unwrap(), &exact()).unwrap()
}

fn zero(e: &Expr) -> bool {
    is_zero(e, &exact()).is_zero()
}

#[test]
fn low_order_curvatures_match_closed_forms() {
    for order in 2..=4 {
        let ch = generic(order);
        let reference = classical::curvatures(order).unwrap();
        for (j, k) in reference.iter().enumerate() {
            assert!(zero(&(ch.curvature(j) - k)), "order {order} K{j}");
        }
        for (j, v) in classical::fields(order).unwrap().iter().enumerate() {
            assert_eq!(ch.field(j).sub(v).unwrap().vanishes(&exact()), Verdict::Zero, "order {order} V{j}");
        }
    }
}

#[test]
fn top_curvature_and_first_field_up_to_order_six() {
    for order in 2..=6 {
        let ch = generic(order);
        assert!(zero(&(ch.curvature(order - 2) - classical::top_curvature(order))), "order {order}");
        let d = ch.field(1).sub(&classical::first_field(order)).unwrap();
        assert_eq!(d.vanishes(&exact()), Verdict::Zero, "order {order}");
    }
}

#[test]
fn extraction_residuals_vanish() {
    let ch = generic(4);
    assert!(ch.extraction_residuals().iter().all(|r| r.is_zero()));
}

#[test]
fn wunschmann_order_three_is_classical() {
    let ch = generic(3);
    let w = wunschmann_residuals(&ch, &exact());
    assert_eq!(w.len(), 1);
    assert!(zero(&(w[0].expr.clone() - classical::wunschmann_order3())));
}

#[test]
fn order_two_obstruction_is_a_third_of_the_classical_invariant() {
    let ch = generic(2);
    let c = &cartan_residuals(&ch, &exact())[0];
    assert!(zero(&(Expr::rat(1, 3) * &c.expr - classical::cartan_order2())));
}

#[test]
fn order_two_classical_invariant_is_tresse() {
    // 6C = D²F_11 − 4D(F_01) − F_1 D(F_11) + 6F_00 − 3F_0 F_11 + 4F_1 F_01
    let pr = OdeProblem::generic(2).unwrap();
    let d = pr.total_derivative();
    let p = |v: &[Var]| classical::partial(2, v);
    let (x0, x1) = (Var::X(0), Var::X(1));
    let f11 = p(&[x1, x1]);
    let l = Expr::add_all([
        d.apply(&d.apply(&f11)),
        Expr::int(-4) * d.apply(&p(&[x0, x1])),
        -(p(&[x1]) * d.apply(&f11)),
        Expr::int(6) * p(&[x0, x0]),
        Expr::int(-3) * p(&[x0]) * &f11,
        Expr::int(4) * p(&[x1]) * p(&[x0, x1]),
    ]);
    assert!(zero(&(Expr::int(6) * classical::cartan_order2() - l)));
}

#[test]
fn order_three_cartan_identities() {
    let ch = generic(3);
    let (k0, k1) = (ch.curvature(0).clone(), ch.curvature(1).clone());
    let c = classical::cartan_order3();
    let unconditional = Expr::rat(-3, 2) * (ch.along(1, &k1) - ch.along(0, &k0)) - &c;
    assert!(zero(&unconditional));
    // with K1' replaced by −2K0
    let reduced = Expr::int(2) * ch.along(1, &k1) + ch.along(0, &(Expr::int(-2) * &k0));
    assert!(zero(&(&reduced + Expr::rat(4, 3) * &c)));
    assert!(!zero(&(&reduced + Expr::rat(3, 4) * &c)));
}

#[test]
fn order_four_alternative_wunschmann_form() {
    let ch = generic(4);
    let w = wunschmann_residuals(&ch, &exact());
    let f3 = jetinv::expr::differentiate(ch.problem().rhs(), Var::X(3));
    let combo = Expr::add_all([
        w[0].expr.clone(),
        Expr::rat(7, 10) * ch.prime(&w[1].expr),
        Expr::rat(-1, 4) * f3 * &w[1].expr,
    ]);
    assert!(zero(&(classical::wunschmann_order4_alternative(&ch) - combo)));
}

#[test]
fn generic_equations_have_no_structure() {
    for order in 3..=4 {
        let ch = generic(order);
        let w = wunschmann_residuals(&ch, &exact());
        let c = cartan_residuals(&ch, &exact());
        assert!(w.iter().all(|r| r.verdict() == Verdict::NonZero));
        assert_eq!(classify(order, &w, &c), Classification::NoStructure);
    }
    let ch = generic(2);
    let c = cartan_residuals(&ch, &exact());
    assert_eq!(classify(2, &[], &c), Classification::WunschmannOnly);
}

#[test]
fn flat_equations() {
    for order in 2..=7 {
        let ch = concrete(order, "0");
        assert!(ch.curvatures().iter().all(Expr::is_literal_zero), "order {order}");
        let w = wunschmann_residuals(&ch, &exact());
        let c = cartan_residuals(&ch, &exact());
        assert!(w.iter().chain(&c).all(|r| r.is_zero()), "order {order}");
        let expected = if order >= 5 {
            Classification::NecessaryConditionsOnly
        } else {
            Classification::TotallyGeodesic
        };
        assert_eq!(classify(order, &w, &c), expected);
    }
    let ch = concrete(3, "3*x2^2/(2*x1)");
    assert!(ch.curvatures().iter().all(zero));
    let w = wunschmann_residuals(&ch, &exact());
    let c = cartan_residuals(&ch, &exact());
    assert!(w.iter().chain(&c).all(|r| r.is_zero()));
}

#[test]
fn classification_is_point_invariant() {
    // x ↦ x + t³ carries x''' = 0 to x''' = 6 and x'' = 0 to x'' = 6t.
    assert_eq!(classify_text(3, "6"), Classification::TotallyGeodesic);
    assert_eq!(classify_text(2, "6*t"), Classification::TotallyGeodesic);
    // x'' = x'^3 is projectively flat; x'' = x'^4 is not.
    assert_eq!(classify_text(2, "x1^3"), Classification::TotallyGeodesic);
    assert_eq!(classify_text(2, "x1^4"), Classification::WunschmannOnly);
    // x''' = x''^2 fails the Wünschmann condition.
    assert_eq!(classify_text(3, "x2^2"), Classification::NoStructure);
}

fn classify_text(order: usize, rhs: &str) -> Classification {
    let ch = concrete(order, rhs);
    let w = wunschmann_residuals(&ch, &exact());
    let c = cartan_residuals(&ch, &exact());
    classify(order, &w, &c)
}

#[test]
fn beta_coefficients_at_orders_four_to_six() {
    let ch = generic(4);
    let b = beta_coefficient(&ch, &exact()).unwrap();
    assert!(zero(&(b.b.clone() + Expr::rat(1, 5) * ch.along(0, ch.curvature(2)))));

    let ch = generic(5);
    let b = beta_coefficient(&ch, &exact()).unwrap();
    assert!(zero(&(b.b.clone() - Expr::rat(1, 10) * ch.along(1, ch.curvature(3)))));

    let ch = generic(6);
    let b = beta_coefficient(&ch, &exact()).unwrap();
    assert!(zero(&(b.b.clone() + Expr::rat(2, 35) * ch.along(2, ch.curvature(4)))));

    assert!(beta_coefficient(&generic(3), &exact()).is_err());
}

#[test]
fn beta_form_annihilates_lower_chain_and_total_derivative() {
    let ch = generic(4);
    let b = beta_coefficient(&ch, &exact()).unwrap();
    let values = FrameForm::from_form(&ch, &b.form).unwrap();
    for (j, v) in values.values().iter().enumerate() {
        assert!(zero(&(v - &b.values.values()[j])), "V^({j})");
    }
    assert!(zero(&b.form.eval(ch.total_derivative()).unwrap()));
}

#[test]
fn frame_prime_matches_lie_derivative() {
    let ch = generic(3);
    let frame = ch.problem().frame();
    let h = Expr::opaque(OpaqueDerivative::new("H", frame.vars()));
    let form = OneForm::from_components(
        &frame,
        vec![Expr::zero(), h.clone(), Expr::x(2), Expr::x(1) * &h],
    );
    let lie = form.lie_derivative(ch.total_derivative()).unwrap();
    let direct = FrameForm::from_form(&ch, &lie).unwrap();
    let framed = FrameForm::from_form(&ch, &form).unwrap().prime(&ch);
    for (a, b) in direct.values().iter().zip(framed.values()) {
        assert!(zero(&(a - b)));
    }
}

#[test]
fn beta_equation_oracles_at_order_four() {
    let ch = generic(4);
    let k = ch.k();
    let b = beta_coefficient(&ch, &exact()).unwrap();
    let alpha = FrameForm::zero(&ch);
    let res = connection_residuals_on_frame(&ch, &alpha, &b.values, &exact());
    assert!(res.beta_equation[k - 3].is_zero());
    let top = ch.curvature(k - 1);
    let cartan = Expr::int(4) * ch.along(k - 2, top) + Expr::int(3) * ch.along(k - 3, &ch.prime(top));
    assert!(zero(&(&res.beta_equation[k - 2].expr - &cartan)));
}

#[test]
fn beta_equation_at_order_two_with_free_coefficient() {
    let ch = generic(2);
    let frame = ch.problem().frame();
    let bt = Expr::opaque(OpaqueDerivative::new("B", frame.vars()));
    let beta = FrameForm(vec![Expr::zero(), bt.clone()]);
    let res = connection_residuals_on_frame(&ch, &FrameForm::zero(&ch), &beta, &exact());
    let g1 = ch.multiplier().clone();
    let g2 = ch.prime(&g1) + g1.pow(2);
    let b1 = ch.prime(&bt);
    let b2 = ch.prime(&b1);
    let k0 = ch.curvature(0);
    let expected = Expr::rat(3, 2) * (&g2 * &bt + Expr::int(2) * &g1 * &b1 + b2)
        + Expr::rat(3, 2) * k0 * &bt
        + ch.along(0, k0);
    assert!(zero(&(&res.beta_equation[0].expr - expected)));
}

#[test]
fn trace_residual_vanishes_for_compatible_alpha() {
    // α = −(k/2)β' solves 2α' + kβ'' = 0 identically.
    let ch = generic(4);
    let b = beta_coefficient(&ch, &exact()).unwrap();
    let alpha = b.values.prime(&ch).scale(&Expr::rat(-3, 2));
    let res = connection_residuals_on_frame(&ch, &alpha, &b.values, &exact());
    assert!(res.trace.iter().all(|r| r.is_zero()));
}

#[test]
fn nabla_first_row_is_alpha_plus_beta() {
    let ch = generic(3);
    let frame: Frame = ch.problem().frame();
    let a = FrameForm::from_form(&ch, &OneForm::coordinate(&frame, Var::T)).unwrap();
    let b = FrameForm::from_form(&ch, &OneForm::coordinate(&frame, Var::X(0))).unwrap();
    let res = connection_residuals_on_frame(&ch, &a, &b, &exact());
    assert_eq!(res.nabla[0][0], a);
    assert_eq!(res.nabla[0][1], b);
}
