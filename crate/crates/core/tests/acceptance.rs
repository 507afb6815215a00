//! Acceptance suite: one line per criterion, exit status 1 if any fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::finite_difference_ricci;
use jetinv::expr::{
    eval_float, is_zero, parse_expr, sample_rational, Assignment, Expr, Func, ParseContext, Symbol, Var, Verdict,
    ZeroTest,
};
use jetinv::ode::{cartan_residuals, classical, curvature_chain, wunschmann_residuals, CurvatureChain, OdeProblem};
use jetinv::report::{analyze_batch, parse_problems, render, Options};
use jetinv::residual::Residual;
use jetinv::web::corpus::{self, Sample};
use jetinv::web::{
    all_zero, bihamiltonian_jacobi_residual, bryant_forms, canonical_connection, flatness_verdict, hirota_residuals,
    lax_commutator_residuals, null_metric_residuals, printed_weyl_metric, ricci_null_residual, zakharevich_verdict,
    VeroneseWeb,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Exact-rational sampling: 8 trials, tolerance 0.
fn exact() -> ZeroTest {
    ZeroTest {
        trials: 8,
        tolerance: 0.0,
        ..ZeroTest::default()
    }
}

fn zero(e: &Expr) -> bool {
    is_zero(e, &exact()).is_zero()
}

fn generic(order: usize) -> CurvatureChain {
    curvature_chain(&OdeProblem::generic(order).unwrap(), &exact()).unwrap()
}

fn concrete(order: usize, rhs: &str) -> CurvatureChain {
    curvature_chain(&OdeProblem::parse(order, rhs).unwrap(), &exact()).unwrap()
}

fn ints(range: std::ops::Range<i64>) -> Vec<BigRational> {
    range.map(|i| BigRational::from_integer(i.into())).collect()
}

/// `w = Σ f_i(x_i)`: every mixed second partial vanishes.
fn is_separable(s: &Sample) -> bool {
    let n = s.web.k() + 1;
    (0..n).all(|i| (i + 1..n).all(|j| zero(s.web.second(i, j))))
}

/// Largest `|v|/max(1, M)` of the residual expressions over random base points.
fn float_max(web: &VeroneseWeb, residuals: &[Residual], points: usize, seed: u64) -> f64 {
    let vars = web.frame().vars().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max: f64 = 0.0;
    let mut taken = 0;
    while taken < points {
        let a: Assignment = vars.iter().map(|v| (Symbol::Coord(*v), sample_rational(&mut rng, 4))).collect();
        let vals: Option<Vec<(f64, f64)>> = residuals.iter().map(|r| eval_float(&r.expr, &a).ok()).collect();
        let Some(vals) = vals else { continue };
        taken += 1;
        for (v, m) in vals {
            max = max.max(v.abs() / m.max(1.0));
        }
    }
    max
}

fn appendix_reproduction() -> Outcome {
    let mut failures = Vec::new();
    for order in 2..=4 {
        let ch = generic(order);
        for (j, k) in classical::curvatures(order).unwrap().iter().enumerate() {
            if !zero(&(ch.curvature(j) - k)) {
                failures.push(format!("order {order} K{j}"));
            }
        }
    }
    for order in 2..=7 {
        let ch = generic(order);
        if !zero(&(ch.curvature(order - 2) - classical::top_curvature(order))) {
            failures.push(format!("order {order} K{}", order - 2));
        }
        let d = ch.field(1).sub(&classical::first_field(order)).unwrap();
        if d.vanishes(&exact()) != Verdict::Zero {
            failures.push(format!("order {order} V'"));
        }
    }
    if failures.is_empty() {
        outcome(true, "K_i at orders 2-4, K_{k-1} and V' for k = 1..6")
    } else {
        outcome(false, format!("mismatch: {}", failures.join(", ")))
    }
}

fn wunschmann_order_three() -> Outcome {
    let ch = generic(3);
    let lhs = ch.curvature(0) + Expr::rat(1, 2) * ch.prime(ch.curvature(1));
    let diff = lhs - classical::wunschmann_order3();
    let library = &wunschmann_residuals(&ch, &exact())[0].expr;
    let same = zero(&(library - classical::wunschmann_order3()));
    outcome(
        zero(&diff) && same,
        format!(
            "K0 + K1'/2 - W0: {:?}; difference canonicalizes to 0: {}",
            is_zero(&diff, &exact()).verdict,
            diff.is_literal_zero()
        ),
    )
}

fn cartan_identities() -> Outcome {
    let ch = generic(2);
    let k0 = ch.curvature(0);
    let k0p = ch.prime(k0);
    let c2 = classical::cartan_order2();
    let printed2 = Expr::int(4) * ch.along(1, k0) - ch.along(0, &k0p) - &c2;
    let corrected2 = Expr::rat(1, 3) * (Expr::int(4) * ch.along(1, k0) + ch.along(0, &k0p)) - &c2;
    let library2 = zero(&(Expr::rat(1, 3) * &cartan_residuals(&ch, &exact())[0].expr - &c2));

    let ch = generic(3);
    let (k0, k1) = (ch.curvature(0).clone(), ch.curvature(1).clone());
    let c3 = classical::cartan_order3();
    let unconditional = Expr::rat(-3, 2) * (ch.along(1, &k1) - ch.along(0, &k0)) - &c3;
    // 2V'(K1) + V(K1') with K1' = −2K0
    let reduced = Expr::int(2) * ch.along(1, &k1) + ch.along(0, &(Expr::int(-2) * &k0));
    let three_quarters = &reduced + Expr::rat(3, 4) * &c3;
    let four_thirds = &reduced + Expr::rat(4, 3) * &c3;

    let v = |e: &Expr| is_zero(e, &exact()).verdict;
    let stated = [zero(&printed2), zero(&unconditional), zero(&three_quarters)];
    outcome(
        stated.iter().all(|b| *b),
        format!(
            "order 2 (4V'(K0) - V(K0')) - C: {:?}; order 3 -3/2(V'(K1) - V(K0)) - C: {:?}; \
             2V'(K1) + V(K1') + 3/4 C: {:?}; corrected forms: (4V'(K0) + V(K0'))/3 - C: {:?} (library residual: {}), \
             2V'(K1) + V(K1') + 4/3 C: {:?}",
            v(&printed2),
            v(&unconditional),
            v(&three_quarters),
            v(&corrected2),
            if library2 { "zero" } else { "nonzero" },
            v(&four_thirds),
        ),
    )
}

fn flat_corpus() -> Outcome {
    let mut failures = Vec::new();
    let mut check = |order: usize, rhs: &str| {
        let ch = concrete(order, rhs);
        let curv = ch.curvatures().iter().all(zero);
        let w = wunschmann_residuals(&ch, &exact());
        let c = cartan_residuals(&ch, &exact());
        let extraction = ch.extraction_residuals().iter().all(|r| r.is_zero());
        if !(curv && extraction && w.iter().chain(&c).all(|r| r.is_zero())) {
            failures.push(format!("order {order} F = {rhs}"));
        }
    };
    for order in 2..=7 {
        check(order, "0");
    }
    check(3, "3*x2^2/(2*x1)");
    if failures.is_empty() {
        outcome(true, "F = 0 at orders 2-7 and F = 3x2^2/(2x1) at order 3: all K_i and residuals zero")
    } else {
        outcome(false, format!("nonzero: {}", failures.join(", ")))
    }
}

fn hirota_lax() -> Outcome {
    let test = exact();
    let mut samples = corpus::random_polynomials(&[2, 3, 4], 20, 2024, &test).unwrap();
    samples.extend(corpus::mixed(&[2, 3, 4], 2, 0, 2025, &test).unwrap());
    let (mut disagreements, mut separable_failures, mut passing) = (0, 0, 0);
    let mut worst: f64 = 0.0;
    for s in &samples {
        let h = hirota_residuals(&s.web, &test);
        let lax = lax_commutator_residuals(&s.web, &test);
        let hv: Vec<Verdict> = lax.keys().map(|(i, j)| h[&(0, *i, *j)].verdict()).collect();
        let lv: Vec<Verdict> = lax.values().map(|p| p.verdict()).collect();
        let commute = lv.iter().all(|v| *v == Verdict::Zero);
        if hv != lv || commute != all_zero(h.values()) {
            disagreements += 1;
        }
        if is_separable(s) && !commute {
            separable_failures += 1;
        }
        if commute {
            passing += 1;
            let j = bihamiltonian_jacobi_residual(&s.web, &ints(5..10), 10, 17, &test);
            if j.pencil != Verdict::Zero {
                worst = f64::INFINITY;
            }
            worst = worst.max(j.max_residual);
        }
    }
    outcome(
        disagreements == 0 && separable_failures == 0 && worst < 1e-8,
        format!(
            "{} webs ({} random); verdict disagreements: {disagreements}; separable failures: {separable_failures}; \
             max Schouten residual over {passing} passing webs: {worst:.2e}",
            samples.len(),
            20
        ),
    )
}

fn weyl_k2() -> Outcome {
    let test = exact();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let samples: Vec<Sample> = corpus::mixed(&[2], 4, 4, 2026, &test)
        .unwrap()
        .into_iter()
        .filter(|s| all_zero(hirota_residuals(&s.web, &test).values()))
        .collect();
    let (mut compat, mut null, mut printed_null_fails) = (true, true, 0);
    let (mut ricci, mut fd): (f64, f64) = (0.0, 0.0);
    for s in &samples {
        let conn = canonical_connection(&s.web, &test).unwrap();
        let weyl = conn.weyl.as_ref().unwrap();
        compat &= all_zero(&weyl.compatibility);
        let ts = s.web.sample_parameters(&mut rng, 5, 4);
        null &= all_zero(&null_metric_residuals(&s.web, &weyl.metric, &ts, &test));
        if null_metric_residuals(&s.web, &printed_weyl_metric(&s.web), &ts, &test)
            .iter()
            .any(|r| r.verdict() == Verdict::NonZero)
        {
            printed_null_fails += 1;
        }
        ricci = ricci.max(ricci_null_residual(&s.web, &conn, &ts, 4, 7).max_residual);
        for t in &ts {
            let point: Vec<f64> = (0..3).map(|_| rng.gen_range(0.2..0.9)).collect();
            fd = fd.max(finite_difference_ricci(&s.web, &conn.christoffels, &point, t).abs());
        }
    }
    let separable = samples.iter().filter(|s| is_separable(s)).count();
    outcome(
        separable > 0 && compat && null && ricci < 1e-7 && fd < 1e-7,
        format!(
            "{} Hirota solutions ({separable} separable); nabla g = phi g: {}; g(V,V) at 5 samples: {}; \
             Ric(V,V) max {ricci:.2e}, finite-difference oracle max {fd:.2e}; printed metric not null on {printed_null_fails}/{}",
            samples.len(),
            if compat { "zero" } else { "nonzero" },
            if null { "zero" } else { "nonzero" },
            samples.len(),
        ),
    )
}

fn flatness_and_bryant() -> Outcome {
    let test = exact();
    let samples = corpus::mixed(&[3, 4], 3, 2, 2027, &test).unwrap();
    let mut mismatches = Vec::new();
    let mut beta_mismatches = Vec::new();
    let mut non_flat_torsion_free = 0;
    let mut worst_torsion: f64 = 0.0;
    for s in &samples {
        let flat = flatness_verdict(&s.web, &test).map(|f| f.flat).unwrap_or(false);
        if flat != is_separable(s) {
            mismatches.push(s.label.clone());
        }
        if s.web.k() != 3 || !all_zero(hirota_residuals(&s.web, &test).values()) {
            continue;
        }
        let b = bryant_forms(&s.web, &test).unwrap();
        let vanishes = b.beta_vanishes(&test);
        if vanishes != is_separable(s) {
            beta_mismatches.push(s.label.clone());
        }
        let torsion = float_max(&s.web, &b.torsion, 10, 3);
        worst_torsion = worst_torsion.max(torsion);
        if !is_separable(s) && !vanishes && all_zero(&b.torsion) && torsion < 1e-8 {
            non_flat_torsion_free += 1;
        }
    }
    outcome(
        mismatches.is_empty() && beta_mismatches.is_empty() && non_flat_torsion_free > 0,
        format!(
            "{} webs; flatness != separable: {:?}; beta zero != separable: {:?}; \
             non-flat k=3 webs with torsion-free Bryant connection and beta != 0: {non_flat_torsion_free}; \
             max Bryant torsion {worst_torsion:.2e}",
            samples.len(),
            mismatches,
            beta_mismatches
        ),
    )
}

fn zakharevich() -> Outcome {
    let test = exact();
    let mut samples = corpus::random_polynomials(&[2, 3, 4], 20, 2024, &test).unwrap();
    samples.extend(corpus::mixed(&[2, 3, 4], 2, 0, 2025, &test).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut disagreements = Vec::new();
    let mut solutions = 0;
    for s in &samples {
        let values = s.web.sample_parameters(&mut rng, s.web.k() + 3, 5);
        let z = zakharevich_verdict(&s.web, &values, &test).unwrap();
        let h = all_zero(hirota_residuals(&s.web, &test).values());
        solutions += h as usize;
        if z.holds != h {
            disagreements.push(s.label.clone());
        }
    }
    outcome(
        disagreements.is_empty(),
        format!("{} webs ({solutions} solutions); disagreements: {:?}", samples.len(), disagreements),
    )
}

/// Random expression over `t, x0, x1, x2` with bounded function arguments.
fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    let vars = [Var::T, Var::X(0), Var::X(1), Var::X(2)];
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..3) {
            0 => Expr::int(rng.gen_range(-6..=6)),
            1 => Expr::rat(rng.gen_range(-6..=6), rng.gen_range(1..=5)),
            _ => Expr::var(vars[rng.gen_range(0..vars.len())]),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..7) {
        0 => Expr::add_all([random_expr(rng, d), random_expr(rng, d), random_expr(rng, d)]),
        1 => Expr::mul_all([random_expr(rng, d), random_expr(rng, d)]),
        2 => random_expr(rng, d) / (random_expr(rng, d).pow(2) + Expr::int(1)),
        3 => {
            let n = rng.gen_range(-2..=3);
            random_expr(rng, d).pow(n)
        }
        4 => -random_expr(rng, d),
        5 => {
            let f = [Func::Exp, Func::Sin, Func::Cos, Func::Log, Func::Sqrt][rng.gen_range(0..5)];
            Expr::apply(f, random_expr(rng, d).pow(2) + Expr::int(1))
        }
        _ => random_expr(rng, d) - random_expr(rng, d),
    }
}

fn determinism_and_round_trip() -> Outcome {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../cli/tests/fixtures");
    let input = std::fs::read_to_string(dir.join("small.json")).unwrap();
    let golden = std::fs::read_to_string(dir.join("small.golden.json")).unwrap();
    let problems = parse_problems(&input).unwrap();
    let options = Options {
        seed: Some(7),
        ..Options::default()
    };
    let first = render(&analyze_batch(&problems, &options));
    let second = render(&analyze_batch(&problems, &options));
    let stable = first == second;
    let matches_golden = first == golden;

    let ctx = ParseContext::new(&[Var::T, Var::X(0), Var::X(1), Var::X(2)]);
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut failures = 0;
    for _ in 0..100 {
        let e = random_expr(&mut rng, 4);
        let once = parse_expr(&e.to_string(), &ctx).unwrap();
        let twice = parse_expr(&once.to_string(), &ctx).unwrap();
        if once != twice || once != e {
            failures += 1;
        }
    }
    outcome(
        stable && matches_golden && failures == 0,
        format!(
            "report stable across runs: {stable}; matches golden file: {matches_golden}; \
             round-trip failures: {failures}/100"
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("closed-form curvatures and first field", appendix_reproduction),
        ("Wunschmann identity, order 3", wunschmann_order_three),
        ("Cartan identities, orders 2 and 3", cartan_identities),
        ("flat corpus", flat_corpus),
        ("Hirota and Lax verdicts agree", hirota_lax),
        ("Einstein-Weyl structure, k = 2", weyl_k2),
        ("flatness, separability and Bryant forms", flatness_and_bryant),
        ("Zakharevich sampling agrees with Hirota", zakharevich),
        ("determinism and round trip", determinism_and_round_trip),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !result.pass {
            failed += 1;
        }
        println!(
            "[{}] {}. {name}: {} ({:.1}s)",
            if result.pass { "PASS" } else { "FAIL" },
            n + 1,
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
