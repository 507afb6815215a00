//! JSON problem specs and reports.
//!
//! Reports are assembled as `serde_json::Value` trees, whose object maps
//! keep keys sorted, so equal inputs give byte-identical output.

use std::str::FromStr;

use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::expr::{Expr, Verdict, ZeroTest};
use crate::ode::{
    beta_coefficient, cartan_residuals, classical, classify, curvature_chain, wunschmann_residuals, OdeProblem,
};
use crate::residual::Residual;
use crate::web::{
    all_zero, bihamiltonian_jacobi_residual, bryant_forms, canonical_connection, eq1_residuals, flatness_verdict,
    hirota_residuals, lax_commutator_residuals, null_metric_residuals, ricci_null_residual, torsion,
    zakharevich_verdict, VeroneseWeb,
};

/// Numerical knobs; unset fields fall back to the next source.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Options {
    /// `self` over `fallback` over the defaults.
    pub fn resolve(&self, fallback: &Options) -> ZeroTest {
        let d = ZeroTest::default();
        ZeroTest {
            trials: self.trials.or(fallback.trials).unwrap_or(d.trials),
            tolerance: self.tolerance.or(fallback.tolerance).unwrap_or(d.tolerance),
            seed: self.seed.or(fallback.seed).unwrap_or(d.seed),
            bits: d.bits,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProblemSpec {
    Ode {
        order: usize,
        /// Right-hand side, or `"abstract"` for a generic `F`.
        rhs: String,
        #[serde(default)]
        options: Options,
    },
    Web {
        k: usize,
        w: String,
        t_params: Vec<String>,
        #[serde(default)]
        options: Options,
    },
}

impl ProblemSpec {
    pub fn options(&self) -> &Options {
        match self {
            ProblemSpec::Ode { options, .. } | ProblemSpec::Web { options, .. } => options,
        }
    }

    fn with_options(&self, test: &ZeroTest) -> ProblemSpec {
        let resolved = Options {
            trials: Some(test.trials),
            tolerance: Some(test.tolerance),
            seed: Some(test.seed),
        };
        let mut out = self.clone();
        match &mut out {
            ProblemSpec::Ode { options, .. } | ProblemSpec::Web { options, .. } => *options = resolved,
        }
        out
    }
}

/// Input document: `{"problems": [...]}`, a bare array, or one problem.
pub fn parse_problems(text: &str) -> Result<Vec<ProblemSpec>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Input {
        Batch { problems: Vec<ProblemSpec> },
        List(Vec<ProblemSpec>),
        Single(ProblemSpec),
    }
    match serde_json::from_str::<Input>(text) {
        Ok(Input::Batch { problems }) | Ok(Input::List(problems)) => Ok(problems),
        Ok(Input::Single(p)) => Ok(vec![p]),
        Err(e) => {
            // Untagged errors are uninformative; retry the batch form for a located message.
            #[derive(Deserialize)]
            #[allow(dead_code)]
            struct Batch {
                problems: Vec<ProblemSpec>,
            }
            let detail = serde_json::from_str::<Batch>(text).err().map(|e| e.to_string()).unwrap_or_else(|| e.to_string());
            Err(Error::Input(detail))
        }
    }
}

fn residual_json(r: &Residual) -> Value {
    let mut m = Map::new();
    m.insert("name".into(), json!(r.name));
    m.insert("formula".into(), json!(r.formula));
    m.insert("expression".into(), json!(r.expr.to_string()));
    m.insert("verdict".into(), json!(r.verdict()));
    m.insert("samples".into(), json!(r.check.samples));
    if let Some(note) = &r.note {
        m.insert("note".into(), json!(note));
    }
    Value::Object(m)
}

fn exprs(es: &[Expr]) -> Value {
    Value::Array(es.iter().map(|e| json!(e.to_string())).collect())
}

fn rationals(qs: &[BigRational]) -> Value {
    Value::Array(qs.iter().map(|q| json!(q.to_string())).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub problem: ProblemSpec,
    pub classification: String,
    pub residuals: Vec<Value>,
    pub derived: Map<String, Value>,
}

impl Report {
    pub fn to_json(&self) -> Value {
        json!({
            "problem": self.problem,
            "classification": self.classification,
            "residuals": self.residuals,
            "derived": self.derived,
        })
    }

    /// One line per nonzero or indeterminate residual, after a headline.
    pub fn summary(&self) -> String {
        let mut out = match &self.problem {
            ProblemSpec::Ode { order, rhs, .. } => format!("ode order {order}, x^({order}) = {rhs}: {}", self.classification),
            ProblemSpec::Web { k, w, .. } => format!("web k={k}, w = {w}: {}", self.classification),
        };
        let zero = json!(Verdict::Zero);
        let open: Vec<&Value> = self.residuals.iter().filter(|r| r["verdict"] != zero).collect();
        out.push_str(&format!("\n  {} residuals, {} not zero", self.residuals.len(), open.len()));
        for r in open {
            out.push_str(&format!("\n    {}: {}", r["name"].as_str().unwrap_or(""), r["verdict"].as_str().unwrap_or("")));
        }
        out
    }
}

pub fn analyze(spec: &ProblemSpec, fallback: &Options) -> Result<Report> {
    let test = spec.options().resolve(fallback);
    match spec {
        ProblemSpec::Ode { order, rhs, .. } => analyze_ode(spec, *order, rhs, &test),
        ProblemSpec::Web { k, w, t_params, .. } => analyze_web(spec, *k, w, t_params, &test),
    }
}

fn analyze_ode(spec: &ProblemSpec, order: usize, rhs: &str, test: &ZeroTest) -> Result<Report> {
    let problem = if rhs.trim() == "abstract" {
        OdeProblem::generic(order)?
    } else {
        OdeProblem::parse(order, rhs)?
    };
    let chain = curvature_chain(&problem, test)?;
    let wunschmann = wunschmann_residuals(&chain, test);
    let cartan = cartan_residuals(&chain, test);
    let classification = classify(order, &wunschmann, &cartan);

    let mut residuals: Vec<&Residual> = chain.extraction_residuals().iter().collect();
    residuals.extend(&wunschmann);
    residuals.extend(&cartan);
    let identities = if problem.is_abstract() { identity_checks(&chain, test) } else { Vec::new() };
    residuals.extend(&identities);

    let mut derived = Map::new();
    derived.insert("curvatures".into(), exprs(chain.curvatures()));
    derived.insert("multiplier".into(), json!(chain.multiplier().to_string()));
    if order >= 4 {
        let b = beta_coefficient(&chain, test)?;
        derived.insert("beta".into(), json!(b.b.to_string()));
        derived.insert("beta_form".into(), exprs(b.form.components()));
    }
    Ok(Report {
        problem: spec.with_options(test),
        classification: classification.label().to_string(),
        residuals: residuals.into_iter().map(residual_json).collect(),
        derived,
    })
}

/// Chain quantities against closed coordinate forms, for abstract `F`.
fn identity_checks(chain: &crate::ode::CurvatureChain, test: &ZeroTest) -> Vec<Residual> {
    let order = chain.problem().order();
    let mut out = Vec::new();
    if let Some(ks) = classical::curvatures(order) {
        for (j, k) in ks.iter().enumerate() {
            out.push(Residual::new(
                format!("identity K{j}"),
                format!("K{j} minus its closed form"),
                chain.curvature(j) - k,
                test,
            ));
        }
    }
    match order {
        2 => {
            let c = &cartan_residuals(chain, test)[0].expr;
            out.push(Residual::new(
                "identity C",
                "(4V'(K0) + V(K0'))/3 minus the coordinate C",
                Expr::rat(1, 3) * c - classical::cartan_order2(),
                test,
            ));
        }
        3 => {
            let w = &wunschmann_residuals(chain, test)[0].expr;
            out.push(Residual::new(
                "identity W0",
                "K0 + K1'/2 minus the coordinate W0",
                w - classical::wunschmann_order3(),
                test,
            ));
            let (k0, k1) = (chain.curvature(0), chain.curvature(1));
            out.push(Residual::new(
                "identity C",
                "-3/2 (V'(K1) - V(K0)) minus the coordinate C",
                Expr::rat(-3, 2) * (chain.along(1, k1) - chain.along(0, k0)) - classical::cartan_order3(),
                test,
            ));
        }
        _ => {}
    }
    out
}

fn parse_parameters(t_params: &[String]) -> Result<Vec<BigRational>> {
    t_params
        .iter()
        .map(|s| BigRational::from_str(s.trim()).map_err(|_| Error::Input(format!("not a rational: {s:?}"))))
        .collect()
}

fn analyze_web(spec: &ProblemSpec, k: usize, w: &str, t_params: &[String], test: &ZeroTest) -> Result<Report> {
    let t = parse_parameters(t_params)?;
    let web = VeroneseWeb::parse(k, w, t, test)?;
    let mut rng = ChaCha8Rng::seed_from_u64(test.seed);
    let mut residuals: Vec<Residual> = Vec::new();
    let mut derived = Map::new();
    derived.insert("t_params".into(), rationals(web.parameters()));

    let hirota = hirota_residuals(&web, test);
    let solution = all_zero(hirota.values());
    residuals.extend(hirota.into_values());
    let lax = lax_commutator_residuals(&web, test);
    derived.insert(
        "lax".into(),
        Value::Object(lax.iter().map(|((i, j), p)| (format!("L{i}L{j}"), json!(p.verdict()))).collect()),
    );
    for pair in lax.into_values() {
        residuals.extend(pair.components);
    }
    residuals.extend(eq1_residuals(&web, test).into_values());

    let values = web.sample_parameters(&mut rng, k + 3, 5);
    let z = zakharevich_verdict(&web, &values, test)?;
    derived.insert("zakharevich".into(), json!({ "holds": z.holds, "values": rationals(&z.values) }));

    let classification = if !solution {
        "not a solution".to_string()
    } else {
        web_details(&web, test, &mut rng, &mut residuals, &mut derived)?
    };
    Ok(Report {
        problem: spec.with_options(test),
        classification,
        residuals: residuals.iter().map(residual_json).collect(),
        derived,
    })
}

/// Connection data for a web with vanishing Hirota residuals; returns the
/// classification.
fn web_details(
    web: &VeroneseWeb,
    test: &ZeroTest,
    rng: &mut ChaCha8Rng,
    residuals: &mut Vec<Residual>,
    derived: &mut Map<String, Value>,
) -> Result<String> {
    let k = web.k();
    let conn = canonical_connection(web, test)?;
    residuals.extend(conn.checks.iter().cloned());
    let tors = torsion(&conn, test);
    derived.insert("torsion_free".into(), json!(all_zero(&tors)));
    residuals.extend(tors);

    let n = k + 1;
    let mut gamma = Map::new();
    for j in 0..n {
        for i in 0..n {
            for m in 0..n {
                let g = conn.christoffels.get(j, i, m);
                if !g.is_literal_zero() {
                    gamma.insert(format!("{j}{i}{m}"), json!(g.to_string()));
                }
            }
        }
    }
    derived.insert("christoffels".into(), Value::Object(gamma));
    derived.insert("alpha".into(), exprs(conn.alpha.components()));
    if let Some(weyl) = &conn.weyl {
        derived.insert("f".into(), json!(weyl.f.to_string()));
        derived.insert("alpha_tilde".into(), exprs(weyl.alpha_tilde.components()));
        derived.insert(
            "metric".into(),
            Value::Array(weyl.metric.iter().map(|row| exprs(row)).collect()),
        );
        derived.insert("weyl_form".into(), exprs(weyl.weyl_form.components()));
        residuals.extend(weyl.compatibility.iter().cloned());
        let samples = web.sample_parameters(rng, 5, 5);
        residuals.extend(null_metric_residuals(web, &weyl.metric, &samples, test));
    }
    if k >= 2 {
        let samples = web.sample_parameters(rng, 2 * k + 1, 4);
        let ric = ricci_null_residual(web, &conn, &samples, 4, test.seed);
        derived.insert(
            "ricci_null".into(),
            json!({ "max_residual": ric.max_residual, "samples": ric.samples, "t": rationals(&samples) }),
        );
    }
    let t_samples = web.sample_parameters(rng, 5, 4);
    let jac = bihamiltonian_jacobi_residual(web, &t_samples, 10, test.seed, test);
    derived.insert(
        "jacobi".into(),
        json!({ "max_residual": jac.max_residual, "samples": jac.samples, "pencil": jac.pencil }),
    );
    if k == 3 {
        let b = bryant_forms(web, test)?;
        derived.insert(
            "bryant".into(),
            json!({
                "beta": b.beta.iter().map(|c| exprs(c)).collect::<Vec<_>>(),
                "alpha": exprs(&b.alpha),
                "torsion_free": all_zero(&b.torsion),
            }),
        );
        residuals.extend(b.torsion);
    }
    Ok(match flatness_verdict(web, test) {
        Ok(f) => {
            derived.insert("flat".into(), json!(f.flat));
            // For k > 2 these are the torsion residuals already listed.
            if k == 2 {
                residuals.extend(f.residuals);
            }
            if f.flat { "solution, flat" } else { "solution, non-flat" }.to_string()
        }
        Err(Error::Unsupported(_)) => "solution".to_string(),
        Err(e) => return Err(e),
    })
}

/// Outcome of one batch entry.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Report(Report),
    Failed { problem: ProblemSpec, error: Error },
}

impl Outcome {
    pub fn to_json(&self) -> Value {
        match self {
            Outcome::Report(r) => r.to_json(),
            Outcome::Failed { problem, error } => json!({
                "problem": problem,
                "error": { "kind": error_kind(error), "message": error.to_string() },
            }),
        }
    }

    pub fn summary(&self) -> String {
        match self {
            Outcome::Report(r) => r.summary(),
            Outcome::Failed { error, .. } => format!("error ({}): {error}", error_kind(error)),
        }
    }
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::ExtractionFailure(_) | Error::Inconsistent(_) | Error::Singular | Error::FrameMismatch => "internal",
        _ => "input",
    }
}

/// Analyzes every problem, in parallel, keeping input order.
pub fn analyze_batch(problems: &[ProblemSpec], fallback: &Options) -> Vec<Outcome> {
    problems
        .par_iter()
        .map(|p| match analyze(p, fallback) {
            Ok(r) => Outcome::Report(r),
            Err(error) => Outcome::Failed {
                problem: p.clone(),
                error,
            },
        })
        .collect()
}

/// `{"reports": [...]}`, pretty-printed with a trailing newline.
pub fn render(outcomes: &[Outcome]) -> String {
    let doc = json!({ "reports": outcomes.iter().map(Outcome::to_json).collect::<Vec<_>>() });
    let mut s = serde_json::to_string_pretty(&doc).expect("values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ode(order: usize, rhs: &str) -> ProblemSpec {
        ProblemSpec::Ode {
            order,
            rhs: rhs.into(),
            options: Options::default(),
        }
    }

    #[test]
    fn option_precedence() {
        let problem = Options {
            trials: Some(3),
            ..Options::default()
        };
        let cli = Options {
            trials: Some(5),
            seed: Some(9),
            ..Options::default()
        };
        let t = problem.resolve(&cli);
        assert_eq!((t.trials, t.seed, t.tolerance), (3, 9, ZeroTest::default().tolerance));
    }

    #[test]
    fn input_forms() {
        let one = r#"{"kind": "ode", "order": 3, "rhs": "0"}"#;
        assert_eq!(parse_problems(one).unwrap(), vec![ode(3, "0")]);
        assert_eq!(parse_problems(&format!("[{one}]")).unwrap().len(), 1);
        assert_eq!(parse_problems(&format!(r#"{{"problems": [{one}, {one}]}}"#)).unwrap().len(), 2);
        assert!(matches!(parse_problems(r#"{"kind": "ode"}"#), Err(Error::Input(_))));
    }

    #[test]
    fn flat_ode_report() {
        let r = analyze(&ode(3, "0"), &Options::default()).unwrap();
        assert_eq!(r.classification, "totally-geodesic paraconformal");
        assert!(r.residuals.iter().all(|v| v["verdict"] == "zero"));
    }

    #[test]
    fn abstract_order_three_identities() {
        let r = analyze(&ode(3, "abstract"), &Options::default()).unwrap();
        for name in ["identity W0", "identity C"] {
            let v = r.residuals.iter().find(|v| v["name"] == name).unwrap();
            assert_eq!(v["verdict"], "zero", "{name}");
        }
    }

    #[test]
    fn parse_error_is_input_error() {
        let e = analyze(&ode(3, "x1 +* 2"), &Options::default()).unwrap_err();
        assert_eq!(error_kind(&e), "input");
    }
}
