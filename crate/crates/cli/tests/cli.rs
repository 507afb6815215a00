use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_analyze")).args(args).output().unwrap()
}

fn report(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn matches_golden_report() {
    let path = fixture("small.json");
    let got = report(&[path.to_str().unwrap(), "--seed", "7"]);
    let golden = std::fs::read_to_string(fixture("small.golden.json")).unwrap();
    assert!(got == golden, "report differs from tests/fixtures/small.golden.json");
}

#[test]
fn reports_are_byte_stable() {
    let path = fixture("small.json");
    let a = report(&[path.to_str().unwrap(), "--seed", "3"]);
    let b = report(&[path.to_str().unwrap(), "--seed", "3"]);
    assert_eq!(a, b);
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let path = fixture("small.json");
    let stdout = report(&[path.to_str().unwrap()]);
    let out = run(&[path.to_str().unwrap(), "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&target).unwrap(), stdout);
}

#[test]
fn report_structure_and_option_precedence() {
    let path = fixture("small.json");
    let doc: serde_json::Value =
        serde_json::from_str(&report(&[path.to_str().unwrap(), "--seed", "11", "--trials", "5"])).unwrap();
    let reports = doc["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 7);
    assert_eq!(reports[0]["classification"], "totally-geodesic paraconformal");
    assert_eq!(reports[2]["classification"], "totally-geodesic paraconformal");
    assert_eq!(reports[4]["classification"], "solution, flat");
    assert_eq!(reports[5]["classification"], "not a solution");
    assert_eq!(reports[6]["classification"], "solution, flat");
    // The problem's own seed wins over the flag; unset fields take the flag.
    assert_eq!(reports[0]["problem"]["options"]["seed"], 11);
    assert_eq!(reports[5]["problem"]["options"]["seed"], 4);
    assert_eq!(reports[5]["problem"]["options"]["trials"], 5);
    // A non-solution gets no connection data.
    assert!(reports[5]["derived"].get("christoffels").is_none());
    assert_eq!(reports[5]["derived"]["zakharevich"]["holds"], false);
    let flat = &reports[4]["derived"];
    assert!(flat.get("metric").is_some() && flat.get("weyl_form").is_some());
    for r in reports[3]["residuals"].as_array().unwrap() {
        if r["name"].as_str().unwrap().starts_with("identity") {
            assert_eq!(r["verdict"], "zero", "{}", r["name"]);
        }
    }
}

#[test]
fn expressions_in_reports_parse_back() {
    let path = fixture("small.json");
    let doc: serde_json::Value = serde_json::from_str(&report(&[path.to_str().unwrap()])).unwrap();
    let ctx = jetinv::web::VeroneseWeb::parse_context(3);
    for r in doc["reports"][6]["residuals"].as_array().unwrap() {
        let text = r["expression"].as_str().unwrap();
        let e = jetinv::expr::parse_expr(text, &ctx).unwrap();
        assert_eq!(e.to_string(), text);
    }
}

#[test]
fn input_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    };
    let cases = [
        write("syntax.json", "{ not json"),
        write("shape.json", r#"{"problems": [{"kind": "ode", "order": "three"}]}"#),
        write("parse.json", r#"[{"kind": "ode", "order": 3, "rhs": "x1 +* 2"}]"#),
        write("degenerate.json", r#"[{"kind": "web", "k": 3, "w": "x0*x1", "t_params": ["0","1","2","3","4"]}]"#),
        write("repeated.json", r#"[{"kind": "web", "k": 2, "w": "x0+x1+x2", "t_params": ["0","1","1","3"]}]"#),
    ];
    for p in &cases {
        let out = run(&[p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1), "{}", p.display());
    }
    let out = run(&[dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn failed_entries_do_not_stop_the_batch() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("mixed.json");
    std::fs::write(
        &p,
        r#"[{"kind": "ode", "order": 3, "rhs": "x1 +* 2"}, {"kind": "ode", "order": 3, "rhs": "0"}]"#,
    )
    .unwrap();
    let out = run(&[p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["reports"][0]["error"]["kind"], "input");
    assert_eq!(doc["reports"][1]["classification"], "totally-geodesic paraconformal");
}
