use std::path::Path;
use std::process::{Command, Output};

use jobmatch::cli::{run, EXIT_INPUT_ERROR, EXIT_OK, EXIT_PROPERTY_FAILURE};
use jobmatch::model::file;
use serde_json::Value;

fn jobmatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jobmatch"))
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON report")
}

const EX1: &str = "tests/fixtures/example1.json";
const EX2: &str = "tests/fixtures/example2.json";
const EX3: &str = "tests/fixtures/example3.json";
const LOW: &str = "tests/fixtures/example3_low.json";
const HIGH: &str = "tests/fixtures/example3_high.json";

#[test]
fn golden_reports_match_byte_for_byte() {
    let cases: [(&str, Vec<&str>); 8] = [
        ("example1_vcg.json", vec!["--json", "vcg", EX1]),
        ("example1_necessity.json", vec!["--json", "necessity", EX1]),
        ("example2_classify.json", vec!["--json", "classify", EX2]),
        ("example3_classify.json", vec!["--json", "classify", EX3]),
        ("example3_low_vcg.json", vec!["--json", "vcg", EX3, "--profile", LOW]),
        ("example3_low_stability.json", vec!["--json", "stability", EX3, "--profile", LOW]),
        ("example3_high_vcg.json", vec!["--json", "vcg", EX3, "--profile", HIGH]),
        ("example3_high_stability.json", vec!["--json", "stability", EX3, "--profile", HIGH]),
    ];
    for (name, args) in cases {
        let first = jobmatch(&args);
        assert_eq!(first.status.code(), Some(EXIT_OK), "{name}");
        assert_eq!(stdout(&first), golden(name), "{name} drifted from its golden file");
        assert_eq!(first.stdout, jobmatch(&args).stdout, "{name} is not deterministic");
    }
}

#[test]
fn vcg_report_fields() {
    let v = json(&jobmatch(&["--json", "vcg", EX1]));
    assert_eq!(v["results"]["salaries"]["w1"], "6");
    assert_eq!(v["results"]["salaries"]["w2"], "7");
    assert_eq!(v["results"]["firm_payoffs"]["f"], "-3");
    assert_eq!(v["results"]["ir"]["holds"], false);
    assert_eq!(v["results"]["ir"]["witness"]["deficit"], "-3");

    let v = json(&jobmatch(&["--json", "vcg", EX3, "--profile", LOW]));
    assert_eq!(v["results"]["payoff_point"], "(1/2, 0; 3/4, 3/4, 3/2)");
    assert_eq!(v["results"]["ir"]["holds"], true);
    assert_eq!(v["results"]["sir"]["holds"], true);
}

#[test]
fn stability_report_fields() {
    let v = json(&jobmatch(&["--json", "stability", EX3, "--profile", HIGH]));
    assert_eq!(v["results"]["stable"], false);
    assert_eq!(v["results"]["weakly_stable"], true);
    assert_eq!(v["results"]["block"]["firm"], "f1");
    assert_eq!(v["results"]["block"]["coalition"], serde_json::json!(["w3"]));
    let v = json(&jobmatch(&["--json", "stability", EX3, "--profile", LOW]));
    assert_eq!(v["results"]["stable"], true);
}

#[test]
fn classify_verdicts() {
    let v = json(&jobmatch(&["--json", "classify", EX2]));
    let f = &v["results"]["firms"]["f"];
    assert_eq!(f["weak_substitutes"]["holds"], true);
    assert_eq!(f["submodular"]["holds"], false);
    assert_eq!(f["gross_substitutes"]["holds"], false);
    let v = json(&jobmatch(&["--json", "classify", EX3]));
    assert_eq!(v["results"]["firms"]["f1"]["submodular"]["holds"], true);
    assert_eq!(v["results"]["firms"]["f1"]["gross_substitutes"]["holds"], false);
    assert_eq!(v["results"]["firms"]["f2"]["gross_substitutes"]["holds"], true);
}

#[test]
fn necessity_reports() {
    let v = json(&jobmatch(&["--json", "necessity", EX1, "--firm", "f"]));
    let ir = &v["results"]["firms"]["f"]["ir_violation"];
    assert_eq!(ir["firm_payoff"], "-10");
    assert_eq!(ir["profile"]["w1"]["f"], "0");
    let v = json(&jobmatch(&["--json", "necessity", EX3, "--firm", "f1"]));
    let f1 = &v["results"]["firms"]["f1"];
    assert!(f1["ir_violation"].as_str().unwrap().contains("no IR construction"));
    assert!(f1["sir_violation"].as_str().unwrap().contains("no SIR construction"));

    let o = jobmatch(&["necessity", EX1, "--firm", "nobody"]);
    assert_eq!(o.status.code(), Some(EXIT_INPUT_ERROR));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown firm"));
}

#[test]
fn prohibitive_profile_leaves_everyone_unmatched() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("ubar.json");
    std::fs::write(
        &p,
        r#"{ "disutilities": { "w1": { "f1": "2", "f2": "2" }, "w2": { "f1": "2", "f2": "2" }, "w3": { "f1": "2", "f2": "2" } } }"#,
    )
    .unwrap();
    let v = json(&jobmatch(&["--json", "vcg", EX3, "--profile", p.to_str().unwrap()]));
    assert_eq!(v["results"]["matching"]["unmatched"], serde_json::json!(["w1", "w2", "w3"]));
    assert_eq!(v["results"]["payoff_point"], "(0, 0; 0, 0, 0)");
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"workers\": [\"w1\",\n}").unwrap();
    let o = jobmatch(&["classify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(EXIT_INPUT_ERROR));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    assert_eq!(jobmatch(&["vcg", EX3]).status.code(), Some(EXIT_INPUT_ERROR));
    assert_eq!(jobmatch(&["vcg", "no/such/file.json"]).status.code(), Some(EXIT_INPUT_ERROR));
    assert_eq!(jobmatch(&["frobnicate"]).status.code(), Some(EXIT_INPUT_ERROR));
    assert_eq!(jobmatch(&["selftest", "--grid", "0"]).status.code(), Some(EXIT_INPUT_ERROR));

    let neg = dir.path().join("neg.json");
    std::fs::write(&neg, r#"{ "disutilities": { "w1": { "f": "-1" }, "w2": { "f": "0" } } }"#).unwrap();
    let o = jobmatch(&["vcg", EX1, "--profile", neg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(EXIT_INPUT_ERROR));
}

#[test]
fn selftest_exit_codes() {
    let o = jobmatch(&["--json", "selftest", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    assert_eq!(json(&o)["results"]["passed"], true);

    let o = jobmatch(&["selftest", "--trials", "8", "--seed", "42", "--grid", "2"]);
    assert_eq!(o.status.code(), Some(EXIT_OK), "{}", stdout(&o));

    let o = jobmatch(&["--json", "selftest", "--trials", "8", "--seed", "42", "--grid", "2", "--inject-fault"]);
    assert_eq!(o.status.code(), Some(EXIT_PROPERTY_FAILURE));
    let v = json(&o);
    assert_eq!(v["results"]["passed"], false);
}

#[test]
fn gen_is_deterministic_and_feeds_other_commands() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gen", "--kind", "budget-additive", "--workers", "4", "--firms", "2", "--seed", "3"];
    let a = jobmatch(&args);
    assert_eq!(a.status.code(), Some(EXIT_OK));
    assert_eq!(a.stdout, jobmatch(&args).stdout);
    let m = file::read_market(&stdout(&a)).unwrap();
    assert_eq!((m.n(), m.m()), (4, 2));

    let p = dir.path().join("gen.json");
    std::fs::write(&p, &a.stdout).unwrap();
    for cmd in ["classify", "solve", "vcg", "stability", "necessity"] {
        let o = jobmatch(&[cmd, p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(EXIT_OK), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let mixed = jobmatch(&["gen", "--workers", "5", "--firms", "3", "--seed", "11"]);
    assert!(file::read_market(&stdout(&mixed)).is_ok());
}

#[test]
fn vcg_grid_checks_every_worker() {
    let v = json(&jobmatch(&["--json", "vcg", EX1, "--grid", "10"]));
    let sp = &v["results"]["strategy_proofness"];
    assert_eq!(sp["w1"]["holds"], true);
    assert_eq!(sp["w2"]["holds"], true);
}

#[test]
fn text_and_json_modes_agree_in_process() {
    let text = run(["jobmatch", "solve", EX1]);
    let json_out = run(["jobmatch", "--json", "solve", EX1]);
    // in-process runs resolve paths against the test's working directory
    assert_eq!(text.code, json_out.code);
    if text.code == EXIT_OK {
        assert!(text.stdout.contains("surplus: 3"));
        let v: Value = serde_json::from_str(&json_out.stdout).unwrap();
        assert_eq!(v["results"]["surplus"], "3");
    }
    let help = run(["jobmatch", "--help"]);
    assert_eq!(help.code, EXIT_OK);
    assert!(help.stdout.contains("selftest"));
}
