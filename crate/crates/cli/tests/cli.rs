use std::process::{Command, Output};

use cuspidal::moebius::MoebiusMap;
use serde_json::Value;

fn cuspidal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cuspidal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = cuspidal(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

/// Exit code and the JSON diagnostic on the last stderr line.
fn failure(args: &[&str]) -> (i32, Value) {
    let out = cuspidal(args);
    let err = String::from_utf8(out.stderr).unwrap();
    let last = err.lines().last().unwrap_or_default();
    (out.status.code().unwrap(), serde_json::from_str(last).expect("diagnostic is JSON"))
}

#[test]
fn enum_unit_bound_has_one_row() {
    let doc = json(&["enum", "--ring", "1", "--c-max", "1"]);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    for key in ["a", "b", "c", "d", "depth", "endpoint_re", "endpoint_im"] {
        assert!(rows[0].get(key).is_some(), "missing {key}");
    }
    assert_eq!(doc["config"]["ring"], 1);
    assert_eq!(doc["config"]["c_max"], 1.0);
}

#[test]
fn enum_csv_matches_json() {
    let j = json(&["enum", "--ring", "3", "--c-max", "3"]);
    let out = cuspidal(&["enum", "--ring", "3", "--c-max", "3", "--emit", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let cfg: Value = serde_json::from_str(text.lines().next().unwrap().strip_prefix("# config: ").unwrap()).unwrap();
    assert_eq!(cfg["emit"], "csv");
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    assert_eq!(rd.headers().unwrap(), vec!["a", "b", "c", "d", "depth", "endpoint_re", "endpoint_im"]);
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    let jrows = j["rows"].as_array().unwrap();
    assert_eq!(rows.len(), jrows.len());
    for (r, jr) in rows.iter().zip(jrows) {
        assert_eq!(r[2], *jr["c"].as_str().unwrap());
        assert_eq!(r[4].parse::<f64>().unwrap(), jr["depth"].as_f64().unwrap());
    }
}

#[test]
fn modular_hurwitz_constant() {
    let doc = json(&["hurwitz", "--ring", "0"]);
    assert!((doc["K"].as_f64().unwrap() - 1.0 / 5f64.sqrt()).abs() < 1e-12);
    assert_eq!(doc["achieving"]["tr"], "3");
    assert_eq!(doc["achieving"]["c"], "1");
    assert_eq!(doc["certified"], true);
    for key in ["c_max", "trace_max", "word_len"] {
        assert_eq!(doc[key], doc["config"][key]);
    }
    let w: MoebiusMap = serde_json::from_value(doc["achieving"]["witness"].clone()).unwrap();
    assert_eq!(serde_json::to_value(&w).unwrap(), doc["achieving"]["witness"]);
}

#[test]
fn torus_minimum_at_the_modular_torus() {
    let doc = json(&["torus", "h2", "--ell", "1.9248473002384139", "--theta", "3.141592653589793"]);
    assert!((doc["K"].as_f64().unwrap() - 0.4472135955).abs() < 1e-10);
    assert!((doc["pentagon"]["f"].as_f64().unwrap() - 2.58885438).abs() < 1e-6);
    let o = json(&["torus", "oracle", "--ell", "1.5", "--theta", "2", "--word-len", "7"]);
    assert!(o["abs_error"].as_f64().unwrap() < 1e-4);
}

#[test]
fn torus_grid_columns() {
    let out = cuspidal(&["torus", "grid", "--n", "10"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    assert_eq!(rd.headers().unwrap(), vec!["ell", "theta", "h2", "K", "f", "t"]);
    assert_eq!(rd.records().count(), 100);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["enum", "--ring", "5", "--c-max", "2"][..],
        &["enum", "--ring", "1", "--c-max", "0.5"],
        &["enum", "--ring", "1", "--c-max", "2", "--emit", "svg"],
        &["hurwitz", "--ring", "1", "--emit", "csv"],
        &["approx", "--ring", "0", "--xi", "1+2i"],
        &["approx", "--ring", "1", "--xi", "nonsense"],
        &["enum", "--ring", "1"],
        &["frobnicate"],
        &["enum", "--ring", "1", "--c-max", "2", "--threads", "0"],
    ] {
        let (code, diag) = failure(args);
        assert_eq!(code, 2, "{args:?}");
        assert_eq!(diag["error"], "usage", "{args:?}");
    }
}

#[test]
fn certification_failures_exit_1() {
    // a double near a cusp point: the descent cannot be decided past the cusp
    let out = cuspidal(&["approx", "--ring", "1", "--xi", "0.37+0.21i", "--steps", "20"]);
    assert_eq!(out.status.code(), Some(1));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["status"], "uncertified");
    let (_, diag) = failure(&["approx", "--ring", "1", "--xi", "0.37+0.21i", "--steps", "20"]);
    assert_eq!(diag["error"], "uncertified");
    assert_eq!(diag["certified_prefix"].as_u64().unwrap() as usize, doc["rows"].as_array().unwrap().len());

    let (code, diag) = failure(&["torus", "h2", "--ell", "2.5", "--theta", "0.5"]);
    assert_eq!(code, 1);
    assert_eq!(diag["error"], "requires_curve_change");
}

#[test]
fn artifacts_are_deterministic_and_round_trip() {
    let args = ["approx", "--ring", "3", "--xi", "random", "--seed", "9", "--steps", "12"];
    let a = cuspidal(&args);
    let b = cuspidal(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let doc: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["config"]["seed"], 9);
    assert_eq!(doc["config"]["xi"], "random");
    for row in doc["rows"].as_array().unwrap() {
        let g: MoebiusMap = serde_json::from_value(row["gamma"].clone()).unwrap();
        assert_eq!(serde_json::to_value(&g).unwrap(), row["gamma"]);
        let n = g.c().norm().to_string().parse::<f64>().unwrap();
        assert!((row["depth"].as_f64().unwrap() - n.ln()).abs() < 1e-12);
    }
    // thread count changes the config, never the data
    let one = json(&["ford", "--ring", "2", "--threads", "1"]);
    let many = json(&["ford", "--ring", "2", "--threads", "3"]);
    assert_eq!(one["complex"], many["complex"]);
    assert_eq!(one["circles"], many["circles"]);
}

#[test]
fn svg_is_regenerated_from_json() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, extra) in [("ford", vec!["--ring", "3"]), ("ford", vec!["--ring", "0"]), ("approx", vec!["--ring", "1", "--xi", "random"])] {
        let path = dir.path().join(format!("{cmd}.json"));
        let p = path.to_str().unwrap();
        let mut args = vec![cmd];
        args.extend(&extra);
        let mut with_out = args.clone();
        with_out.extend(["--out", p]);
        assert!(cuspidal(&with_out).status.success());
        let saved: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(saved["config"]["out"], p);
        args.extend(["--emit", "svg"]);
        let direct = cuspidal(&args).stdout;
        let rendered = cuspidal(&["render", p]).stdout;
        assert!(String::from_utf8_lossy(&direct).starts_with("<svg"));
        assert_eq!(direct, rendered, "{cmd} {extra:?}");
    }
}

#[test]
fn seeded_checks_pass() {
    let doc = json(&["check", "--cases", "300", "--seed", "17"]);
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["checks"].as_array().unwrap().len(), 5);
}
