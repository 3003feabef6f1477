use bundlecalc_harness::CheckInstance;
use serde_json::Value;
use std::process::{Command, Output};

fn bundlecalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bundlecalc")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn usage_errors_exit_with_3() {
    for args in [
        &["frobnicate"][..],
        &["check", "no-such-theorem"],
        &["check"],
        &["check", "tor-coproduct", "--seed", "minus-one"],
        &["check", "tor-coproduct", "--max-base", "99"],
        &["check", "tor-coproduct", "--trials", "0"],
        &["gen", "tor-coproduct"],
        &["suite", "tor-coproduct", "--all"],
        &["tor", "--ring", "4", "--i", "1", "--module", "{\"invariant_factors\":[3]}", "--coeff", "{\"invariant_factors\":[2]}"],
        &["homs", "--group", "Z7", "--target", "C2"],
    ] {
        assert_eq!(bundlecalc(args).status.code(), Some(3), "{args:?}");
    }
    assert_eq!(bundlecalc(&["--help"]).status.code(), Some(0));
}

#[test]
fn check_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = bundlecalc(&["check", "tor-coproduct", "--seed", "3", "--json", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let keys: Vec<&str> = report.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["instance", "seed", "theorem", "timing_ms", "verdict", "witness"]);
    assert_eq!(report["theorem"], "tor-coproduct");
    assert_eq!(report["verdict"], "pass");
    assert!(report["timing_ms"].is_null());

    // The report's seed regenerates exactly the instance it was checked on.
    let seed = report["seed"].as_u64().unwrap().to_string();
    let gen = bundlecalc(&["gen", "tor-coproduct", "--seed", &seed]);
    let instance: CheckInstance = serde_json::from_slice(&gen.stdout).unwrap();
    assert_eq!(report["instance"], instance.digest());
}

#[test]
fn timing_is_recorded_only_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = bundlecalc(&["check", "four-square", "--timing", "--json", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(report["timing_ms"].is_u64());
}

#[test]
fn several_trials_give_a_suite_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("suite.json");
    let out = bundlecalc(&["check", "free-module-coproduct", "--trials", "4", "--json", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let suite: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(suite["theorems"][0]["passed"], 4);
    assert_eq!(suite["verdict"], "pass");
}

#[test]
fn gen_to_a_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("instance.json");
    let to_file = bundlecalc(&["gen", "tor-coproduct", "--seed", "17", "--out", path.to_str().unwrap()]);
    assert_eq!(to_file.status.code(), Some(0));
    let to_stdout = bundlecalc(&["gen", "tor-coproduct", "--seed", "17"]);
    assert_eq!(std::fs::read(&path).unwrap(), to_stdout.stdout);
    let golden: Value = serde_json::from_str(include_str!("../../harness/tests/golden/tor-coproduct-seed17.json")).unwrap();
    assert_eq!(stdout_json(&to_stdout), golden);
}

#[test]
fn suite_files_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for name in ["a.json", "b.json"] {
        let path = dir.path().join(name);
        let out = bundlecalc(&["suite", "--all", "--trials", "5", "--seed", "42", "--json", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
        files.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let suite: Value = serde_json::from_slice(&files[0]).unwrap();
    assert_eq!(suite["theorems"].as_array().unwrap().len(), 12);
}

#[test]
fn tor_of_a_sum() {
    // Tor_1 over Z/4 of Z/2 + Z/4 against Z/2: Z/4 is free, Z/2 contributes Z/2.
    let out = bundlecalc(&[
        "tor",
        "--ring",
        "4",
        "--i",
        "1",
        "--module",
        "{\"invariant_factors\":[2,4]}",
        "--coeff",
        "{\"invariant_factors\":[2]}",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["invariant_factors"], serde_json::json!([2]));
    let tensor = bundlecalc(&[
        "tor",
        "--ring",
        "4",
        "--i",
        "0",
        "--module",
        "{\"invariant_factors\":[2,4]}",
        "--coeff",
        "{\"invariant_factors\":[2]}",
    ]);
    assert_eq!(stdout_json(&tensor)["invariant_factors"], serde_json::json!([2, 2]));
}

#[test]
fn modules_can_come_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    std::fs::write(&path, r#"{"ring":{"kind":"Zmod","n":6},"invariant_factors":[6]}"#).unwrap();
    let out = bundlecalc(&["dual", "--module", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["invariant_factors"], serde_json::json!([6]));
}

#[test]
fn dual_of_a_permutation_module() {
    // (Z/2)[C2] as a module over itself is self-dual.
    let module = r#"{"ring":{"kind":"GroupAlgebra","n":2,"group":"C2"},"invariant_factors":[2,2],"action":[[[0,1],[1,0]]]}"#;
    let out = bundlecalc(&["dual", "--module", module]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["invariant_factors"], serde_json::json!([2, 2]));
}

#[test]
fn hom_counts() {
    for (g, t, n) in [("C2", "S3", 4), ("S3", "C2", 2), ("C2xC2", "C2", 4), ("Q8", "C2xC2", 16), ("C4", "C6", 2)] {
        let out = bundlecalc(&["homs", "--group", g, "--target", t]);
        assert_eq!(out.status.code(), Some(0));
        let v = stdout_json(&out);
        assert_eq!(v["count"], n, "{g} -> {t}");
        assert_eq!(v["homs"].as_array().unwrap().len(), n);
    }
}
