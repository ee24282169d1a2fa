//! End-to-end runs of the `mzspace` binary.

use std::fs;
use std::process::{Command, Output};

use mzspace::literal::subspace_from_value;
use serde_json::Value;
use tempfile::TempDir;

fn mzspace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mzspace")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn hyperplane(dir: &TempDir, p: u64) -> String {
    let path = dir.path().join(format!("h{p}.json"));
    let lit = format!(
        r#"{{"field":{{"p":{p}}},"n":2,"basis":[{{"rows":[[1,0],[0,{}]]}},{{"rows":[[0,1],[0,0]]}},{{"rows":[[0,0],[1,0]]}}]}}"#,
        p - 1
    );
    fs::write(&path, lit).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn certify_trace_zero_hyperplanes() {
    let dir = TempDir::new().unwrap();
    let out = mzspace(&["certify", "--subspace", &hyperplane(&dir, 5)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"]["status"], "MS_Proper");

    let out = mzspace(&["certify", "--subspace", &hyperplane(&dir, 2)]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["verdict"]["status"], "NotMS");
    assert_eq!(v["verdict"]["witness"]["rows"], serde_json::json!([[1, 0], [0, 1]]));
}

#[test]
fn certify_by_definition_agrees() {
    let dir = TempDir::new().unwrap();
    let out = mzspace(&["certify", "--method", "definition", "--subspace", &hyperplane(&dir, 2)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"]["method"], "DefinitionBruteForce");
}

#[test]
fn construct_corner_matches_hand_built() {
    let out = mzspace(&["construct", "--family", "cor26", "--params", r#"{"n":2,"r":1,"s1":1,"s2":2,"p":5}"#]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], 1);
    // {[[x,y],[0,z]] : x + 2z = 0}
    let rows: Vec<&Value> = v["subspace"]["basis"].as_array().unwrap().iter().map(|m| &m["rows"]).collect();
    assert_eq!(rows, [&serde_json::json!([[1, 0], [0, 2]]), &serde_json::json!([[0, 1], [0, 0]])]);
    let round = subspace_from_value(&v["subspace"]).unwrap();
    assert_eq!(serde_json::to_value(&round).unwrap(), v["subspace"]);
}

#[test]
fn construct_via_params_file_and_output_file() {
    let dir = TempDir::new().unwrap();
    let params = dir.path().join("p.json");
    fs::write(&params, r#"{"ranks":[1,1,1],"sigmas":[1,2,3],"p":7}"#).unwrap();
    let target = dir.path().join("out.json");
    let out = mzspace(&[
        "construct",
        "--family",
        "ex22",
        "--params",
        &format!("@{}", params.display()),
        "--output",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(v["verdict"]["status"], "MS_Proper");
    assert_eq!(v["verdict"]["method"], "StructuralCertificate");
}

#[test]
fn chain_extension_reports_corner() {
    let params = r#"{"ranks":[1,1,1],"sigmas":[1,2,3],"p":7,"u":[[0,1,0],[0,0,0],[0,0,0]],"w":[[0,0,0],[0,0,1],[0,0,0]]}"#;
    let out = mzspace(&["construct", "--family", "ex23", "--params", params]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["extension"]["corner_vanishes"], true);
    assert_eq!(v["extension"]["base_dim"], 5);
}

#[test]
fn maximal_single_direction_and_exhaustive() {
    let fam = r#"{"n":2,"r":1,"s1":1,"s2":2,"p":5}"#;
    let out = mzspace(&["maximal", "--family-params", fam, "--direction", r#"{"rows":[[0,0],[1,0]]}"#]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["witness"]["case"], "Case1");
    assert_eq!(v["witness"]["q"]["rows"], serde_json::json!([[2, 2], [4, 4]]));

    let fam = r#"{"n1":1,"n2":1,"n3":1,"s1":1,"s2":2,"p":7}"#;
    let out = mzspace(&["maximal", "--family-params", fam, "--exhaustive"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["certificate"]["directions"], 57);
}

#[test]
fn maximal_spot_check_over_rationals() {
    let fam = r#"{"n1":1,"n2":1,"n3":2,"s1":1,"s2":"3/2","p":0}"#;
    let out = mzspace(&["maximal", "--family-params", fam]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["certificate"]["label"], "theorem-backed spot check");
}

#[test]
fn direction_inside_v_is_an_error() {
    let fam = r#"{"n":2,"r":1,"s1":1,"s2":2,"p":5}"#;
    let out = mzspace(&["maximal", "--family-params", fam, "--direction", r#"{"rows":[[0,1],[0,0]]}"#]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn census_and_oracle() {
    let out = mzspace(&["census", "--n", "2", "--q", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["dimensions"][3]["ms"], 1);
    assert_eq!(v["dimensions"][3]["subspaces"], 40);

    let out = mzspace(&["oracle-compare", "--n", "2", "--q", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["proper_checked"], 66);
}

#[test]
fn classify2_over_f2_reports_extra_lines() {
    let out = mzspace(&["classify2", "--field", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let extras = json(&out)["comparison"]["extras"].as_array().unwrap().len();
    assert_eq!(extras, 2);
}

#[test]
fn base_change_demo_flips() {
    let out = mzspace(&["demo-basechange", "--p", "5", "--s", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["base_verdict"]["status"], "MS_Proper");
    assert_eq!(v["extension_verdict"]["status"], "NotMS");
    assert_eq!(v["c_is_idempotent"], true);

    let out = mzspace(&["demo-basechange", "--p", "5", "--s", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn debondt_is_deterministic() {
    let a = mzspace(&["debondt-sample", "--samples", "15", "--seed", "42"]);
    let b = mzspace(&["debondt-sample", "--samples", "15", "--seed", "42"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["with_idempotent"], 15);
}

#[test]
fn malformed_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{not json").unwrap();
    assert_eq!(mzspace(&["certify", "--subspace", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(mzspace(&["census", "--n", "2", "--q", "4"]).status.code(), Some(2));
    assert_eq!(mzspace(&["census", "--n", "2", "--q", "3", "--budget", "0"]).status.code(), Some(2));
    assert_eq!(mzspace(&["construct", "--family", "cor26", "--params", r#"{"n":2,"r":3,"s1":1,"s2":2,"p":5}"#]).status.code(), Some(2));
}
