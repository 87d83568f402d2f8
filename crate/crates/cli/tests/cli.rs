use std::process::{Command, Output};

use serde_json::Value;

fn canonloop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_canonloop"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn fk_catalan() {
    let out = canonloop(&["fk", "--k", "2", "--N", "5"]);
    assert!(out.status.success());
    let v = json(&out);
    let values: Vec<&str> = v["values"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert_eq!(values, ["1", "1", "2", "5", "14", "42"]);
}

#[test]
fn fk_csv() {
    let out = canonloop(&["fk", "--k", "3", "--N", "4", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "n,count\n0,1\n1,1\n2,3\n3,14\n4,84\n");
}

#[test]
fn gf_single_coefficient() {
    let out = canonloop(&["gf", "--kind", "hairpin", "--k", "2", "--tau", "1", "--n", "3"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["coefficients"][0]["poly"], "1 + u");
    assert_eq!(v["coefficients"][0]["n"], 3);
}

#[test]
fn gf_matches_enum() {
    for kind in ["hairpin", "interior", "bulge"] {
        let gf = json(&canonloop(&["gf", "--kind", kind, "--k", "3", "--tau", "1", "--N", "9"]));
        let en = json(&canonloop(&["enum", "--kind", kind, "--k", "3", "--tau", "1", "--n", "9"]));
        assert_eq!(gf["coefficients"][9]["poly"], en["histograms"][0]["poly"], "{kind}");
    }
}

#[test]
fn enum_list_counts_structures() {
    let v = json(&canonloop(&["enum", "--k", "2", "--tau", "1", "--n", "7", "--list"]));
    assert_eq!(v["count"], 37);
    assert_eq!(v["structures"].as_array().unwrap().len(), 37);
}

#[test]
fn shapes_agree_with_brute_force() {
    let a = canonloop(&["shapes", "--k", "2", "--N", "4"]);
    let b = canonloop(&["shapes", "--k", "2", "--N", "4", "--brute-force"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(json(&a), json(&b));
}

#[test]
fn hairpin_table_matches() {
    let out = canonloop(&["tables", "--kind", "hairpin"]);
    assert!(out.status.success());
    let v = json(&out);
    let cells = v["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 24);
    assert!(cells.iter().all(|c| c["matches"] == true));
    let first = cells.iter().find(|c| c["k"] == 2 && c["tau"] == 1).unwrap();
    assert_eq!(first["mu"], "0.105573");
    assert_eq!(first["sigma2"], "0.032260");
}

#[test]
fn singularity_precision() {
    let v = json(&canonloop(&["singularity", "--kind", "hairpin", "--k", "2", "--tau", "1", "--precision", "10"]));
    assert_eq!(v["gamma0"], "0.3819660113");
    assert_eq!(v["dominance"], true);
    assert_eq!(v["derivatives_agree"], true);
}

#[test]
fn quick_check_passes() {
    let out = canonloop(&["check", "--scope", "quick"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["passed"], true);
}

#[test]
fn out_of_range_k_is_a_usage_error() {
    let out = canonloop(&["fk", "--k", "1", "--N", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["error"]["category"], "usage");
    assert_eq!(v["error"]["code"], "out_of_range");
}

#[test]
fn missing_argument_is_a_usage_error() {
    let out = canonloop(&["gf", "--kind", "hairpin", "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["error"]["category"], "usage");
}

#[test]
fn growth_exit_code_follows_tolerance() {
    let ok = canonloop(&["growth", "--kind", "hairpin", "--k", "2", "--tau", "1", "--N", "100", "--ratio-tol", "0.05"]);
    assert!(ok.status.success());
    let tight = canonloop(&["growth", "--kind", "hairpin", "--k", "2", "--tau", "1", "--N", "100", "--ratio-tol", "1e-9"]);
    assert_eq!(tight.status.code(), Some(1));
    assert_eq!(json(&tight)["passed"], false);
}

#[test]
fn writes_to_file() {
    let path = std::env::temp_dir().join(format!("canonloop-cli-test-{}.csv", std::process::id()));
    let out = canonloop(&["fk", "--k", "2", "--N", "2", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "n,count\n0,1\n1,1\n2,2\n");
    std::fs::remove_file(path).unwrap();
}
