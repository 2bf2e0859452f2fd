use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_centralaut")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = run(&all);
    let v = serde_json::from_slice(&out.stdout).expect("json report");
    (out.status.code().unwrap(), v)
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn statuses(v: &Value) -> Vec<(String, String)> {
    v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["name"].as_str().unwrap().to_string(), c["status"].as_str().unwrap().to_string()))
        .collect()
}

#[test]
fn aut_order_with_brute_force() {
    let (code, v) = json(&["aut-order", "--p", "3", "--exponents", "1,1", "--verify-bruteforce"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["aut_order"]["value"], "48");
    assert_eq!(v["results"]["aut_order"]["factored"], "3^1 * 16");
    assert!(statuses(&v).iter().all(|(_, s)| s == "pass"));
    assert!(v["inputs"]["argv"].is_array());
}

#[test]
fn aut_order_from_descriptor_file() {
    let path = std::env::temp_dir().join(format!("centralaut-desc-{}.json", std::process::id()));
    std::fs::write(&path, r#"{"p": 2, "exponents": [1, 2]}"#).unwrap();
    let (code, v) = json(&["aut-order", "--group", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 0);
    assert_eq!(v["results"]["aut_order"]["value"], "8");
}

#[test]
fn brute_force_skipped_past_bound() {
    let (code, v) = json(&["--brute-bound", "10", "aut-order", "--p", "3", "--exponents", "1,2", "--verify-bruteforce"]);
    assert_eq!(code, 0);
    let s = statuses(&v);
    assert!(s.contains(&("brute_force".into(), "skipped".into())), "{s:?}");
}

#[test]
fn non_prime_is_input_error() {
    let out = run(&["aut-order", "--p", "4", "--exponents", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn restricted_count_and_bound() {
    let (code, v) = json(&["count-restricted", "--p", "3", "--exponents", "3,3,3"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["restricted_count"]["value"], "19683");
    assert_eq!(v["results"]["lower_bound"]["value"], "19683");
}

#[test]
fn restricted_count_enumerated() {
    let (code, v) = json(&["count-restricted", "--p", "3", "--exponents", "2,3", "--enumerate"]);
    assert_eq!(code, 0);
    assert!(statuses(&v).contains(&("enumeration".into(), "pass".into())));
}

#[test]
fn restricted_count_needs_e1_at_least_two() {
    assert_eq!(run(&["count-restricted", "--p", "3", "--exponents", "1,3"]).status.code(), Some(2));
}

#[test]
fn extend_family_on_e1() {
    let (code, v) = json(&["extend", &data("e1.json"), "--all"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["family_size"]["value"], "3");
    let s = statuses(&v);
    for name in ["p_central", "p2_abelian", "center_is_z", "closure", "gamma1.non_inner", "gamma2.non_inner"] {
        assert!(s.contains(&(name.into(), "pass".into())), "{name}: {s:?}");
    }
}

#[test]
fn extend_single_theta() {
    let (code, v) = json(&["extend", &data("e1.json"), "--theta", "[[10]]"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["automorphisms"][0]["theta"]["entries"][0][0], 10);
}

#[test]
fn extend_rejects_unrestricted_theta() {
    let (code, v) = json(&["extend", &data("e1.json"), "--theta", "[[4]]"]);
    assert_eq!(code, 2);
    assert!(v["error"].as_str().unwrap().contains("restricted"));
}

#[test]
fn extend_composite_on_e2() {
    let (code, v) = json(&["extend", &data("e2.json"), "--theta", "identity"]);
    assert_eq!(code, 0);
    assert!(statuses(&v).contains(&("gamma.star".into(), "pass".into())));
}

#[test]
fn extend_reports_failed_hypothesis() {
    let path = std::env::temp_dir().join(format!("centralaut-split-{}.json", std::process::id()));
    // Split extension: the center is all of G, not Z.
    std::fs::write(
        &path,
        r#"{"p": 3, "q": {"type": "elementary", "rank": 2}, "z": {"p": 3, "exponents": [1]}, "cocycle": {"type": "zero"}}"#,
    )
    .unwrap();
    let (code, v) = json(&["extend", path.to_str().unwrap(), "--all"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(code, 3);
    assert!(statuses(&v).contains(&("center_is_z".into(), "fail".into())));
}

#[test]
fn conjecture_verdicts() {
    for (name, aut) in [("heisenberg27", "432"), ("cyclic27", "18"), ("q8", "24")] {
        let (code, v) = json(&["verify-conjecture", name]);
        assert_eq!(code, 0, "{name}");
        assert_eq!(v["results"]["aut_order"]["value"], aut, "{name}");
    }
    let (_, v) = json(&["verify-conjecture", "cyclic27"]);
    assert!(statuses(&v).contains(&("order_divides_aut".into(), "skipped".into())));
}

#[test]
fn unknown_group_name_is_input_error() {
    assert_eq!(run(&["verify-conjecture", "no-such-group"]).status.code(), Some(2));
}

#[test]
fn unknown_scale_is_usage_error() {
    let out = run(&["selftest", "--scale", "huge"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("huge"));
}

#[test]
fn selftest_small_reports_every_criterion() {
    let (code, v) = json(&["selftest", "--scale", "small"]);
    let s = statuses(&v);
    assert_eq!(s.len(), 9);
    let failed = s.iter().any(|(_, st)| st == "fail");
    assert_eq!(code, if failed { 3 } else { 0 });
    assert!(s.iter().all(|(_, st)| st != "skipped"));
}
