//! End-to-end runs of the `herm-density` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_herm-density")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn coeffs_table_rows() {
    let out = run(&["coeffs", "--n", "4", "--q", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["4", "2", "-1/36"]), "{text}");
    assert!(text.lines().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["4", "4", "1/90"]), "{text}");
}

#[test]
fn coeffs_json_range() {
    let v = json(&["coeffs", "--n", "2..6", "--q", "3", "--eps", "+1"]);
    assert_eq!(v["command"], "coeffs");
    assert_eq!(v["q"], 3);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    let rows = v["result"]["coefficients"].as_array().unwrap();
    let find = |n: u64, t: u64| rows.iter().find(|r| r["n"] == n && r["t"] == t).map(|r| r["c"].as_str().unwrap().to_string());
    assert_eq!(find(6, 6).as_deref(), Some("-1/20412"));
    assert_eq!(find(5, 4).as_deref(), Some("-1/810"));
    assert_eq!(find(2, 2).as_deref(), Some("-1/4"));
}

#[test]
fn pdden_example() {
    let v = json(&["pdden", "--genus", "0^3+", "--q", "3"]);
    assert_eq!(v["result"]["pdden"], "1");
    assert_eq!(v["result"]["closed"], "1");
}

#[test]
fn dsum_example() {
    let v = json(&["dsum", "--flat", "2^1+", "--ambient-chi", "+1", "--valx", "1", "--q", "3"]);
    assert_eq!(v["result"]["report"]["value"], "0");
    assert_eq!(v["ok"], true);
}

#[test]
fn printed_symbols_reparse() {
    for g in ["0^1+,1H^1,2^1-", "-1H^2", "0^2-,3H^1"] {
        let v = json(&["dual", "--genus", g]);
        let dual = v["result"]["dual"].as_str().unwrap().to_string();
        let back = json(&["dual", "--genus", &dual]);
        assert_eq!(back["result"]["dual"], g);
        let canon = json(&["genus", "--genus", g]);
        assert_eq!(canon["result"]["L"], g);
    }
}

#[test]
fn genus_from_gram_json() {
    let gram = r#"[[{"a":"1"},{"a":"0"}],[{"a":"0"},{"a":"9"}]]"#;
    let v = json(&["genus", "--gram", gram, "--q", "3"]);
    let l = v["result"]["L"].as_str().unwrap();
    assert!(l.starts_with("0^1") && l.contains(",4^1"), "{l}");
}

#[test]
fn invariants_and_chi() {
    let v = json(&["invariants", "--genus", "-1H^1,0^1+"]);
    assert_eq!(v["result"]["invariants"], serde_json::json!([-1, -1, 0]));
    assert_eq!(v["result"]["integral"], false);
    let c = json(&["chi", "--genus", "0^1-", "--q", "5"]);
    assert_eq!(c["result"]["chi"], -1);
}

#[test]
fn density_polynomials() {
    let den = json(&["den-poly", "--genus", "0^1+", "--q", "3"]);
    assert!(den["result"]["coefficients"].is_array());
    let pden = json(&["pden-poly", "--genus", "0^1+", "--m", "1", "--sign", "+1", "--q", "3"]);
    assert!(pden["result"]["coefficients"].is_array());
    let dd = json(&["dden", "--genus", "0^3+", "--q", "3"]);
    assert_eq!(dd["result"]["dden"], "1");
}

#[test]
fn mu_counts_for_hyperbolic_plane() {
    let v = json(&["mu", "--genus", "1H^1", "--q", "3"]);
    assert_eq!(v["result"]["mu"]["minus"], 8);
    assert_eq!(v["result"]["identities"]["total_residual"], 0);
}

#[test]
fn oracle_trace() {
    let v = json(&["oracle", "--m", "0^1+", "--l", "0^1+", "--q", "3"]);
    assert_eq!(v["result"]["value"], "2");
    assert_eq!(v["result"]["trace"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_single_suite() {
    let out = run(&["verify", "q_combinatorics", "--q", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("PASS"));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code();
    assert_eq!(code(&["chi", "--genus", "nonsense"]), Some(2));
    assert_eq!(code(&["coeffs", "--n", "4", "--q", "4"]), Some(2));
    assert_eq!(code(&["dden", "--genus", "0^1+", "--q", "9"]), Some(2));
    assert_eq!(code(&["frobnicate"]), Some(2));
    assert_eq!(code(&["verify", "nope"]), Some(2));
    assert_eq!(code(&["oracle", "--m", "0^3+", "--l", "0^3+", "--k", "2", "--depth", "4", "--q", "3"]), Some(3));
    assert_eq!(code(&["--help"]), Some(0));
}

#[test]
fn thread_cap_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_herm-density"))
        .args(["coeffs", "--n", "2"])
        .env("HERM_DENSITY_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let ok = Command::new(env!("CARGO_BIN_EXE_herm-density"))
        .args(["coeffs", "--n", "2"])
        .env("HERM_DENSITY_THREADS", "2")
        .output()
        .unwrap();
    assert!(ok.status.success());
}
