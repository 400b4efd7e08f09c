use std::process::{Command, Output};

use serde_json::Value;

fn psl2(args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_psl2"));
    for (k, _) in std::env::vars() {
        if k.starts_with("PSL2_") {
            cmd.env_remove(k);
        }
    }
    cmd.args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = psl2(&all);
    let v = serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", stdout(&o)));
    (v, o.status.code().unwrap())
}

fn keys(v: &Value) -> Vec<&str> {
    v.as_object().unwrap().keys().map(String::as_str).collect()
}

#[test]
fn invariants_rows() {
    let o = psl2(&["invariants", "37"]);
    assert!(o.status.success());
    let t = stdout(&o);
    let row: Vec<&str> = t.lines().nth(1).unwrap().split_whitespace().collect();
    assert_eq!(row[7..], ["19", "21", "5", "16"]);

    let o = psl2(&["invariants", "53", "--format", "csv"]);
    assert_eq!(stdout(&o).lines().nth(1), Some("53,4,4,0,1,0,0,17,18,6,12"));

    let (v, code) = json(&["invariants", "37"]);
    assert_eq!(code, 0);
    assert_eq!(
        keys(&v),
        ["p", "delta", "epsilon", "k", "l", "sigma", "alpha", "i", "c", "s", "n"]
    );
    assert_eq!((v["i"].as_u64(), v["n"].as_u64()), (Some(19), Some(16)));
}

#[test]
fn invariants_usage_errors() {
    for bad in ["4", "1", "0", "x", "-5"] {
        let o = psl2(&["invariants", bad]);
        assert_eq!(o.status.code(), Some(2), "{bad}");
    }
    let o = psl2(&["invariants", "4"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not prime"));
}

#[test]
fn invariants_3_goes_to_the_oracle() {
    let o = psl2(&["invariants", "3", "--format", "json"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("brute-force"));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["source"], "oracle");
    assert_eq!([&v["i"], &v["c"], &v["s"], &v["n"]], [3, 3, 1, 2]);
}

#[test]
fn census_37() {
    let o = psl2(&["census", "37"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("self-normalising: D19, D6, D18, E37:C18, A4"));
    let (v, _) = json(&["census", "37"]);
    let sn: Vec<&str> = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["self_normalising"] == true)
        .map(|e| e["label"].as_str().unwrap())
        .collect();
    assert_eq!(sn.len(), 5);
    assert_eq!(keys(&v["entries"][0]), ["label", "order", "classes", "self_normalising"]);
}

#[test]
fn census_oracle_agrees() {
    let (v, code) = json(&["census", "13", "--oracle", "--lattice"]);
    assert_eq!(code, 0);
    assert_eq!(keys(&v), ["p", "formula", "oracle", "diff", "lattice"]);
    assert_eq!(v["diff"]["only_formula"], Value::Array(vec![]));
    assert_eq!(v["diff"]["only_oracle"], Value::Array(vec![]));
    for k in ["i", "c", "s", "n"] {
        assert_eq!(v["formula"][k], v["oracle"][k]);
    }
    let sorted = |c: &Value| {
        let mut e: Vec<String> = c["entries"].as_array().unwrap().iter().map(Value::to_string).collect();
        e.sort();
        e
    };
    assert_eq!(sorted(&v["formula"]), sorted(&v["oracle"]));
    // trivial group and whole group are in the lattice but not the census
    let labels: Vec<&str> = v["lattice"].as_array().unwrap().iter().map(|c| c["label"].as_str().unwrap()).collect();
    assert_eq!(labels.first(), Some(&"1"));
    assert_eq!(labels.last(), Some(&"G"));

    let o = psl2(&["census", "7", "--oracle"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("diff: none"));
}

#[test]
fn census_range_rules() {
    assert_eq!(psl2(&["census", "23", "--oracle"]).status.code(), Some(2));
    assert_eq!(psl2(&["census", "17", "--oracle"]).status.code(), Some(2));
    assert_eq!(psl2(&["census", "3"]).status.code(), Some(2));
    assert_eq!(psl2(&["census", "37", "--lattice"]).status.code(), Some(2));
    let (v, code) = json(&["census", "3", "--oracle"]);
    assert_eq!(code, 0);
    assert!(v["formula"].is_null() && v["diff"].is_null());
}

#[test]
fn census_subgroup_cap_is_a_resource_abort() {
    let o = psl2(&["census", "11", "--oracle", "--subgroup-cap", "100"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn verify_table_exit_codes() {
    let o = psl2(&["verify-table"]);
    assert_eq!(o.status.code(), Some(0));
    let t = stdout(&o);
    assert!(t.contains("16 formula rows"));
    assert!(t.contains("1 known issue(s), 0 mismatch(es)"));
    assert!(t.contains("known-issue c: printed 14, computed 13"));

    assert_eq!(psl2(&["verify-table", "--strict"]).status.code(), Some(1));

    let mut cmd = Command::new(env!("CARGO_BIN_EXE_psl2"));
    let o = cmd.args(["verify-table"]).env("PSL2_STRICT", "true").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_table_json_and_csv() {
    let (v, code) = json(&["verify-table", "--oracle-rows"]);
    assert_eq!(code, 0);
    assert_eq!(keys(&v), ["formula_rows", "oracle_rows", "known_issues", "mismatches", "cells"]);
    assert_eq!(v["formula_rows"].as_array().unwrap().len(), 16);
    assert_eq!(v["oracle_rows"], serde_json::json!([3, 5, 7, 11, 13]));
    assert_eq!(v["mismatches"], Value::Array(vec![]));
    let ki = v["known_issues"].as_array().unwrap();
    assert!(ki.iter().all(|c| c["p"] == 7 && c["column"] == "c" && c["printed"] == 14 && c["computed"] == 13));
    assert_eq!(keys(&ki[0]), ["p", "column", "printed", "computed", "source", "status"]);
    assert_eq!(ki[0]["status"], "known-issue");

    let o = psl2(&["verify-table", "--format", "csv"]);
    let t = stdout(&o);
    assert_eq!(t.lines().next(), Some("p,column,printed,computed,source,status"));
    assert!(t.lines().any(|l| l == "7,c,14,13,formula,known-issue"));
}

#[test]
fn search_b_first_hit() {
    let o = psl2(&["search", "b", "--t-max", "100", "--format", "csv", "-q"]);
    assert!(o.status.success());
    let t = stdout(&o);
    assert_eq!(t.lines().nth(1), Some("3,43,11,7,true,true,true,true"));

    let (v, code) = json(&["search", "b", "--t-max", "100", "-q"]);
    assert_eq!(code, 0);
    assert_eq!(keys(&v), ["case", "t_max", "q_count", "sigma_alpha_zero", "first_hits"]);
    assert_eq!(keys(&v["first_hits"][0]), ["t", "p", "s", "r", "attains"]);
    assert_eq!(v["case"], "b");
}

#[test]
fn search_a_table_shows_small_triples() {
    let o = psl2(&["search", "a", "--t-max", "10000", "-q"]);
    let t = stdout(&o);
    assert!(t.contains("triples with p <= 37"));
    assert!(t.lines().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["2", "29", "5", "7"]));
    assert!(t.lines().any(|l| l.starts_with("14 ") && l.contains("173")));
}

#[test]
fn search_progress_is_on_stderr_only() {
    let o = psl2(&["search", "a", "--t-max", "300000", "--block-size", "1000", "--format", "json"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("100%"));
    serde_json::from_slice::<Value>(&o.stdout).unwrap();
}

#[test]
fn search_usage_errors() {
    assert_eq!(psl2(&["search", "e", "--t-max", "10"]).status.code(), Some(2));
    assert_eq!(psl2(&["search", "a", "--t-max", "0"]).status.code(), Some(2));
    assert_eq!(psl2(&["search", "a"]).status.code(), Some(2));
    assert_eq!(psl2(&["search", "a", "--t-max", "10", "--block-size", "0"]).status.code(), Some(2));
}

#[test]
fn threads_do_not_change_results() {
    let one = psl2(&["--threads", "1", "search", "d", "--t-max", "200000", "--block-size", "999", "--format", "json", "-q"]);
    let many = psl2(&["--threads", "3", "search", "d", "--t-max", "200000", "--format", "json", "-q"]);
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(psl2(&["--threads", "0", "hb", "--limit", "100"]).status.code(), Some(2));
}

#[test]
fn bhc_case_a() {
    let (v, code) = json(&["bhc", "a", "--x", "1e9", "--trunc", "1e7"]);
    assert_eq!(code, 0);
    assert_eq!(keys(&v), ["family", "x", "a", "P", "C", "integral", "E", "tail_bound"]);
    let e = v["E"].as_f64().unwrap();
    assert!((e / 615_580.7 - 1.0).abs() < 5e-4, "{e}");
    assert_eq!(v["P"], 10_000_000);
    assert_eq!(v["family"], serde_json::json!([[5, 12], [1, 3], [1, 2]]));
}

#[test]
fn bhc_with_q_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.json");
    let o = psl2(&["search", "b", "--t-max", "1000000", "--format", "json", "-q"]);
    std::fs::write(&path, &o.stdout).unwrap();
    let q = path.to_str().unwrap();

    let (v, code) = json(&["bhc", "b", "--x", "1e6", "--trunc", "1e5", "--q-file", q]);
    assert_eq!(code, 0);
    assert_eq!(v["q_count"], 2051);
    let rel = v["relative_error"].as_f64().unwrap();
    let e = v["E"].as_f64().unwrap();
    assert!((rel - (e - 2051.0) / 2051.0).abs() < 1e-9);
    assert!(rel.abs() < 0.05);

    // the same count through an explicit family
    let (w, _) = json(&["bhc", "--family", "7,12;2,3;1,2", "--x", "1e6", "--trunc", "1e5", "--q-file", q]);
    assert_eq!(w["q_count"], 2051);

    assert_eq!(psl2(&["bhc", "a", "--x", "1e6", "--q-file", q]).status.code(), Some(2));
    assert_eq!(psl2(&["bhc", "b", "--x", "1e7", "--q-file", q]).status.code(), Some(2));
    let missing = dir.path().join("none.json");
    assert_eq!(psl2(&["bhc", "b", "--x", "1e6", "--q-file", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn bhc_usage_errors() {
    // fixed prime divisor 2 in t(t+1)
    assert_eq!(psl2(&["bhc", "--family", "0,1;1,1", "--x", "1e4"]).status.code(), Some(2));
    assert_eq!(psl2(&["bhc", "--x", "1e4"]).status.code(), Some(2));
    assert_eq!(psl2(&["bhc", "a", "--family", "1,2", "--x", "1e4"]).status.code(), Some(2));
    assert_eq!(psl2(&["bhc", "a", "--x", "abc"]).status.code(), Some(2));
    assert_eq!(psl2(&["bhc", "a", "--x", "1e4", "--trunc", "10"]).status.code(), Some(2));
    assert_eq!(psl2(&["bhc", "a", "--x", "1e4", "--trunc", "1e3.5"]).status.code(), Some(2));
    assert_eq!(psl2(&["bhc", "--family", "1,0,0,1", "--x", "1e4"]).status.code(), Some(2));
}

#[test]
fn bhc_quadratic_family_csv() {
    let o = psl2(&["bhc", "--family", "1,0,1", "--x", "1e5", "--trunc", "1e5", "--format", "csv"]);
    assert!(o.status.success());
    let t = stdout(&o);
    assert_eq!(t.lines().next(), Some("family,x,a,P,C,integral,E,tail_bound"));
    assert!(t.lines().nth(1).unwrap().starts_with("t^2 + 1,"));
}

#[test]
fn hb_csv_within_bounds() {
    let o = psl2(&["hb", "--limit", "1000000"]);
    assert_eq!(o.status.code(), Some(0));
    let t = stdout(&o);
    let mut lines = t.lines();
    assert_eq!(lines.next(), Some("p,omega_minus,omega_plus,i,c,s,n"));
    let rows: Vec<Vec<u64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 3214);
    assert_eq!(rows[0], [5, 2, 2, 7, 7, 3, 4]);
    for r in &rows {
        assert_eq!(r[0] % 72, 5);
        assert!(r[1] <= 8 && r[2] <= 8 && r[1] + r[2] <= 11);
        assert!(r[3] <= 390 && r[4] <= 454 && r[5] <= 132 && r[6] <= 384);
    }
}

#[test]
fn hb_json_and_errors() {
    let (v, code) = json(&["hb", "--limit", "10000"]);
    assert_eq!(code, 0);
    assert_eq!(keys(&v), ["limit", "bounds", "count", "exceeding", "candidates"]);
    assert_eq!(v["bounds"], serde_json::json!({"i": 390, "c": 454, "s": 132, "n": 384}));
    assert_eq!(v["count"].as_u64().unwrap() as usize, v["candidates"].as_array().unwrap().len());
    assert_eq!(keys(&v["candidates"][0]), ["p", "omega_minus", "omega_plus", "i", "c", "s", "n"]);
    assert_eq!(psl2(&["hb", "--limit", "50"]).status.code(), Some(2));
}

#[test]
fn env_overrides_flags() {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_psl2"));
    let o = cmd
        .args(["search", "b"])
        .env("PSL2_T_MAX", "100")
        .env("PSL2_FORMAT", "json")
        .env("PSL2_QUIET", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["t_max"], 100);
}
