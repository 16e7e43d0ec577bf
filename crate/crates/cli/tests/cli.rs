use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stingray-kneser"))
        .args(args)
        .env_remove("STINGRAY_CAP_OVERRIDE")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = run(&full);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout));
    });
    (out.status.code().unwrap(), v)
}

#[test]
fn formulas_reports_exact_values() {
    let (code, v) = json(&["formulas", "--e1", "2", "--e2", "2", "--q", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], "stingray-kneser/1");
    let r = &v["records"][0];
    assert_eq!(r["p"], "93/256");
    assert_eq!(r["duo_fraction"], "16/35");
    assert_eq!(r["reducible_pair"], "467/560");
    assert_eq!(r["reducible_pair_bound"], "15/16");
    assert_eq!(r["older_pair_bound"], "17/16");
    assert_eq!(r["older_pair_bound_vacuous"], true);
    assert_eq!(r["improves_older_bound"], true);
}

#[test]
fn swapped_dimensions_are_normalized_with_notice() {
    let out = run(&["formulas", "--e1", "2", "--e2", "3", "--q", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.matches("note:").count(), 1, "{stderr}");
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["records"][0]["e1"], 3);
    assert_eq!(v["records"][0]["e2"], 2);
    assert_eq!(v["records"][0]["p"], "1617/4096");
}

#[test]
fn csv_and_json_outputs_agree() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("t.csv");
    let json_path = dir.path().join("t.json");
    let base = ["table", "--qs", "2,3", "--max-e", "4"];
    for (fmt, path) in [("csv", &csv_path), ("json", &json_path)] {
        let mut args = base.to_vec();
        args.extend(["--format", fmt, "--out", path.to_str().unwrap()]);
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    let records = v["records"].as_array().unwrap();
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let headers = reader.headers().unwrap().clone();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), records.len());
    assert_eq!(rows.len(), 2 * 10);
    for (row, rec) in rows.iter().zip(records) {
        let obj = rec.as_object().unwrap();
        assert_eq!(obj.len(), headers.len());
        for (h, field) in headers.iter().zip(row.iter()) {
            match &obj[h] {
                Value::Null => assert_eq!(field, "", "{h}"),
                Value::String(s) => assert_eq!(field, s, "{h}"),
                Value::Bool(b) => assert_eq!(field, b.to_string(), "{h}"),
                Value::Number(n) => assert_eq!(field.parse::<f64>().unwrap(), n.as_f64().unwrap(), "{h}"),
                other => panic!("unexpected value {other}"),
            }
        }
    }
}

#[test]
fn identity_holds_on_default_grid() {
    let (code, v) = json(&["identity"]);
    assert_eq!(code, 0);
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), 36 * 15);
    assert!(records.iter().all(|r| r["sum"] == "1"));
}

#[test]
fn quick_verify_passes() {
    let (code, v) = json(&["verify", "--max-q", "3", "--max-e", "2", "--equivalence-trials", "500"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["status"], "pass");
}

#[test]
fn injected_fault_fails_verify() {
    let (code, v) = json(&[
        "verify",
        "--max-q",
        "3",
        "--max-e",
        "2",
        "--equivalence-trials",
        "200",
        "--inject-fault",
        "rank_matrix_count",
    ]);
    assert_eq!(code, 1);
    let failed: Vec<&str> = v["records"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["pass"] == false)
        .map(|r| r["check"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["rank_matrix_count"]);
}

#[test]
fn census_matches_formulas() {
    let (code, v) = json(&["census", "--e1", "2", "--e2", "2", "--q", "2"]);
    assert_eq!(code, 0);
    let r = &v["records"][0];
    assert_eq!(r["pairs"], 1120u64 * 1120);
    assert_eq!(r["irreducible_duo"], 208_320);
    assert_eq!(r["irreducible_proportion"], "93/256");
    assert_eq!(r["fibre_constant"], true);
}

#[test]
fn empty_class_is_skipped() {
    let (code, v) = json(&["census", "--e1", "1", "--e2", "1", "--q", "2", "--d", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "skipped");
    assert!(v["message"]
        .as_str()
        .unwrap()
        .starts_with("skipped (no such stingray elements)"));
}

#[test]
fn cap_override_is_honoured() {
    let out = Command::new(env!("CARGO_BIN_EXE_stingray-kneser"))
        .args(["census", "--e1", "2", "--e2", "2", "--q", "2"])
        .env("STINGRAY_CAP_OVERRIDE", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the cap 10"));
}

#[test]
fn sample_is_reproducible_and_passes() {
    let args = [
        "sample",
        "--e1",
        "2",
        "--e2",
        "2",
        "--q",
        "2",
        "--trials",
        "5000",
        "--seed",
        "7",
        "--workers",
        "2",
    ];
    let (c1, a) = json(&args);
    let (c2, b) = json(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    assert_eq!(a["records"][0]["exact_target"], "93/256");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(
        run(&["census", "--e1", "2", "--e2", "2", "--q", "6"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["formulas", "--e1", "0", "--e2", "1", "--q", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["formulas", "--e1", "2"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}
