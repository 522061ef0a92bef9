use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardy-chain"))
        .args(args)
        .env_remove("HARDY_CHAIN_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn lhv_bounds_matches_closed_forms() {
    let o = run(&["lhv-bounds", "--member", "X", "--n", "2..6"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["ok"], true);
    let maxes: Vec<u64> = v["results"].as_array().unwrap().iter().map(|r| r["max"].as_u64().unwrap()).collect();
    assert_eq!(maxes, [1, 2, 3, 4, 5]);
}

#[test]
fn lhv_bounds_csv_columns() {
    let o = run(&["lhv-bounds", "--member", "Xijkl", "--n", "5", "--indices", "1,2,3,4", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(rows[0][..4], ["member", "n", "min", "max"]);
    assert_eq!(rows[1][0], "Xijkl(1,2,3,4)@n=5");
    assert_eq!(rows[1][3], "2");
    assert_eq!(rows[1].last().unwrap(), "true");
}

#[test]
fn csv_and_json_agree() {
    let j = json(&run(&["tables", "--which", "1", "--n", "2..4"]));
    let c = run(&["tables", "--which", "1", "--n", "2..4", "--format", "csv"]);
    let rows = csv_rows(&String::from_utf8(c.stdout).unwrap());
    let roots: Vec<f64> = j["results"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|r| r["roots"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect::<Vec<_>>())
        .collect();
    let csv_roots: Vec<f64> = rows[1..].iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(roots, csv_roots);
}

#[test]
fn table_one_matches_and_exact_forms_hold() {
    let o = run(&["tables", "--which", "1", "--n", "2..6"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&run(&["tables", "--which", "1", "--n", "2", "--exact"])), 0);
    assert_eq!(code(&run(&["tables", "--which", "2", "--n", "3", "--exact"])), 0);
    assert_eq!(code(&run(&["tables", "--which", "2", "--n", "4", "--exact"])), 2);
}

#[test]
fn table_two_reports_the_rows_that_disagree() {
    let o = run(&["tables", "--which", "2", "--n", "3..7"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    let bad: Vec<String> =
        v["mismatches"].as_array().unwrap().iter().map(|m| m.as_str().unwrap().to_string()).collect();
    assert!(!bad.is_empty());
    assert!(bad.iter().all(|m| m.starts_with("Xij(1,2)@n=4:") || m.starts_with("Xij(1,2)@n=7:")), "{bad:?}");
    for n in [3, 5, 6] {
        assert_eq!(code(&run(&["tables", "--which", "2", "--n", &n.to_string()])), 0, "n = {n}");
    }
}

#[test]
fn text_table_layout() {
    let o = run(&["tables", "--which", "1", "--n", "3", "--format", "text-table"]);
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.contains("-0.2230465, 0.7729361, 1.4501104"), "{s}");
    assert!(s.contains("0 <= (X)_LHV <= 2"), "{s}");
}

#[test]
fn hardy_max_then_check_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("max.json");
    let o = run(&["hardy", "max", "--variant", "i", "--indices", "1,2", "--n", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let best = v["result"]["best_value"].as_f64().unwrap();
    assert!((best - (5.0 * 5f64.sqrt() - 11.0) / 2.0).abs() < 1e-6, "{best}");
    let state = dir.path().join("state.json");
    let frame = dir.path().join("frame.json");
    std::fs::write(&state, v["result"]["state"].to_string()).unwrap();
    std::fs::write(&frame, v["result"]["frame"].to_string()).unwrap();
    let args = ["hardy", "check", "--variant", "i", "--indices", "1,2", "--n", "3"];
    let o = run(&[&args[..], &["--state", state.to_str().unwrap(), "--frame", frame.to_str().unwrap()]].concat());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["result"]["lhv_violated"], true);
    assert!((r["result"]["target"].as_f64().unwrap() - best).abs() < 1e-12);
}

#[test]
fn hardy_check_without_violation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("s.json");
    let frame = dir.path().join("f.json");
    // |00> in the default frame: every primed outcome is equally likely and
    // the unprimed outcome is certain, so the conclusion is nonzero.
    std::fs::write(&state, "[[1,0],[0,0],[0,0],[0,0]]").unwrap();
    std::fs::write(&frame, r#"{"unprimed":[[0,0,1],[0,0,1]],"primed":[[1,0,0],[1,0,0]]}"#).unwrap();
    let o = run(&[
        "hardy",
        "check",
        "--variant",
        "standard",
        "--state",
        state.to_str().unwrap(),
        "--frame",
        frame.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&o)["result"]["lhv_violated"], false);
}

#[test]
fn scan_finds_the_golden_optimum() {
    let o = run(&["hardy", "scan-n3", "--resolution", "200"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!((v["result"]["value"].as_f64().unwrap() - 0.0901699437494742).abs() < 1e-9);
}

#[test]
fn verify_passes_and_only_selects() {
    let o = run(&["verify", "--n-max", "4", "--samples", "10"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = run(&["verify", "--only", "master-identity", "--n-max", "8"]);
    assert_eq!(code(&o), 0);
    let results = json(&o)["results"].as_array().unwrap().clone();
    assert_eq!(results.len(), 8);
    assert!(results.iter().all(|r| r["property"] == "master-identity"));
}

#[test]
fn same_seed_gives_identical_bytes() {
    let a = run(&["hardy", "max", "--variant", "standard", "--n", "2", "--starts", "4", "--seed", "7"]);
    let b = run(&["hardy", "max", "--variant", "standard", "--n", "2", "--starts", "4", "--seed", "7"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let a = run(&["verify", "--only", "op-prob-consistency", "--n-max", "3", "--samples", "5", "--seed", "3"]);
    let b = run(&["verify", "--only", "op-prob-consistency", "--n-max", "3", "--samples", "5", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&["lhv-bounds", "--n", "3"])), 2);
    assert_eq!(code(&run(&["lhv-bounds", "--member", "Xij", "--n", "3", "--indices", "2,1"])), 2);
    assert_eq!(code(&run(&["verify", "--only", "nonsense"])), 2);
    assert_eq!(code(&run(&["tables", "--which", "3"])), 2);
    assert_eq!(code(&run(&["no-such-command"])), 2);
    assert_eq!(code(&run(&["lhv-bounds", "--member", "X", "--n", "3", "--format", "xml"])), 2);
}

#[test]
fn resource_caps_exit_three() {
    assert_eq!(code(&run(&["lhv-bounds", "--member", "X", "--n", "13"])), 3);
    assert_eq!(code(&run(&["lhv-bounds", "--member", "X", "--n", "6", "--cap", "5"])), 3);
    assert_eq!(code(&run(&["hardy", "max", "--variant", "standard", "--n", "7"])), 3);
    assert_eq!(code(&run(&["verify", "--n-max", "13"])), 3);
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.conf", "# defaults\nmember = Xij\nindices = 1,2\nn = 3..4\nformat = csv\n");
    let o = run(&["lhv-bounds", "--config", &cfg]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(rows.len(), 3);
    let o = run(&["lhv-bounds", "--config", &cfg, "--n", "5", "--format", "json"]);
    let v = json(&o);
    assert_eq!(v["results"].as_array().unwrap().len(), 1);
    assert_eq!(v["results"][0]["member"], "Xij(1,2)@n=5");
    let bad = write(dir.path(), "bad.conf", "colour = red\n");
    assert_eq!(code(&run(&["lhv-bounds", "--config", &bad])), 2);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_hardy-chain"))
        .args(["lhv-bounds", "--member", "X", "--n", "3", "--format", "csv"])
        .env("HARDY_CHAIN_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("lhv-bounds"));
    let text = std::fs::read_to_string(dir.path().join("lhv-bounds.csv")).unwrap();
    assert!(text.starts_with("member,n,min,max"));
}

#[test]
fn hardy_check_on_the_explicit_optimal_state() {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = [0.0; 8];
    c[0b001] = g;
    c[0b100] = g;
    c[0b101] = -g * g.sqrt();
    let state = hardy_chain::quantum::StateVector::from_outcome_coefficients(&c).unwrap();
    let frame = hardy_chain::hardy::explicit_optimal_params().frame();
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "state.json", &serde_json::to_string(&state).unwrap());
    let f = write(dir.path(), "frame.json", &serde_json::to_string(&frame).unwrap());
    let o = run(&["hardy", "check", "--variant", "i", "--state", &s, "--frame", &f]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&o);
    assert_eq!(r["result"]["variant"], "Xij(1,2)@n=3");
    assert_eq!(r["result"]["lhv_violated"], true);
    assert!((r["result"]["target"].as_f64().unwrap() - 0.0901699437494742).abs() < 1e-12);
}
