use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ugen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ugen")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn read(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn finite_count(v: &Value) -> usize {
    v["solutions"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|s| s["status"] == "finite")
        .count()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_solve_verify_katsura() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("k5.json");
    let o = ugen(&["gen", "--family", "katsura", "--n", "5", "--out", s(&sys)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(&sys)["equations"].as_array().unwrap().len(), 6);
    for method in ["ugen", "regen", "total-degree"] {
        let out = dir.path().join(format!("{method}.json"));
        let o = ugen(&["solve", "--method", method, "--system", s(&sys), "--seed", "3", "--out", s(&out)]);
        assert_eq!(code(&o), 0, "{method}: {}", String::from_utf8_lossy(&o.stderr));
        let v = read(&out);
        assert_eq!(finite_count(&v), 32, "{method}");
        assert_eq!(v["method"], method);
        let o = ugen(&["verify", "--system", s(&sys), "--solutions", s(&out)]);
        assert_eq!(code(&o), 0, "{method}: {}", String::from_utf8_lossy(&o.stdout));
    }
}

#[test]
fn tampered_solutions_fail_verification() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("k3.json");
    let out = dir.path().join("sol.json");
    assert_eq!(code(&ugen(&["gen", "--family", "katsura", "--n", "3", "--out", s(&sys)])), 0);
    assert_eq!(code(&ugen(&["solve", "--system", s(&sys), "--out", s(&out)])), 0);
    let mut v = read(&out);
    let x = v["solutions"][1]["coordinates"][0][2][0].as_f64().unwrap();
    v["solutions"][1]["coordinates"][0][2][0] = Value::from(x + 0.01);
    std::fs::write(&out, serde_json::to_string(&v).unwrap()).unwrap();
    let o = ugen(&["verify", "--system", s(&sys), "--solutions", s(&out)]);
    assert_eq!(code(&o), 2);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("solution 1"), "{stdout}");
}

#[test]
fn solving_twice_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("c4.json");
    assert_eq!(code(&ugen(&["gen", "--family", "katsura", "--n", "4", "--out", s(&sys)])), 0);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        assert_eq!(code(&ugen(&["solve", "--system", s(&sys), "--seed", "9", "--out", s(out)])), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn bench_prints_both_methods() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench.json");
    let o = ugen(&["bench", "--family", "cyclic", "--n", "5", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("machine"), "{stdout}");
    let v = read(&out);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert_eq!(r["distinct_solutions"], 70, "{r}");
    }
}

#[test]
fn bench_mle_runs_ugen_only() {
    let o = ugen(&["bench", "--family", "mle", "--n", "3", "--r", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("ugen") && !stdout.contains("regen"), "{stdout}");
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(code(&ugen(&[])), 1);
    assert_eq!(code(&ugen(&["frobnicate"])), 1);
    assert_eq!(code(&ugen(&["gen", "--family", "banded", "--n", "5", "--out", "x.json"])), 1);
    assert_eq!(code(&ugen(&["solve", "--system", "/nonexistent/s.json", "--out", "/tmp/o.json"])), 1);
    assert_eq!(code(&ugen(&["--help"])), 0);
}

#[test]
fn out_of_range_drop_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("k3.json");
    let out = dir.path().join("o.json");
    assert_eq!(code(&ugen(&["gen", "--family", "katsura", "--n", "3", "--out", s(&sys)])), 0);
    let o = ugen(&["solve", "--system", s(&sys), "--drop", "7", "--out", s(&out)]);
    assert_eq!(code(&o), 1);
    assert!(!out.exists());
}

#[test]
fn bad_tracker_flags_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("k3.json");
    assert_eq!(code(&ugen(&["gen", "--family", "katsura", "--n", "3", "--out", s(&sys)])), 0);
    let out = dir.path().join("o.json");
    for flags in [["--epsilon", "2"], ["--eliminate-after", "1.5"], ["--min-step", "-1"]] {
        let mut args = vec!["solve", "--system", s(&sys), "--out", s(&out)];
        args.extend(flags);
        assert_eq!(code(&ugen(&args)), 1, "{flags:?}");
    }
}
