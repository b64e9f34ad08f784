use std::process::Command;

use annular_rasmussen::cli::parse_rational;
use annular_rasmussen::Rational;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_annular-rasmussen"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let (code, stdout, stderr) = run(args);
    assert_eq!(code, 0, "{stderr}");
    serde_json::from_str(&stdout).expect("json document")
}

fn rat(v: &Value) -> Rational {
    parse_rational(v.as_str().expect("rational string")).unwrap()
}

#[test]
fn dt_at_one_is_the_writhe() {
    let v = json(&["dt", "2: 1 1 1", "--t", "1"]);
    assert_eq!(v["d"], "3");
    assert_eq!(v["writhe"], 3);
}

#[test]
fn profile_tent() {
    let v = json(&["profile", "3: -1 -1 -1 -1 -1 2 1 1 1 2", "--den", "8"]);
    let samples = v["samples"].as_array().unwrap();
    assert_eq!(samples.first().unwrap()["d"], "-3");
    assert_eq!(samples.last().unwrap()["d"], "-3");
    let mid = samples.iter().find(|s| s["t"] == "1").unwrap();
    assert_eq!(mid["d"], "0");
    for s in samples {
        for key in ["t", "d"] {
            let text = s[key].as_str().unwrap();
            assert_eq!(rat(&s[key]).to_string(), text, "not in lowest terms");
        }
    }
    let segs = v["segments"].as_array().unwrap();
    assert_eq!(segs.len(), 2);
    assert_eq!(segs[0]["slope"], "3");
    assert_eq!(segs[1]["slope"], "-3");
}

#[test]
fn report_flags_a00() {
    let v = json(&["report", "4: 3 -2 -2 3 3 2 -3 -1 2 1 1"]);
    assert_eq!(v["reports"]["qp"], "not_quasipositive");
    assert_eq!(v["reports"]["rv"], true);
    assert_eq!(v["reports"]["in_S"], false);
    assert_eq!(v["s_invariant"], 2);
    assert_eq!(v["sl"], -1);
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let base = ["profile", "3: 1 2 -1 2 2", "--den", "12"];
    let (_, one, _) = run(&[&base[..], &["--threads", "1"]].concat());
    let (_, four, _) = run(&[&base[..], &["--threads", "4"]].concat());
    assert_eq!(one, four);
}

#[test]
fn csv_and_text_formats() {
    let (code, csv, _) = run(&["profile", "2: 1", "--den", "2", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(csv, "t,d\n0,-1\n1/2,0\n1,1\n3/2,0\n2,-1\n");
    let (code, text, _) = run(&["dt", "2: 1", "--t", "0.25", "--format", "text"]);
    assert_eq!(code, 0);
    assert_eq!(text, "d_1/4 = -1/2\n");
}

#[test]
fn exit_codes() {
    let (code, _, err) = run(&["dt", "2: 5", "--t", "1"]);
    assert_eq!(code, 1, "{err}");
    let (code, _, _) = run(&["dt", "2: 1", "--t", "5/2"]);
    assert_eq!(code, 1);
    let (code, _, err) = run(&["profile", "3: 1 2 1 2 1 2", "--cap", "16"]);
    assert_eq!(code, 2);
    let v: Value = serde_json::from_str(&err).unwrap();
    assert_eq!(v["error"], "resource_cap");
    let count: u64 = v["generators"].as_str().unwrap().parse().unwrap();
    assert!(count > 16);
    assert_eq!(v["cap"], 16);
    let out = bin()
        .args(["profile", "3: 1 2 1 2 1 2"])
        .env("ANNULAR_RASMUSSEN_CAP", "16")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_reports_every_check() {
    let v = json(&["verify", "3: 1 -2 1", "--den", "6", "--oracle"]);
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"greedy equals oracle"));
    assert!(names.iter().any(|n| n.starts_with("stabilization")));
}
