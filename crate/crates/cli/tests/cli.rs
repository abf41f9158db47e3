use std::process::{Command, Output};

use serde_json::Value;

fn qdw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdw"))
        .args(args)
        .env_remove("QDW_THREADS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = qdw(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn s3_lagrangian_vector() {
    let r = json(&["lagrangian", "--group", "symmetric:3", "--subgroup", "e,(12)"]);
    let res = &r["results"];
    assert_eq!(res["formula"], "A+C+D");
    assert_eq!(res["multiplicities"], serde_json::json!([1, 0, 1, 1, 0, 0, 0, 0]));
    assert_eq!(r["passed"], true);
    assert!(res["validated_by"].as_array().unwrap().iter().any(|v| v == "dimension-sum"));

    let r = json(&["lagrangian", "--group", "symmetric:3", "--subgroup", "cyclic:(123)"]);
    assert_eq!(r["results"]["formula"], "A+B+2F");
}

#[test]
fn toric_code_torus_dimension() {
    let r = json(&["gsd", "--group", "cyclic:2", "--lattice", "torus:2x2"]);
    assert_eq!(r["results"]["dimension"], 4);
    let names: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["methods-agree", "torus-anyon-count"]);
}

#[test]
fn trivial_group_has_one_anyon() {
    let r = json(&["anyons", "--group", "cyclic:1"]);
    assert_eq!(r["results"]["count"], 1);
    assert_eq!(r["results"]["anyons"][0]["key"], "C0-pi0");
    assert_eq!(r["results"]["anyons"][0]["dim"], 1);
}

#[test]
fn json_output_is_reproducible() {
    let args = ["logical", "--group", "cyclic:3", "--lattice", "annulus:3x3", "--subgroup", "trivial"];
    let a = qdw(&args);
    let b = qdw(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let dumped = qdw(&["qudit-dim", "--group", "cyclic:3", "--subgroup", "trivial", "--subgroup2", "trivial", "--dump-config"]);
    assert_eq!(code(&dumped), 0);
    let path = dir.path().join("run.json");
    std::fs::write(&path, &dumped.stdout).unwrap();
    let from_file = qdw(&["--config", path.to_str().unwrap()]);
    let from_flags = qdw(&["qudit-dim", "--group", "cyclic:3", "--subgroup", "trivial", "--subgroup2", "trivial"]);
    assert_eq!(code(&from_file), 0);
    assert_eq!(from_file.stdout, from_flags.stdout);
    let r: Value = serde_json::from_slice(&from_file.stdout).unwrap();
    assert_eq!(r["results"]["dimension"], 3);

    // flags override the file
    let over = json(&["--config", path.to_str().unwrap(), "--subgroup2", "full"]);
    assert_eq!(over["results"]["dimension"], 1);

    std::fs::write(&path, r#"{"command": "anyons", "group": "cyclic:2", "extra": 1}"#).unwrap();
    assert_eq!(code(&qdw(&["--config", path.to_str().unwrap()])), 2);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("anyons.csv");
    let out = qdw(&["anyons", "--group", "cyclic:2", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("key,letter,"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn csv_only_for_flat_tables() {
    let out = qdw(&["qudit-dim", "--group", "cyclic:2", "--subgroup", "trivial", "--subgroup2", "full", "--format", "csv"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("CSV"));
    let out = qdw(&["lagrangian", "--group", "symmetric:3", "--subgroup", "e,(12)", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "key,letter,dim,multiplicity");
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["bogus", "--group", "cyclic:2"][..],
        &["anyons"][..],
        &["anyons", "--group", "cyclic:2", "--no-such-flag"][..],
        &["anyons", "--group", "nonsense"][..],
        &["lagrangian", "--group", "symmetric:3"][..],
        &["lagrangian", "--group", "symmetric:3", "--subgroup", "(12),(13)"][..],
        &["gsd", "--group", "cyclic:2"][..],
        &["logical", "--group", "symmetric:3", "--lattice", "annulus:3x3"][..],
        &["gsd", "--group", "cyclic:2", "--lattice", "torus:2x2", "--method", "magic"][..],
        &["anyons", "--group", "cyclic:2", "--tolerance", "-1"][..],
    ] {
        let out = qdw(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn failed_audit_exits_with_one_and_names_the_check() {
    let out = qdw(&[
        "lattice-audit",
        "--group",
        "symmetric:3",
        "--lattice",
        "annulus:3x3",
        "--subgroup",
        "e,(12)",
        "--rim-gauge",
        "all",
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("check failed: commutation"));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["passed"], false);
    assert!(!r["results"]["audit"]["noncommuting"].as_array().unwrap().is_empty());

    let ok = qdw(&["lattice-audit", "--group", "symmetric:3", "--lattice", "annulus:3x3", "--subgroup", "e,(12)"]);
    assert_eq!(code(&ok), 0);
}

#[test]
fn explicit_cayley_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z3.json");
    std::fs::write(&path, r#"{"order": 3, "table": [0,1,2, 1,2,0, 2,0,1], "names": ["e","a","b"]}"#).unwrap();
    let group = format!("@{}", path.display());
    let r = json(&["anyons", "--group", &group]);
    assert_eq!(r["results"]["count"], 9);
    let r = json(&["group-info", "--group", r#"{"order": 2, "table": [0,1,1,0]}"#]);
    assert_eq!(r["results"]["order"], 2);
    assert_eq!(r["passed"], true);
}

#[test]
fn logical_qutrit_with_named_generators() {
    let r = json(&[
        "logical",
        "--group",
        "cyclic:3",
        "--lattice",
        "annulus:5x5",
        "--subgroup",
        "trivial",
        "--tunnel",
        "X=C0-pi1:0->1",
        "--loop",
        "Z=C1-pi0@1",
        "--ring",
        "2",
        "--offset",
        "1",
    ]);
    assert_eq!(r["results"]["encoding"]["d"], 3);
    let rel = r["results"]["relations"].as_array().unwrap();
    let xz = rel.iter().find(|x| x["lhs"] == "X Z").unwrap();
    let w = std::f64::consts::TAU / 3.0;
    assert!((xz["phase"][0].as_f64().unwrap() - w.cos()).abs() < 1e-10);
    assert!((xz["phase"][1].as_f64().unwrap() - w.sin()).abs() < 1e-10);
    assert!(rel.iter().any(|x| x["lhs"] == "X^3" && x["holds"] == true));
    assert!(rel.iter().any(|x| x["lhs"] == "Z^3" && x["holds"] == true));
}

#[test]
fn uncondensable_tunnel_is_a_usage_error() {
    let out = qdw(&[
        "logical", "--group", "cyclic:2", "--lattice", "annulus:3x3", "--subgroup", "trivial", "--tunnel", "C1-pi0:0->1",
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("condense"));
}

#[test]
fn charge_projectors_pass() {
    let r = json(&["charge-project", "--group", "cyclic:3", "--lattice", "annulus:3x3", "--subgroup", "trivial"]);
    assert_eq!(r["passed"], true);
    assert_eq!(r["results"]["ranks"], serde_json::json!([1, 1, 1, 0, 0, 0, 0, 0, 0]));
}

#[test]
fn pretty_output_lists_checks() {
    let out = qdw(&["excitations", "--group", "symmetric:3", "--subgroup", "e,(12)", "--format", "pretty"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[PASS] dimension-sum"));
    assert!(text.contains("T0-R0"));
}

#[test]
fn defect_between_s3_boundaries() {
    let r = json(&["defects", "--group", "symmetric:3", "--subgroup", "e,(12)", "--subgroup2", "cyclic:(123)"]);
    let d = r["results"]["defects"].as_array().unwrap();
    assert_eq!(d.len(), 1);
    assert!((d[0]["dim"].as_f64().unwrap() - 6f64.sqrt()).abs() < 1e-12);
}

#[test]
fn verify_all_small_groups() {
    for g in ["cyclic:1", "cyclic:3", "quaternion8"] {
        let r = json(&["verify-all", "--group", g]);
        assert_eq!(r["passed"], true, "{g}");
    }
}

#[test]
fn thread_count_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_qdw"))
        .args(["gsd", "--group", "cyclic:3", "--lattice", "torus:2x2", "--dump-config"])
        .env("QDW_THREADS", "2")
        .output()
        .unwrap();
    let cfg: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cfg["threads"], 2);
    let out = Command::new(env!("CARGO_BIN_EXE_qdw"))
        .args(["gsd", "--group", "cyclic:3", "--lattice", "torus:2x2"])
        .env("QDW_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
}
