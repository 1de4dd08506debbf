use std::process::{Command, Output};

use serde_json::Value;

fn weylpath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weylpath"))
        .args(args)
        .env_remove("WEYLPATH_OUTPUT_DIR")
        .output()
        .expect("spawn weylpath")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn rectangle_loop_report() {
    let out = weylpath(&["loop-phase", "--dx", "1", "--dk", "0.5"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["results"]["phase"].as_f64().unwrap() + 0.5).abs() < 1e-10);
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));

    let zero = json(&weylpath(&["loop-phase", "--dx", "0", "--dk", "7"]));
    assert_eq!(zero["results"]["phase"].as_f64().unwrap(), 0.0);
}

#[test]
fn invalid_input_gives_one_json_error_line() {
    for args in [
        &["loop-phase", "--n-points", "7"][..],
        &["mass-spread", "--preset", "lhc"][..],
        &[
            "mass-spread",
            "--m0",
            "1",
            "--energy",
            "0.5",
            "--delta-p",
            "1",
        ][..],
        &["trajectory", "--k0", "1,1"][..],
        &["loop-phase", "--sigma", "abc"][..],
    ] {
        let out = weylpath(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        let stderr = String::from_utf8(out.stderr).unwrap();
        let lines: Vec<&str> = stderr.lines().collect();
        assert_eq!(lines.len(), 1, "{stderr}");
        let err: Value = serde_json::from_str(lines[0]).unwrap();
        assert!(err["error"].is_string() && err["message"].is_string());
    }
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"dx": 2.0, "dk": 0.25}"#).unwrap();
    let out = weylpath(&["loop-phase", "--dx", "1", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    assert!((json(&out)["results"]["phase"].as_f64().unwrap() + 0.5).abs() < 1e-10);

    std::fs::write(&cfg, r#"{"dx": "wide"}"#).unwrap();
    let out = weylpath(&["loop-phase", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_weylpath"))
        .args([
            "trajectory",
            "--n-steps",
            "100",
            "--format",
            "csv",
            "--output",
            "traj.csv",
        ])
        .env("WEYLPATH_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("traj.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "s,x0,x1,k0,k1,action_so_far");
    assert_eq!(lines.count(), 101);
}

#[test]
fn exit_code_follows_checks() {
    // 20-sample Monte-Carlo estimates are noisy enough that some seeds land
    // outside the 4-standard-error band.
    let mut failures = 0;
    for seed in 0..16 {
        let seed = seed.to_string();
        let out = weylpath(&[
            "mass-spread",
            "--preset",
            "tevatron-proton",
            "--mc-samples",
            "20",
            "--mc-chunks",
            "2",
            "--seed",
            &seed,
        ]);
        let passed = json(&out)["passed"].as_bool().unwrap();
        assert_eq!(out.status.code(), Some(if passed { 0 } else { 1 }));
        failures += usize::from(!passed);
    }
    assert!(failures > 0);

    let dir = tempfile::tempdir().unwrap();
    let square = dir.path().join("square.csv");
    std::fs::write(&square, "x0,k0\n0,0\n1,0\n1,1\n0,1\n0,0\n").unwrap();
    let out = weylpath(&[
        "loop-phase",
        "--path",
        square.to_str().unwrap(),
        "--steps",
        "64",
    ]);
    assert!(out.status.success());
    assert!((json(&out)["results"]["phase"].as_f64().unwrap() + 1.0).abs() < 1e-12);
}

#[test]
fn sweep_is_sorted_by_energy() {
    let out = weylpath(&[
        "mass-spread",
        "--preset",
        "tevatron-proton",
        "--sweep",
        "5e5,2e3,9.8e5",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let energies: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(energies, vec![2e3, 5e5, 9.8e5]);
}

#[test]
fn transport_reports_boundary_terms() {
    let v = json(&weylpath(&[
        "transport",
        "--preset",
        "segment",
        "--dx",
        "1",
        "--dk",
        "0.5",
        "--steps",
        "64",
    ]));
    let r = &v["results"];
    assert!((r["unwrapped_phase"].as_f64().unwrap() - 0.25).abs() < 1e-10);
    assert!((r["action"].as_f64().unwrap() + 0.25).abs() < 1e-12);
    assert!((r["boundary"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}
