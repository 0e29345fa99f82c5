use std::path::PathBuf;
use std::process::{Command, Output};

fn cran(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cran")).args(args).env("CRAN_THREADS", "2").output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cran-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn identity_scenario() -> PathBuf {
    let path = scratch("eye.json");
    std::fs::write(&path, r#"{"H": [[1.0, 0.0], [0.0, 1.0]], "sigma2": 1.0, "P": 100.0, "fronthaul": {"sum": 4.0}}"#)
        .unwrap();
    path
}

#[test]
fn fig2_writes_csv() {
    let out = scratch("sweep.csv");
    let o = cran(&["fig2", "--scenario", identity_scenario().to_str().unwrap(), "--out", out.to_str().unwrap(), "--grid", "8"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "C,R_zf,R_ddf,R_com,cutset,gap_com,gamma,seed");
    assert_eq!(lines.len(), 9);
}

#[test]
fn regions_reports_threshold() {
    let o = cran(&["regions", "--scenario", identity_scenario().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["threshold"].as_f64().unwrap() - 101f64.log2()).abs() < 1e-12);
    assert!((v["sum_rate_compression"].as_f64().unwrap() - (4.0 - (31f64 / 16.0).log2())).abs() < 1e-9);
    assert_eq!(v["feasibility"]["feasible"], false);
}

#[test]
fn verify_commands_emit_json_lines() {
    let o = cran(&["verify-theorem3", "--instances", "5", "--seed", "11", "--discrete"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 10);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["theorem"], 3);
    }
    let o = cran(&["verify-theorem4", "--instances", "3", "--seed", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn gap_summary_json() {
    let out = scratch("gap.json");
    let o = cran(&["gap-montecarlo", "--n", "4", "--seed", "1", "--grid", "8", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["n_channels"], 4);
}

#[test]
fn bad_scenario_exits_nonzero() {
    let o = cran(&["regions", "--scenario", "/nonexistent.json"]);
    assert!(!o.status.success());
}
