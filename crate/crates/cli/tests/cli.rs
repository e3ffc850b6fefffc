use std::path::Path;
use std::process::{Command, Output};

fn expldp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expldp"))
        .args(args)
        .output()
        .expect("spawn expldp")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const HW_FILES: [&str; 4] = ["posterior_rate", "decay_rates", "pythagoras", "mle_oracle"];

#[test]
fn lists_every_scenario() {
    let o = expldp(&["scenario", "list"]);
    assert!(o.status.success());
    let out = stdout(&o);
    for name in [
        "hardy-weinberg",
        "gauss-mean-eq-sd",
        "strip-boundary",
        "poisson-landau",
    ] {
        assert!(out.contains(name), "{name} missing from\n{out}");
    }
}

fn run_into(dir: &Path, format: &str) {
    let o = expldp(&[
        "scenario",
        "run",
        "hardy-weinberg",
        "--out",
        dir.to_str().unwrap(),
        "--format",
        format,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn hardy_weinberg_writes_expected_files_and_reruns_identically() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_into(a.path(), "csv");
    run_into(b.path(), "csv");
    for name in HW_FILES {
        let file = format!("{name}.csv");
        let first = std::fs::read(a.path().join(&file)).unwrap();
        let second = std::fs::read(b.path().join(&file)).unwrap();
        assert!(!first.is_empty());
        assert!(!first.contains(&b'\r'), "{file} has CR line endings");
        assert_eq!(first, second, "{file} differs between runs");
    }
    let csv = std::fs::read_to_string(a.path().join("posterior_rate.csv")).unwrap();
    assert!(csv.starts_with("coordinate,rate"));
}

#[test]
fn json_output_parses() {
    let dir = tempfile::tempdir().unwrap();
    run_into(dir.path(), "json");
    for name in HW_FILES {
        let text = std::fs::read_to_string(dir.path().join(format!("{name}.json"))).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["name"], name);
        assert!(v["rows"].as_array().is_some_and(|r| !r.is_empty()));
    }
}

#[test]
fn legendre_prints_conjugate_json() {
    let o = expldp(&["legendre", "--family", "poisson", "--t", "2"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let value = v["value"].as_f64().unwrap();
    assert!((value - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-10);
    assert_eq!(v["converged"], true);
}

#[test]
fn posterior_rate_accepts_negative_lists() {
    let o = expldp(&[
        "rate",
        "posterior",
        "--model",
        "hw-line",
        "--support",
        "-3,3",
        "--mu0",
        "0.3,0.2",
        "--grid",
        "-1,0",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let zero = out.lines().find(|l| l.starts_with("0,")).unwrap();
    let rate: f64 = zero[2..].parse().unwrap();
    assert!((rate - 0.0100167337).abs() < 1e-9);
}

#[test]
fn verify_dual_passes() {
    let o = expldp(&["verify", "--filter", "dual"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(
        stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(),
        2
    );
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        expldp(&["scenario", "run", "no-such-scenario"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(expldp(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        expldp(&["legendre", "--family", "poisson", "--t", "-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        expldp(&["verify", "--filter", "nothing-matches-this"])
            .status
            .code(),
        Some(2)
    );
}
