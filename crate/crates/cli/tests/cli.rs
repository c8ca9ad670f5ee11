use std::path::PathBuf;
use std::process::{Command, Output};

use liouville_cli::ReportRecord;

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liouville")).args(args).output().expect("binary runs")
}

fn records(out: &Output) -> Vec<ReportRecord> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("ndjson record"))
        .collect()
}

fn temp_file(name: &str, body: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("liouville-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn classical_action_genus_two() {
    let out = run(&["classical-action", "--scenario", scenario("genus2.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let recs = records(&out);
    let s = recs.iter().find(|r| r.quantity == "classical_action.S").unwrap();
    assert!(s.pass);
    assert!(!recs.iter().any(|r| r.quantity.contains("elliptic")));
    // summary table on stderr
    assert!(String::from_utf8_lossy(&out.stderr).contains("records, 0 failed"));
}

#[test]
fn records_sorted_and_self_consistent() {
    for cmd in ["classical-action", "holography", "tz"] {
        let out = run(&[cmd, "--scenario", scenario("torus_2_3.json").to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        let recs = records(&out);
        assert!(!recs.is_empty());
        assert!(recs.windows(2).all(|w| w[0].quantity <= w[1].quantity));
        assert!(recs.iter().all(|r| r.pass == r.recomputed_pass()));
    }
}

#[test]
fn output_is_deterministic() {
    let path = scenario("torus_2_3.json");
    let args = ["tz", "--scenario", path.to_str().unwrap(), "--seed", "99"];
    let strip = |mut v: Vec<ReportRecord>| {
        v.iter_mut().for_each(|r| r.runtime_ms = 0.0);
        v
    };
    assert_eq!(strip(records(&run(&args))), strip(records(&run(&args))));
}

#[test]
fn decay_scans_pass() {
    let path = scenario("sphere_6_6_6.json");
    for which in ["cusp_w2", "elliptic_w2", "cusp_w1"] {
        let out = run(&["decay-scan", which, "--scenario", path.to_str().unwrap(), "--ladder", "4:8"]);
        assert_eq!(out.status.code(), Some(0), "{which}");
        let recs = records(&out);
        assert!(recs.iter().any(|r| r.quantity.ends_with("magnitude[k=08]")));
        assert!(!recs.iter().any(|r| r.quantity.contains("k=09")));
    }
}

#[test]
fn table_format_goes_to_stdout() {
    let out = run(&["holography", "--scenario", scenario("genus2.json").to_str().unwrap(), "--format", "table"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("quantity"));
    assert!(text.contains("holography.E.algebraic"));
}

#[test]
fn impossible_tolerance_fails_with_status_one() {
    let out = run(&["classical-action", "--scenario", scenario("sphere_6_6_6.json").to_str().unwrap(), "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(records(&out).iter().any(|r| !r.pass));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let genus2 = scenario("genus2.json");
    assert_eq!(run(&["decay-scan", "cusp", "--scenario", genus2.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["tz"]).status.code(), Some(2));
    assert_eq!(run(&["tz", "--scenario", "/nonexistent/x.json"]).status.code(), Some(2));

    let broken = temp_file("broken.json", "{\n \"signature\": {\"g\": 1,\n  \"n\": }\n}");
    let out = run(&["tz", "--scenario", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let bad_order = temp_file("order.json", r#"{"signature": {"g": 1, "n": 0, "orders": [1]}}"#);
    assert_eq!(run(&["classical-action", "--scenario", bad_order.to_str().unwrap()]).status.code(), Some(2));

    let sphere = temp_file("sphere.json", r#"{"signature": {"g": 0, "n": 0}}"#);
    assert_eq!(run(&["classical-action", "--scenario", sphere.to_str().unwrap()]).status.code(), Some(2));
    for p in [broken, bad_order, sphere] {
        let _ = std::fs::remove_file(p);
    }
}
