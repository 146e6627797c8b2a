use std::path::Path;
use std::process::Command;

use qkt_cli::{run_args, EXIT_ACCEPT, EXIT_MALFORMED, EXIT_OBSTRUCTION, EXIT_REJECT};
use serde_json::Value;
use tempfile::TempDir;

fn write(dir: &Path, name: &str, text: &str) -> String {
    std::fs::write(dir.join(name), text).unwrap();
    dir.join(name).to_string_lossy().into_owned()
}

fn two_points(dir: &Path, rho: &str) -> String {
    write(dir, "s.json", &format!(r#"{{"points": ["a", "b"], "dist": [["0", "{rho}"], ["{rho}", "0"]]}}"#))
}

fn diag2(dir: &Path, name: &str, x: f64, y: f64) -> String {
    write(
        dir,
        name,
        &format!(
            r#"{{"schema": "matrix.v1", "space": "s.json", "fiber_dim": 1,
                "entries": [[[{x}, 0], [0, 0]], [[0, 0], [{y}, 0]]]}}"#
        ),
    )
}

fn class(dir: &Path, name: &str, diag: [f64; 2], l: usize) -> String {
    write(
        dir,
        name,
        &format!(
            r#"{{"schema": "class.v1", "degree": 0, "eps": "0.01", "r": "0", "l": {l},
                "matrix": {{"space": "s.json", "fiber_dim": 1,
                            "entries": [[[{}, 0], [0, 0]], [[0, 0], [{}, 0]]]}}}}"#,
            diag[0], diag[1]
        ),
    )
}

fn run(args: &[&str]) -> qkt_cli::Outcome {
    run_args(std::iter::once("qkt").chain(args.iter().copied()))
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).expect("json output")
}

#[test]
fn genuine_projection_is_accepted() {
    let dir = TempDir::new().unwrap();
    two_points(dir.path(), "1");
    let m = diag2(dir.path(), "p.json", 1.0, 0.0);
    let out = run(&["check", &m, "--eps", "0.1", "--r", "0"]);
    assert_eq!(out.code, EXIT_ACCEPT, "{}", out.stderr);
    let v = json(&out.stdout);
    assert_eq!(v["result"]["verdict"], "accept");
    assert_eq!(v["result"]["measured"]["defect"], 0.0);
    assert_eq!(v["inputs"][0]["name"], "p.json");
}

#[test]
fn large_defect_is_rejected_with_the_measured_gap() {
    let dir = TempDir::new().unwrap();
    two_points(dir.path(), "1");
    let m = diag2(dir.path(), "p.json", 0.9, 0.05);
    let out = run(&["check", &m, "--eps", "0.05", "--r", "0"]);
    assert_eq!(out.code, EXIT_REJECT);
    let v = json(&out.stdout);
    assert_eq!(v["result"]["verdict"], "reject");
    let defect = v["result"]["measured"]["defect"].as_f64().unwrap();
    assert!((defect - 0.09).abs() < 1e-12);
    let gap = v["result"]["measured"]["gap_halfwidth"].as_f64().unwrap();
    assert!((gap - 0.4).abs() < 1e-12);
    // the same matrix passes at a looser eps
    assert_eq!(run(&["check", &m, "--eps", "0.1", "--r", "0"]).code, EXIT_ACCEPT);
}

#[test]
fn propagation_over_budget_is_rejected() {
    let dir = TempDir::new().unwrap();
    two_points(dir.path(), "2");
    let m = write(
        dir.path(),
        "p.json",
        r#"{"space": "s.json", "fiber_dim": 1, "entries": [[[0.5, 0], [0.5, 0]], [[0.5, 0], [0.5, 0]]]}"#,
    );
    assert_eq!(run(&["check", &m, "--eps", "0.1", "--r", "1"]).code, EXIT_REJECT);
    assert_eq!(run(&["check", &m, "--eps", "0.1", "--r", "2"]).code, EXIT_ACCEPT);
}

#[test]
fn malformed_inputs_exit_one() {
    let dir = TempDir::new().unwrap();
    two_points(dir.path(), "1");
    let truncated = write(dir.path(), "bad.json", r#"{"space": "s.json", "fiber_dim": 1, "entries": [[[1, 0"#);
    let out = run(&["check", &truncated, "--eps", "0.1", "--r", "0"]);
    assert_eq!(out.code, EXIT_MALFORMED);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.contains("malformed JSON"));

    let m = diag2(dir.path(), "p.json", 1.0, 0.0);
    assert_eq!(run(&["check", &m, "--eps", "0.25", "--r", "0"]).code, EXIT_MALFORMED);
    assert_eq!(run(&["check", &m, "--eps", "0.1", "--r", "-1"]).code, EXIT_MALFORMED);
    assert_eq!(run(&["check", "missing.json", "--eps", "0.1", "--r", "0"]).code, EXIT_MALFORMED);
    assert_eq!(run(&["no-such-command"]).code, EXIT_MALFORMED);

    let wrong_schema =
        write(dir.path(), "w.json", r#"{"schema": "class.v1", "space": "s.json", "fiber_dim": 1, "entries": []}"#);
    assert_eq!(run(&["check", &wrong_schema, "--eps", "0.1", "--r", "0"]).code, EXIT_MALFORMED);
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(run(&["--help"]).code, EXIT_ACCEPT);
    assert_eq!(run(&["--version"]).code, EXIT_ACCEPT);
}

#[test]
fn trivial_class_has_radius_zero() {
    let dir = TempDir::new().unwrap();
    two_points(dir.path(), "3");
    let c = class(dir.path(), "c.json", [1.0, 0.0], 1);
    let out = run(&["profile", &c, "--grid-eps", "0.1", "--grid-r", "0"]);
    assert_eq!(out.code, EXIT_ACCEPT, "{}", out.stderr);
    let rows: Vec<&str> = out.stdout.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows, ["eps_prime,r_prime,verdict,min_certified_r_prime", "0.1,0,certified,0"]);
    assert!(out.stdout.starts_with("# tool_version="));
}

#[test]
fn moving_a_unit_needs_the_distance() {
    let dir = TempDir::new().unwrap();
    two_points(dir.path(), "3");
    let c = class(dir.path(), "c.json", [0.0, 1.0], 1);
    let out = run(&["profile", &c, "--grid-eps", "0.05,0.2", "--grid-r", "0,1,2,3,4"]);
    assert_eq!(out.code, EXIT_ACCEPT, "{}", out.stderr);
    for line in out.stdout.lines().filter(|l| !l.starts_with('#')).skip(1) {
        assert!(line.ends_with(",3"), "{line}");
    }
}

#[test]
fn nonzero_rank_class_is_an_obstruction() {
    let dir = TempDir::new().unwrap();
    two_points(dir.path(), "1");
    let c = class(dir.path(), "c.json", [1.0, 1.0], 1);
    let out = run(&["profile", &c, "--grid-eps", "0.1", "--grid-r", "0,1"]);
    assert_eq!(out.code, EXIT_OBSTRUCTION);
    assert!(out.stderr.contains("obstruction"));
}

#[test]
fn bad_grids_are_malformed() {
    let dir = TempDir::new().unwrap();
    two_points(dir.path(), "1");
    let c = class(dir.path(), "c.json", [1.0, 0.0], 1);
    assert_eq!(run(&["profile", &c, "--grid-eps", "0.2,0.1", "--grid-r", "0"]).code, EXIT_MALFORMED);
    assert_eq!(run(&["profile", &c, "--grid-eps", "0.1", "--grid-r", "2,1"]).code, EXIT_MALFORMED);
    assert_eq!(run(&["profile", &c, "--grid-eps", "", "--grid-r", "0"]).code, EXIT_MALFORMED);
    let s = dir.path().join("s.json").to_string_lossy().into_owned();
    let out = run(&["probe-qi", &s, "--d", "1", "--r", "1", "--eps", "0.1", "--grid-d", "3,2"]);
    assert_eq!(out.code, EXIT_MALFORMED);
}

#[test]
fn connect_rank_mismatch_is_an_obstruction() {
    let dir = TempDir::new().unwrap();
    two_points(dir.path(), "1");
    let p = diag2(dir.path(), "p.json", 1.0, 0.0);
    let q = diag2(dir.path(), "q.json", 1.0, 1.0);
    assert_eq!(run(&["connect", &p, &q, "--eps", "0.2", "--r", "1"]).code, EXIT_OBSTRUCTION);
}

#[test]
fn connect_within_and_beyond_budget() {
    let dir = TempDir::new().unwrap();
    two_points(dir.path(), "2");
    let p = diag2(dir.path(), "p.json", 1.0, 0.0);
    let q = diag2(dir.path(), "q.json", 0.0, 1.0);
    let ok = run(&["connect", &p, &q, "--eps", "0.2", "--r", "2"]);
    assert_eq!(ok.code, EXIT_ACCEPT, "{}", ok.stderr);
    let v = json(&ok.stdout);
    assert!(v["result"]["eps_eff"].as_f64().unwrap() < 0.2);
    assert_eq!(run(&["connect", &p, &q, "--eps", "0.2", "--r", "1"]).code, EXIT_REJECT);
}

#[test]
fn vacuous_injectivity_holds_at_d() {
    let dir = TempDir::new().unwrap();
    let s = write(dir.path(), "pt.json", r#"{"points": ["x"], "dist": [["0"]]}"#);
    let out = run(&["probe-qi", &s, "--d", "1", "--r", "1", "--eps", "0.1", "--grid-d", "1,2"]);
    assert_eq!(out.code, EXIT_ACCEPT, "{}", out.stderr);
    let v = json(&out.stdout);
    assert_eq!(v["result"]["summary"], "holds at d'=1");
    assert_eq!(v["result"]["statement"], "QI");
    assert!(v["result"]["scope"].as_str().unwrap().starts_with("scope:"));
}

#[test]
fn group_projection_of_z2() {
    let out = run(&["group-proj", "--group", "cyclic:2", "--d", "1"]);
    assert_eq!(out.code, EXIT_ACCEPT, "{}", out.stderr);
    let v = json(&out.stdout);
    assert_eq!(v["result"]["invariance_residual"], 0.0);
    assert_eq!(run(&["group-proj", "--group", "cyclic:2", "--d", "1/2"]).code, EXIT_REJECT);
    assert_eq!(run(&["group-proj", "--group", "dihedral", "--d", "1"]).code, EXIT_MALFORMED);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = TempDir::new().unwrap();
    two_points(dir.path(), "1");
    let m = diag2(dir.path(), "p.json", 1.0, 0.0);
    let target = dir.path().join("report.json");
    let out = run(&["--out", target.to_str().unwrap(), "check", &m, "--eps", "0.1", "--r", "0"]);
    assert_eq!(out.code, EXIT_ACCEPT);
    assert!(out.stdout.is_empty());
    assert_eq!(json(&std::fs::read_to_string(target).unwrap())["schema"], "check.v1");
}

#[test]
fn seeded_generation_is_reproducible() {
    let a = run(&["--seed", "9", "gen-space", "--kind", "random", "--n", "6"]);
    let b = run(&["--seed", "9", "gen-space", "--kind", "random", "--n", "6"]);
    let c = run(&["--seed", "10", "gen-space", "--kind", "random", "--n", "6"]);
    assert_eq!(a.code, EXIT_ACCEPT);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn binary_reports_exit_codes() {
    let dir = TempDir::new().unwrap();
    two_points(dir.path(), "1");
    diag2(dir.path(), "p.json", 0.9, 0.05);
    let status = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_qkt")).current_dir(dir.path()).args(args).output().unwrap().status.code()
    };
    assert_eq!(status(&["check", "p.json", "--eps", "0.1", "--r", "0"]), Some(EXIT_ACCEPT));
    assert_eq!(status(&["check", "p.json", "--eps", "0.05", "--r", "0"]), Some(EXIT_REJECT));
    assert_eq!(status(&["check", "nope.json", "--eps", "0.05", "--r", "0"]), Some(EXIT_MALFORMED));
}
