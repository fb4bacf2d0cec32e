//! End-to-end tests of the `ifsw` binary: exit codes, report artifacts,
//! determinism and the diagnostic for systems without a positive
//! eigenfunction.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_ifsw")
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR")))
}

fn run(args: &[&str], out_dir: &Path) -> Output {
    Command::new(bin())
        .arg("--out")
        .arg(out_dir)
        .args(args)
        .env_remove("IFSW_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn report_json(dir: &Path, command: &str) -> serde_json::Value {
    let path = dir.join(format!("ifsw-{command}-report.json"));
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("missing report {}: {e}", path.display()));
    serde_json::from_str(&text).expect("report parses")
}

#[test]
fn pressure_on_a_valid_fixture_exits_zero_and_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["pressure", fixture("dyadic-exp.json").to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let report = report_json(dir.path(), "pressure");
    assert_eq!(report["command"], "pressure");
    assert_eq!(report["method"], "power");
    assert_eq!(report["converged"], true);
    let p = report["pressure"].as_f64().unwrap();
    assert!((p - 1.3132616875182228).abs() < 1e-6, "pressure {p}");

    // The same JSON also goes to stdout.
    let stdout: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(stdout, report);
}

#[test]
fn identical_config_and_seed_produce_byte_identical_reports() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = run(
            &["equilibrium", fixture("dyadic-exp.json").to_str().unwrap()],
            dir.path(),
        );
        assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    let ra = std::fs::read(a.path().join("ifsw-equilibrium-report.json")).unwrap();
    let rb = std::fs::read(b.path().join("ifsw-equilibrium-report.json")).unwrap();
    assert_eq!(ra, rb, "reports differ between identical runs");
}

#[test]
fn eigen_without_a_positive_eigenfunction_exits_two_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["eigen", fixture("example26-exp.json").to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("no positive eigenfunction"),
        "diagnostic missing from stderr: {stderr}"
    );

    // The report carries the stalled bracket and the a_N spread table.
    let report = report_json(dir.path(), "eigen");
    assert_eq!(report["function_side"]["converged"], false);
    assert!(report["diagnostic"]
        .as_str()
        .unwrap()
        .contains("no positive eigenfunction"));
    let spread = report["a_n_spread"].as_array().unwrap();
    assert!(!spread.is_empty());
    let last = spread.last().unwrap();
    assert!(last["spread"].as_f64().unwrap() > 0.01, "a_N spread should stay bounded away from 0");
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();

    // Unknown field.
    let bad = dir.path().join("unknown-field.json");
    std::fs::write(&bad, r#"{"dimension": 1, "maps": [["x / 2"]], "weights": ["1"], "grdi": 65}"#)
        .unwrap();
    let out = run(&["pressure", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));

    // Unparseable weight expression.
    let bad = dir.path().join("bad-expr.json");
    std::fs::write(
        &bad,
        r#"{"dimension": 1, "maps": [["x / 2"], ["x / 2 + 1 / 2"]], "weights": ["1 +", "1"]}"#,
    )
    .unwrap();
    let out = run(&["pressure", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("weights[0]"));

    // Missing file.
    let out = run(&["pressure", "does-not-exist.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    // Usage error: unknown subcommand (clap's default would be exit 2,
    // which is reserved for solver non-convergence).
    let out = run(&["frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    // Help still exits 0.
    let out = Command::new(bin()).arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_runs_the_suite_on_a_configured_system() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "--measure-tol",
            "1e-6",
            "verify",
            fixture("dyadic-exp.json").to_str().unwrap(),
        ],
        dir.path(),
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "output: {stdout}");
    assert!(stdout.contains("passed"));
    assert!(!stdout.contains("FAIL"));

    let report = report_json(dir.path(), "verify");
    let checks = report["checks"].as_array().unwrap();
    assert!(checks.len() >= 8);
    assert!(checks.iter().all(|c| c["status"] != "fail"));
}

#[test]
fn flag_overrides_reach_the_solvers() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "--grid",
            "257",
            "--seed",
            "7",
            "pressure",
            fixture("dyadic-exp.json").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let report = report_json(dir.path(), "pressure");
    assert_eq!(report["grid_nodes_per_axis"], 257);
}

#[test]
fn the_output_directory_env_variable_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(bin())
        .args(["validate", fixture("cantor.json").to_str().unwrap()])
        .env("IFSW_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("ifsw-validate-report.json").exists());
}

#[test]
fn eigen_writes_csv_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "eigen",
            fixture("dyadic-exp.json").to_str().unwrap(),
            "--csv",
            "h.csv",
            "--measure-csv",
            "mu.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let h = std::fs::read_to_string(dir.path().join("h.csv")).unwrap();
    assert!(h.starts_with("x1,value\n"));
    assert_eq!(h.lines().count(), 1026); // header + one row per node

    let mu = std::fs::read_to_string(dir.path().join("mu.csv")).unwrap();
    assert!(mu.starts_with("x1,mass\n"));
    let mass: f64 = mu
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((mass - 1.0).abs() < 1e-9, "eigenmeasure mass {mass}");
}

#[test]
fn chaos_game_is_reproducible_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = run(
            &[
                "--particles",
                "20000",
                "chaos-game",
                fixture("dyadic-uniform.json").to_str().unwrap(),
                "--csv",
                "orbit.csv",
            ],
            dir.path(),
        );
        assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    let oa = std::fs::read(a.path().join("orbit.csv")).unwrap();
    let ob = std::fs::read(b.path().join("orbit.csv")).unwrap();
    assert!(oa.starts_with(b"step,map,x1\n"));
    assert_eq!(oa, ob, "same config + seed must reproduce the orbit byte for byte");
}

#[test]
fn probe_reports_the_quotient_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "--measure-tol",
            "1e-6",
            "probe",
            fixture("dyadic-exp.json").to_str().unwrap(),
            "--eta",
            "sin(pi * x)",
            "--steps",
            "1e-2,1e-3",
            "--csv",
            "probe.csv",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("probe.csv")).unwrap();
    assert!(csv.starts_with("eta_id,t,quotient,subgradient_value,abs_diff\n"));
    assert_eq!(csv.lines().count(), 3); // header + two steps

    let report = report_json(dir.path(), "probe");
    let tables = report["probes"].as_array().unwrap();
    assert_eq!(tables.len(), 1);
    assert_eq!(tables[0]["rows"].as_array().unwrap().len(), 2);
}
