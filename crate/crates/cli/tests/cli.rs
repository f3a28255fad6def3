use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_core-analyzer"));
    c.env_remove("CORE_ANALYZER_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn zoo_file(dir: &Path, name: &str, n: usize, params: &[&str]) -> PathBuf {
    let path = dir.join(format!("{name}.json"));
    let dim = n.to_string();
    let mut args = vec![
        "zoo",
        "make",
        name,
        "--dim",
        &dim,
        "--output",
        path.to_str().unwrap(),
    ];
    args.extend_from_slice(params);
    let out = run(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn operator_file(dir: &Path, name: &str, rows: &str) -> PathBuf {
    let path = dir.join(format!("{name}.op.json"));
    fs::write(&path, format!(r#"{{"dim": 2, "data": {rows}}}"#)).unwrap();
    path
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn analyze_depolarizer() {
    let dir = TempDir::new().unwrap();
    let input = zoo_file(dir.path(), "depolarizing", 2, &["lambda=0.5"]);
    let report = dir.path().join("report.json");
    let out = run(&[
        "analyze",
        "--input",
        input.to_str().unwrap(),
        "--output",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&report);
    assert_eq!(v["core"]["rank"], 1);
    assert_eq!(v["core_vs_peripheral"]["equal"], true);
    assert_eq!(v["verdict"], "pass");
}

#[test]
fn analyze_trace_to_corner_reports_unmet_hypothesis() {
    let dir = TempDir::new().unwrap();
    let input = zoo_file(dir.path(), "trace_to_corner", 2, &[]);
    let report = dir.path().join("report.json");
    let out = run(&[
        "analyze",
        "--input",
        input.to_str().unwrap(),
        "--output",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    let v = json(&report);
    assert_eq!(v["invariant_states"]["phi_finite"], false);
    assert_eq!(v["core_vs_peripheral"]["equal"], true);
    assert_eq!(v["core_vs_peripheral"]["hypothesis_met"], false);
}

#[test]
fn input_errors_exit_3() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    assert_eq!(
        code(&run(&["analyze", "--input", bad.to_str().unwrap()])),
        3
    );
    assert_eq!(
        code(&run(&["analyze", "--input", "/nonexistent/file.json"])),
        3
    );
    assert_eq!(code(&run(&["zoo", "make", "no_such_map", "--dim", "2"])), 3);
    assert_eq!(
        code(&run(&[
            "zoo",
            "make",
            "depolarizing",
            "--dim",
            "2",
            "bogus=1"
        ])),
        3
    );
    assert_eq!(code(&run(&["fuzz", "--count", "0"])), 3);
    assert_eq!(code(&run(&["fuzz", "--count", "1", "--kinds", "nope"])), 3);
    assert_eq!(code(&run(&["analyze"])), 3);

    // Not positive: a ↦ a + σx·tr(σz a).
    let skew = dir.path().join("skew.json");
    fs::write(
        &skew,
        r#"{"name":"skew","dim":2,"repr":{"kind":"superop","data":[
            [1,0,0,1],[1,1,0,-1],[1,0,1,-1],[0,0,0,1]]}}"#,
    )
    .unwrap();
    assert_eq!(
        code(&run(&["analyze", "--input", skew.to_str().unwrap()])),
        3
    );

    let input = zoo_file(dir.path(), "depolarizing", 3, &[]);
    let op = operator_file(dir.path(), "sz", "[[1,0],[0,-1]]");
    assert_eq!(
        code(&run(&[
            "orbit",
            "--input",
            input.to_str().unwrap(),
            "--operator",
            op.to_str().unwrap()
        ])),
        3
    );
    assert_eq!(
        code(&run(&[
            "analyze",
            "--input",
            input.to_str().unwrap(),
            "--tol-rank",
            "0.5"
        ])),
        3
    );
}

#[test]
fn orbit_of_sigma_z_vanishes_under_depolarizer() {
    let dir = TempDir::new().unwrap();
    let input = zoo_file(dir.path(), "depolarizing", 2, &["lambda=0.5"]);
    let op = operator_file(dir.path(), "sz", "[[1,0],[0,-1]]");
    let report = dir.path().join("orbit.json");
    let csv = dir.path().join("orbit.csv");
    let out = run(&[
        "orbit",
        "--input",
        input.to_str().unwrap(),
        "--operator",
        op.to_str().unwrap(),
        "--output",
        report.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
        "--orbit-steps",
        "80",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&report);
    assert_eq!(v["orthogonality"]["orthogonal"], true);
    assert_eq!(v["vanishing"]["passes"], true);
    assert_eq!(v["vanishing"]["forward"], true);
    assert_eq!(v["convergence_split"]["consistent"], true);
    assert_eq!(v["steps"].as_array().unwrap().len(), 81);
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 82);
}

#[test]
fn orbit_under_rotation_stays_in_core() {
    let dir = TempDir::new().unwrap();
    let input = zoo_file(dir.path(), "unitary_conjugation", 2, &["phases=0,1"]);
    let op = operator_file(dir.path(), "e12", "[[0,1],[0,0]]");
    let report = dir.path().join("orbit.json");
    let out = run(&[
        "orbit",
        "--input",
        input.to_str().unwrap(),
        "--operator",
        op.to_str().unwrap(),
        "--output",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&report);
    assert_eq!(v["converged"], false);
    assert!(v["convergence_split"]["consistent"].is_null());
    assert!(v["tail_distance"]["max_tail_distance"].as_f64().unwrap() < 1e-12);
}

#[test]
fn orbit_of_unit_is_constant() {
    let dir = TempDir::new().unwrap();
    let input = zoo_file(dir.path(), "schur", 2, &["gamma=0.3"]);
    let op = operator_file(dir.path(), "one", "[[1,0],[0,1]]");
    let report = dir.path().join("orbit.json");
    let out = run(&[
        "orbit",
        "--input",
        input.to_str().unwrap(),
        "--operator",
        op.to_str().unwrap(),
        "--output",
        report.to_str().unwrap(),
        "--orbit-steps",
        "20",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&report);
    for s in v["steps"].as_array().unwrap() {
        assert!((s["hs_norm"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-14);
    }
    assert_eq!(v["converged"], true);
    assert_eq!(v["orthogonality"]["orthogonal"], false);
}

#[test]
fn zoo_list_names_every_family() {
    let out = run(&["zoo", "list"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "depolarizing",
        "pinching",
        "transpose",
        "trace_to_corner",
        "symmetrizer",
        "composed",
    ] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}

#[test]
fn fuzz_positive_noncp_and_archive() {
    let dir = TempDir::new().unwrap();
    let summary = dir.path().join("summary.json");
    let archive = dir.path().join("archive");
    let out = run(&[
        "fuzz",
        "--count",
        "1",
        "--kinds",
        "positive_noncp",
        "--dims",
        "3",
        "--seed",
        "4",
        "--archive-dir",
        archive.to_str().unwrap(),
        "--output",
        summary.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&summary);
    assert_eq!(v["per_check"]["schwarz_defect"]["pass"], 1);
    assert_eq!(v["failures"], 0);
    assert_eq!(fs::read_dir(&archive).unwrap().count(), 0);
}

#[test]
fn environment_seed_overrides_flag() {
    let dir = TempDir::new().unwrap();
    let input = zoo_file(dir.path(), "depolarizing", 2, &[]);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let out = bin()
        .args([
            "analyze",
            "--input",
            input.to_str().unwrap(),
            "--seed",
            "1",
            "--output",
            a.to_str().unwrap(),
        ])
        .env("CORE_ANALYZER_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    run(&[
        "analyze",
        "--input",
        input.to_str().unwrap(),
        "--seed",
        "77",
        "--output",
        b.to_str().unwrap(),
    ]);
    assert_eq!(json(&a)["config"]["seed"], 77);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let out = bin()
        .args(["analyze", "--input", input.to_str().unwrap()])
        .env("CORE_ANALYZER_SEED", "x")
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
}
