use std::path::Path;
use std::process::Command;

fn blidkit(config: &str, dir: &Path, extra: &[&str]) -> (i32, String) {
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, config).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_blidkit"))
        .arg("--config")
        .arg(&cfg)
        .arg("--output")
        .arg(dir.join("out"))
        .arg("--quiet")
        .args(extra)
        .env_remove("BLIDKIT_OUTPUT_DIR")
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("out/report.json")).unwrap()).unwrap()
}

#[test]
fn certify_on_c0_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = blidkit(r#"{"command": "certify-blid"}"#, dir.path(), &[]);
    assert_eq!(code, 0);
    let r = report(dir.path());
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["seed"], 42);
    let bound = r["cases"][0]["detail"]["empirical_bound"].as_f64().unwrap();
    assert!(bound <= 2.0);
    assert!(dir.path().join("out/certification.csv").exists());
}

#[test]
fn diffcheck_on_abs_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = blidkit(r#"{"command": "diffcheck", "diffcheck": {"map": "abs"}}"#, dir.path(), &[]);
    assert_eq!(code, 2);
    let csv = std::fs::read_to_string(dir.path().join("out/ratios.csv")).unwrap();
    assert!(csv.starts_with("notion,direction_id,t,ratio"));
}

#[test]
fn linearize_without_matrix_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{"command": "linearize", "linearize": {"f_name": "square", "alpha": 1.0, "delta": 0.1,
        "bump": {"r_in": 1.0, "r_out": 2.0}, "box_radius": 0.25, "grid_n": 41, "tol": 1e-12}}"#;
    let (code, stderr) = blidkit(config, dir.path(), &[]);
    assert_eq!(code, 1);
    assert_eq!(stderr.lines().count(), 1, "{stderr}");
    assert!(stderr.contains("matrix"), "{stderr}");
}

#[test]
fn unknown_names_exit_one_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stderr) = blidkit(r#"{"command": "render"}"#, dir.path(), &[]);
    assert_eq!(code, 1);
    assert!(stderr.contains("`command`"), "{stderr}");
    let (code, stderr) = blidkit(r#"{"command": "diffcheck", "diffcheck": {"map": "cube"}}"#, dir.path(), &[]);
    assert_eq!(code, 1);
    assert!(stderr.contains("diffcheck.map"), "{stderr}");
}

#[test]
fn linearize_runs_and_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{"command": "linearize", "linearize": {"matrix": [[2.0, 0.0], [0.0, 0.5]], "f_name": "swap_square",
        "alpha": 1.0, "delta": 0.1, "bump": {"r_in": 1.0, "r_out": 2.0}, "box_radius": 0.25, "grid_n": 41,
        "tol": 1e-12, "samples": 200}}"#;
    let (code, stderr) = blidkit(config, dir.path(), &[]);
    assert_eq!(code, 0, "{stderr}");
    let table = std::fs::read_to_string(dir.path().join("out/conjugacy_problem.csv")).unwrap();
    assert!(table.starts_with("x_1,x_2,phi_minus_id_1,phi_minus_id_2"));
    assert_eq!(table.lines().count(), 1 + 41 * 41);
}

#[test]
fn seed_flag_overrides_and_reports_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let config = r#"{"command": "extend-demo", "space": {"kind": "cq_interval", "q_cap": 2}, "budgets": {"fuzz": 100}}"#;
    assert_eq!(blidkit(config, a.path(), &["--seed", "7"]).0, 0);
    assert_eq!(blidkit(config, b.path(), &["--seed", "7"]).0, 0);
    let (mut ra, mut rb) = (report(a.path()), report(b.path()));
    assert_eq!(ra["seed"], 7);
    ra.as_object_mut().unwrap().remove("metadata");
    rb.as_object_mut().unwrap().remove("metadata");
    assert_eq!(serde_json::to_string(&ra).unwrap(), serde_json::to_string(&rb).unwrap());
}
