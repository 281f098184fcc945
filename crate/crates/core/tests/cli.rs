use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sphtherm::report::SteadyStateReport;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn sphtherm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sphtherm"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("field.csv");
    let vtk = dir.path().join("field.vtk");
    let report = dir.path().join("report.json");
    let log = dir.path().join("residual.csv");
    let out = sphtherm(&[
        "simulate",
        path_str(&fixture("slab.toml")),
        "--field-csv",
        path_str(&csv),
        "--vtk",
        path_str(&vtk),
        "--report",
        path_str(&report),
        "--convergence-log",
        path_str(&log),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("converged"), "{stdout}");

    let field = std::fs::read_to_string(&csv).unwrap();
    assert!(field.starts_with("x,y,k,T\n"));
    assert_eq!(field.lines().count(), 1 + 20 * 50);
    assert!(std::fs::read_to_string(&vtk)
        .unwrap()
        .contains("POINTS 1000 double"));

    let r = SteadyStateReport::from_json(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(r.converged);
    assert_eq!(r.particles, 1000);
    let exact = 20.0 / (0.13 + 0.02 / 0.13 + 0.04) * 0.05;
    assert!((r.q_internal - exact).abs() / exact < 0.02);

    let history = std::fs::read_to_string(&log).unwrap();
    assert!(history.starts_with("step,residual\n0,"));
    assert_eq!(history.lines().count() as u64, 2 + r.steps);
}

#[test]
fn malformed_profile_reports_geometry_error() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("bad.toml");
    std::fs::write(&doc, "[[regions]]\nname = \"x\"\n").unwrap();
    let out = sphtherm(&["simulate", path_str(&doc)]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("error: geometry:"), "{stderr}");
}

#[test]
fn unconverged_run_exits_3_and_still_exports() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("field.csv");
    let out = sphtherm(&[
        "simulate",
        path_str(&fixture("slab.toml")),
        "--max-steps",
        "1",
        "--field-csv",
        path_str(&csv),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 1001);
}

#[test]
fn validate_needs_reference_data() {
    let out = sphtherm(&["validate", path_str(&fixture("slab.toml"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("config:"));
}

#[test]
fn cavity_subcommand_prints_coefficients() {
    let out = sphtherm(&[
        "cavity", "--width", "0.01", "--depth", "0.02", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("class,width,depth,h_a,h_r,R,k_eq"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 7);
    assert_eq!(row[1].parse::<f64>().unwrap(), 0.01);
    assert_eq!(row[2].parse::<f64>().unwrap(), 0.02);

    let out = sphtherm(&[
        "cavity", "--width", "0.01", "--depth", "0.02", "--gap", "0.02",
    ]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("exposed"));

    let out = sphtherm(&["cavity", "--width=-0.01", "--depth", "0.02"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("cavity:"));
}

#[test]
fn export_field_infers_format() {
    let dir = tempfile::tempdir().unwrap();
    let vtk = dir.path().join("t.vtk");
    let out = sphtherm(&[
        "export-field",
        path_str(&fixture("two_layer.toml")),
        "-o",
        path_str(&vtk),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(&vtk)
        .unwrap()
        .starts_with("# vtk DataFile"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(sphtherm(&[]).status.code(), Some(2));
    assert_eq!(
        sphtherm(&["simulate", "x.toml", "--scheme", "rk4"])
            .status
            .code(),
        Some(2)
    );
}
