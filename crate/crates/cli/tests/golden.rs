//! Compares command outputs with the files under `scenarios/golden`.
//! Set `UPDATE_GOLDEN=1` to regenerate them.

use std::fs;
use std::path::{Path, PathBuf};

use uavsim_cli::commands::{cmd_detection_compare, cmd_distance_curve, cmd_run, CurveArgs, RunArgs};

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn check(name: &str, file: &str, actual: &str) {
    let path = scenarios().join("golden").join(name).join(file);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "{} differs from golden", path.display());
}

#[test]
fn hover_summary() {
    let dir = tempfile::tempdir().unwrap();
    let args = RunArgs {
        scenario: scenarios().join("hover_100m.toml"),
        mcs_table: None,
        out: dir.path().to_path_buf(),
        seed: None,
        monte_carlo: false,
        dt: None,
    };
    cmd_run(&args).unwrap();
    check("hover_100m", "summary.json", &fs::read_to_string(dir.path().join("summary.json")).unwrap());
}

#[test]
fn flyby_summary() {
    let dir = tempfile::tempdir().unwrap();
    let args = RunArgs {
        scenario: scenarios().join("flyby_tracking.toml"),
        mcs_table: None,
        out: dir.path().to_path_buf(),
        seed: Some(3),
        monte_carlo: true,
        dt: None,
    };
    cmd_run(&args).unwrap();
    check("flyby_tracking", "summary.json", &fs::read_to_string(dir.path().join("summary.json")).unwrap());
}

#[test]
fn sweep_curve() {
    let args = CurveArgs { scenario: Some(scenarios().join("fig5_sweep.toml")), jobs: 2, ..Default::default() };
    check("fig5_sweep", "distance_curve.csv", &cmd_distance_curve(&args).unwrap().csv);
}

#[test]
fn face_comparison() {
    let out = cmd_detection_compare(&scenarios().join("faces136.toml"), None, None).unwrap();
    check("faces136", "detection_compare.csv", &out.csv);
}
