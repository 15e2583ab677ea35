use std::fs;
use std::path::Path;
use std::process::Command;

fn ife3d(args: &[&str], out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ife3d"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn csv(dir: &Path) -> String {
    fs::read_to_string(dir.join("results.csv")).unwrap()
}

#[test]
fn sphere_solve_writes_three_rows_with_blank_first_rates() {
    let dir = tempfile::tempdir().unwrap();
    let out = ife3d(&["--problem", "sphere", "--n", "6,8,10", "--epsilon", "-1"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = csv(dir.path());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("h,Linf,rate,L2,rate,H1,rate"));
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), 13);
    }
    let first: Vec<&str> = lines[1].split(',').collect();
    assert!(first[2].is_empty() && first[4].is_empty() && first[6].is_empty());
    let second: Vec<&str> = lines[2].split(',').collect();
    for c in [1, 2, 3, 4, 5, 6] {
        assert!(second[c].parse::<f64>().is_ok(), "column {c} of `{}`", lines[2]);
    }
    for f in ["results.md", "run.log"] {
        assert!(dir.path().join(f).exists());
    }
}

#[test]
fn wrong_plane_interpolation_reports_eta_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = ife3d(&["--problem", "sphere", "--n", "6,8", "--mode", "interpolation", "--wrong-plane"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = csv(dir.path());
    assert!(text.lines().next().unwrap().ends_with("eta_inf,rate,eta0,rate,eta1,rate"));
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    for c in [7, 9, 11] {
        assert!(row[c].parse::<f64>().unwrap() > 0.0);
    }
    assert!(fs::read_to_string(dir.path().join("run.log")).unwrap().contains("wrong_plane = true"));
}

#[test]
fn deterministic_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--problem", "sphere", "--n", "6,8", "--deterministic"];
    assert!(ife3d(&args, a.path()).status.success());
    assert!(ife3d(&args, b.path()).status.success());
    assert_eq!(fs::read(a.path().join("results.csv")).unwrap(), fs::read(b.path().join("results.csv")).unwrap());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "problem = \"sphere\"\nladder = [4, 6]\nsigma0_factor = 100\nmode = \"interpolation\"\n").unwrap();
    let out = ife3d(&["--config", cfg.to_str().unwrap(), "--n", "6,8"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let log = fs::read_to_string(dir.path().join("run.log")).unwrap();
    assert!(log.contains("ladder = [6, 8]"));
    assert!(log.contains("sigma0_factor = 100"));
}

#[test]
fn invalid_input_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = ife3d(&["--problem", "sphere", "--epsilon", "2"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilon"));
    let out = ife3d(&["--problem", "cube"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn failed_row_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    // an edge from the origin to x = 1 enters and leaves this sphere
    fs::write(&cfg, "ladder = [2]\nmode = \"interpolation\"\n[custom]\nkind = \"sphere\"\ncenter = [0.5, 0.0, 0.0]\nradius = 0.3\n")
        .unwrap();
    let out = ife3d(&["--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(fs::read_to_string(dir.path().join("run.log")).unwrap().contains("FAILED"));
}
