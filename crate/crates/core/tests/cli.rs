//! End-to-end runs of the `fpu-solitary` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpu-solitary")).args(args).arg("--out").arg(out).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn solve_writes_a_converged_wave() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", "--m", "2", "--delta", "0.1"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    for f in ["V.csv", "R.csv", "meta.json", "config.txt"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let line = stdout(&o);
    let residual: f64 = line.split_whitespace().find_map(|t| t.strip_prefix("residual=")).unwrap().parse().unwrap();
    let sigma: f64 = line.split_whitespace().find_map(|t| t.strip_prefix("sigma=")).unwrap().parse().unwrap();
    assert!(residual <= 100.0 * sigma * 1e-10, "{line}");
    let w = fpu_solitary::wave::read_wave_dir(dir.path()).unwrap();
    assert_eq!(w.delta, 0.1);
    assert!(fs::read_to_string(dir.path().join("config.txt")).unwrap().contains("delta = 0.1\n"));
}

#[test]
fn validation_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["solve", "--m", "0.5", "--delta", "0.1"][..],
        &["solve", "--m", "2", "--delta", "1.5"],
        &["limit", "--m", "1.0"],
        &["sweep", "--delta", ""],
        &["solve", "--m", "2", "--delta", "0.1,0.2"],
        &["expand", "--test", "cosine"],
    ] {
        let o = run(args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error kind=validation exit=2"), "{args:?}");
    }
}

#[test]
fn numerical_failure_exits_with_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["solve", "--m", "2", "--delta", "0.05", "--max-iter", "2"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error kind=non_convergence exit=1"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# flat config\nm = 3\ndelta = 0.3\ngrid.k = 32\n").unwrap();
    let out = dir.path().join("o");
    let o = Command::new(env!("CARGO_BIN_EXE_fpu-solitary"))
        .args(["solve", "--config"])
        .arg(&cfg)
        .args(["--delta", "0.2", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let echo = fs::read_to_string(out.join("config.txt")).unwrap();
    assert!(echo.contains("m = 3\n") && echo.contains("delta = 0.2\n") && echo.contains("grid.k = 32\n"), "{echo}");

    fs::write(&cfg, "m = 3\nsolver.tolerance = 1e-9\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_fpu-solitary")).args(["solve", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown configuration key"));
}

#[test]
fn limit_reports_mu_bar_and_drift() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["limit", "--m", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o);
    assert!(line.contains("mu_bar=0.5773502691896258"), "{line}");
    let csv = fs::read_to_string(dir.path().join("constants.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|t| t.parse().unwrap()).collect();
    let drift = row[header.iter().position(|h| *h == "energy_drift").unwrap()];
    assert!(drift <= 1e-10);
    assert!(dir.path().join("limit_m3.csv").exists());
}

#[test]
fn constants_table_has_one_row_per_m() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["constants", "--m", "2,3"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("constants.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    let row: Vec<f64> = csv.lines().nth(1).unwrap().split(',').map(|t| t.parse().unwrap()).collect();
    assert_eq!(row[0], 2.0);
    assert!((row[1] - 2.0 / 6f64.sqrt()).abs() < 1e-15);
    // kappa_bar(2) = 1 in closed form, within the reported error bar
    assert!((row[2] - 1.0).abs() <= row[3].max(1e-12));
}

#[test]
fn small_sweep_verify_and_expand() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let o = run(&["sweep", "--m", "2.5", "--delta", "0.2,0.141,0.1,0.071,0.05", "--grid-L", "4", "--extend", "false"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = fs::read_to_string(out.join("report.csv")).unwrap();
    let header: Vec<&str> = report.lines().next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "sigma_tilde").unwrap();
    let st: Vec<f64> = report.lines().skip(1).map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect();
    assert_eq!(st.len(), 5);
    assert!(st.windows(2).all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs()), "{st:?}");
    assert!(out.join("summary.csv").exists() && out.join("params_m2.5.csv").exists());
    assert!(out.join("profiles/V_m2.5_d0.1.csv").exists());
    let params = fs::read_to_string(out.join("params_m2.5.csv")).unwrap();
    assert!(params.starts_with("delta,p,eps,sigma_tilde\n"));

    let wave = fs::read_dir(out.join("waves")).unwrap().next().unwrap().unwrap().path();
    let vout = dir.path().join("verify");
    let o = run(&["verify", "--wave", wave.to_str().unwrap()], &vout);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("err_S="));
    assert_eq!(fs::read_to_string(vout.join("verify.csv")).unwrap().lines().count(), 2);

    let eout = dir.path().join("expand");
    let o = run(&["expand", "--m", "4", "--delta", "0.2,0.141,0.1,0.071", "--grid-L", "4"], &eout);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("remainder_order="));
    assert_eq!(fs::read_to_string(eout.join("expand.csv")).unwrap().lines().count(), 5);
}
