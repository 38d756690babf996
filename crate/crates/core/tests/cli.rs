use std::process::{Command, Output};

use double_power::sweep::{read_sweep_csv, SweepCell, SWEEP_HEADER};
use double_power::{classify, Classification, Params};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_double-power"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn report_json() {
    let o = run(&["report", "--p", "2", "--omega", "0.2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["classification"], "UniqueByBasic");
    for key in [
        "omega_p", "a_p", "alpha", "b", "c", "beta", "exists", "basic_holds",
        "extended_holds", "k_alpha", "g_scan_monotone", "h1_limit", "h2_witness",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }

    let o = run(&["report", "--p", "2", "--omega", "0.25"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["classification"], "NoSolution");
    assert!(v["beta"].is_null());

    let o = run(&["report", "--p", "2", "--omega", "0.01"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["classification"], "Undetermined");
    assert_eq!(v["extended_holds"], false);
}

#[test]
fn report_rejects_bad_params() {
    for args in [
        ["report", "--p", "1", "--omega", "0.2"],
        ["report", "--p", "2", "--omega", "-1"],
        ["report", "--p", "2", "--omega", "abc"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn solve_writes_profile() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    let o = run(&["solve", "--n", "3", "--p", "2", "--omega", "0.2", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("d_star = "));
    assert!(stdout(&o).contains("residual_sup = "));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,u,du"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2048);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0] && w[1][1] < w[0][1]));
    assert!(rows.iter().all(|r| r[1] > 0.0));
    assert!(!text.contains('\r'));
}

#[test]
fn solve_exit_codes() {
    let o = run(&["solve", "--n", "1", "--p", "2", "--omega", "0.1875"]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o).lines().next().unwrap().to_string();
    let d: f64 = line.trim_start_matches("d_star = ").parse().unwrap();
    let beta = Params::planar(2.0, 0.1875).unwrap().critical_points().beta.unwrap();
    assert!((d - beta).abs() < 1e-6);

    let o = run(&["solve", "--n", "3", "--p", "2", "--omega", "0.23"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no positive solution: omega >= omega_p"));

    // A horizon too short to resolve any shot is a numerical failure.
    let o = run(&["solve", "--n", "3", "--p", "2", "--omega", "0.2", "--r-max", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
}

fn sweep_cells(format: &str) -> (String, std::path::PathBuf, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(format!("grid.{format}"));
    let o = run(&[
        "sweep", "--p-min", "1.5", "--p-max", "4", "--p-steps", "20", "--omega-steps", "20",
        "--format", format, "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    (std::fs::read_to_string(&path).unwrap(), path, dir)
}

#[test]
fn sweep_csv() {
    let (text, _, _dir) = sweep_cells("csv");
    assert_eq!(text.lines().next().unwrap(), SWEEP_HEADER.join(","));
    let cells = read_sweep_csv(text.as_bytes()).unwrap();
    assert_eq!(cells.len(), 400);
    assert!(cells.windows(2).all(|w| (w[0].p, w[0].omega) < (w[1].p, w[1].omega)));
    for c in &cells {
        let r = classify(&Params::planar(c.p, c.omega).unwrap());
        assert_eq!(c.classification, r.classification);
        assert!(c.a_p < c.omega_p);
    }
    // String-level round trip.
    let mut again = Vec::new();
    double_power::sweep::write_sweep_csv(&mut again, &cells).unwrap();
    assert_eq!(String::from_utf8(again).unwrap(), text);
}

#[test]
fn sweep_json_matches_csv() {
    let (csv_text, _, _d1) = sweep_cells("csv");
    let (json_text, _, _d2) = sweep_cells("json");
    let from_json: Vec<SweepCell> = serde_json::from_str(&json_text).unwrap();
    let from_csv = read_sweep_csv(csv_text.as_bytes()).unwrap();
    assert_eq!(from_json, from_csv);
    let v: serde_json::Value = serde_json::from_str(&json_text).unwrap();
    let keys: Vec<&str> = v[0].as_object().unwrap().keys().map(|k| k.as_str()).collect();
    let mut expected: Vec<&str> = SWEEP_HEADER.to_vec();
    let mut got = keys.clone();
    expected.sort_unstable();
    got.sort_unstable();
    assert_eq!(got, expected);
}

#[test]
fn sweep_row_at_p2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let o = run(&[
        "sweep", "--p-min", "2", "--p-max", "3", "--p-steps", "2", "--omega-steps", "50",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let cells = read_sweep_csv(std::fs::File::open(&path).unwrap()).unwrap();
    let row: Vec<_> = cells.iter().filter(|c| c.p == 2.0).collect();
    assert_eq!(row.len(), 50);
    for c in &row {
        if c.omega >= 1.0 / 6.0 {
            assert_eq!(c.classification, Classification::UniqueByBasic);
        }
    }
    assert_eq!(row[0].classification, Classification::Undetermined);
}

#[test]
fn sweep_rejects_bad_grid_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let o = run(&[
        "sweep", "--p-min", "1", "--p-max", "3", "--p-steps", "2", "--omega-steps", "5",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!path.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn omega_star_command() {
    let o = run(&["omega-star", "--p", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let w: f64 = s.trim().parse().unwrap();
    assert!(w > 0.01 && w < 0.1667);
    let digits = s.trim().trim_start_matches("0.").trim_start_matches('0');
    assert_eq!(digits.len(), 12, "{s}");

    let o = run(&["omega-star", "--p", "3"]);
    let w: f64 = stdout(&o).trim().parse().unwrap();
    assert!(w > 0.0 && w < 0.12);

    let o = run(&["omega-star", "--p", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn multiplicity_command() {
    let o = run(&["multiplicity", "--n", "3", "--p", "2", "--omega", "0.2", "--grid", "200"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1");
    let o = run(&["multiplicity", "--n", "1", "--p", "2", "--omega", "0.1875", "--grid", "200"]);
    assert_eq!(stdout(&o).trim(), "1");
    let o = run(&["multiplicity", "--n", "3", "--p", "2", "--omega", "0.23"]);
    assert_eq!(o.status.code(), Some(1));
}
