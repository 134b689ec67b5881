//! End-to-end runs of the `kss` binary: exit codes, file contents, warnings,
//! and rerun determinism, all against temporary directories.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kss_cli::report::FitReport;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kss"))
}

fn write_file(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn base_config(output_dir: &Path) -> String {
    format!(
        r#"{{
  "n_bar": 45.0,
  "l3": 30,
  "delta_l3": 2.5,
  "times": [0, "1/2 Tcl"],
  "planes": ["XY"],
  "grid": {{"resolution": 31, "extent": 4000.0}},
  "output_dir": "{}"
}}"#,
        output_dir.display()
    )
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn fit_report_values_and_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");
    let config = write_file(tmp.path(), "run.json", &base_config(&out_dir));

    let out = bin().args(["fit", "--config"]).arg(&config).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("alpha"), "echo table missing: {}", stdout(&out));

    let text = fs::read_to_string(out_dir.join("fit_report.json")).unwrap();
    let report = FitReport::parse(&text).unwrap();
    assert!((report.alpha - 62.846).abs() <= 0.3);
    assert_eq!(report.beta, 30);
    assert!((report.gamma0 - 0.01834).abs() <= 1e-4);
    assert_eq!(report.gamma1, 0.0);
    assert!((report.delta - 12.826).abs() <= 0.06);
    assert!((report.r_out - 3508.55).abs() <= 2.0);
    assert!((report.energy - (-2.4691358e-4)).abs() <= 1e-9);
    assert!(report.n_star.is_none());

    // emitted JSON reparses to the identical report
    assert_eq!(FitReport::parse(&report.emit()).unwrap(), report);
}

#[test]
fn missing_or_unreadable_config_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write_file(tmp.path(), "bad.json", r#"{"n_bar": 45.0, "l3": 30}"#);

    let out = bin().args(["fit", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("delta_l3"), "field not named: {}", stderr(&out));

    let out = bin().args(["fit", "--config", "/nonexistent/run.json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_times_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_file(
        tmp.path(),
        "run.json",
        r#"{"n_bar": 45.0, "l3": 30, "delta_l3": 2.5, "times": []}"#,
    );
    for cmd in ["slice", "evolve"] {
        let out = bin().args([cmd, "--config"]).arg(&config).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{cmd}: {}", stderr(&out));
        assert!(stderr(&out).contains("times"), "{cmd}: {}", stderr(&out));
    }
}

#[test]
fn slice_reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_file(tmp.path(), "run.json", &base_config(&tmp.path().join("a")));

    let first = bin().args(["slice", "--config"]).arg(&config).output().unwrap();
    assert_eq!(first.status.code(), Some(0), "stderr: {}", stderr(&first));
    let second = bin()
        .args(["slice", "--config"])
        .arg(&config)
        .arg("--output")
        .arg(tmp.path().join("b"))
        .output()
        .unwrap();
    assert_eq!(second.status.code(), Some(0), "stderr: {}", stderr(&second));

    for name in ["slice_xy_t0.csv", "slice_xy_t1.csv"] {
        let a = fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = fs::read(tmp.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
    let head = fs::read_to_string(tmp.path().join("a").join("slice_xy_t0.csv")).unwrap();
    let first_line = head.lines().next().unwrap();
    assert!(first_line.starts_with("# plane=XY t="), "header: {first_line}");
    assert!(first_line.contains("x_min="), "header: {first_line}");
    assert_eq!(head.lines().nth(1).unwrap(), "x,y,value");
}

#[test]
fn expand_census_matches_window() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");
    let config = write_file(tmp.path(), "run.json", &base_config(&out_dir));

    let out = bin().args(["expand", "--config"]).arg(&config).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let text = fs::read_to_string(out_dir.join("coefficients.csv")).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("# window n=40..50 l=25..35 m=27..30 captured="), "{header}");
    assert_eq!(lines.next().unwrap(), "n,l,m,re,im,energy");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 484);
    let mut nonzero = 0;
    for row in &rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 6);
        let re: f64 = fields[3].parse().unwrap();
        let im: f64 = fields[4].parse().unwrap();
        nonzero += usize::from(re != 0.0 || im != 0.0);
    }
    assert_eq!(nonzero, 176);
}

#[test]
fn json_format_emits_parseable_documents() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");
    let config = write_file(tmp.path(), "run.json", &base_config(&out_dir));

    let out = bin()
        .args(["expand", "--config"])
        .arg(&config)
        .args(["--format", "json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("coefficients.json")).unwrap())
            .unwrap();
    assert_eq!(doc["entries"].as_array().unwrap().len(), 484);
    let captured = doc["captured"].as_f64().unwrap();
    assert!(captured > 0.0 && captured <= 1.0, "captured = {captured}");
}

#[test]
fn evolve_series_is_conservative_and_contracts() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");
    let config = write_file(
        tmp.path(),
        "run.json",
        &format!(
            r#"{{"n_bar": 45.0, "l3": 30, "delta_l3": 2.5,
                "times": [0, "1/4 Tcl", "1/2 Tcl"], "output_dir": "{}"}}"#,
            out_dir.display()
        ),
    );
    let out = bin().args(["evolve", "--config"]).arg(&config).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let text = fs::read_to_string(out_dir.join("evolution.csv")).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    for row in &rows {
        assert!((row[2] - 1.0).abs() <= 1e-12, "norm drifted: {row:?}");
        assert!((row[3] - rows[0][3]).abs() <= 1e-12 * rows[0][3].abs(), "energy drifted: {row:?}");
    }
    // the packet launched at apogee falls inward over the first half period
    assert!(rows[0][1] > rows[2][1], "no contraction: {rows:?}");
}

#[test]
fn defect_table_shifts_the_report_and_warns_on_gaps() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("out");
    let config = write_file(tmp.path(), "run.json", &base_config(&out_dir));
    let defects = write_file(tmp.path(), "defects.json", r#"{"defects": {"30": 0.5}}"#);

    let out = bin()
        .args(["fit", "--config"])
        .arg(&config)
        .arg("--defects")
        .arg(&defects)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let report =
        FitReport::parse(&fs::read_to_string(out_dir.join("fit_report.json")).unwrap()).unwrap();
    assert_eq!(report.n_star, Some(44.5));
    let e_star = report.e_n_star.unwrap();
    assert!((e_star - (-0.5 / (44.5 * 44.5))).abs() <= 1e-15);
    assert!((report.energy - e_star).abs() <= 1e-9);

    // expansion over l = 25..35 has ten channels without a listed defect
    let out = bin()
        .args(["expand", "--config"])
        .arg(&config)
        .arg("--defects")
        .arg(&defects)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let warn = stderr(&out);
    assert!(warn.contains("no defect listed"), "no warning: {warn}");
    assert!(warn.contains("25"), "missing l list: {warn}");
}

#[test]
fn check_passes_filters_and_reports_faults() {
    let out = bin().arg("check").output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("ok   angular.cosine_sum"), "{text}");
    assert!(text.contains("ok   qdt.reduction"), "{text}");
    assert!(text.contains("0 failed"), "{text}");

    let out = bin().args(["check", "--only", "angular"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("angular."), "{text}");
    assert!(!text.contains("packet."), "{text}");

    let out = bin().args(["check", "--only", "bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin().args(["check", "--inject", "norm"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL radial.norm"), "{}", stdout(&out));
}
