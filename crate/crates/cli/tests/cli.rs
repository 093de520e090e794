use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn spinorbit(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinorbit")).args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn spinorbit_env(args: &[&str], out: &Path, threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinorbit"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("SPINORBIT_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn ok(o: &Output) {
    assert!(o.status.success(), "exit {:?}\nstderr: {}", o.status.code(), String::from_utf8_lossy(&o.stderr));
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    (header, rows)
}

/// Every file in `dir` except the written config.
fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "config.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn zero_power_index_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = spinorbit(&["orbit", "--k", "0", "--gamma", "15"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("k must be nonzero"));
}

#[test]
fn bad_configurations_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 5] = [
        &["orbit", "--preset", "fig9-nothing"],
        &["spectrum", "--k", "1", "--q", "0.3", "--beta", "1", "--eta", "0.1"],
        &["density", "--k", "1", "--nu-min", "1"],
        &["spectrum", "--k", "7/3", "--nu", "5..1"],
        &["selftest", "--only", "12"],
    ];
    for args in cases {
        let o = spinorbit(args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = spinorbit_env(&["spectrum", "--k", "4"], dir.path(), "zero");
    assert_eq!(o.status.code(), Some(2));
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"k": "4", "gamma": "60", "colour": "red"}"#).unwrap();
    let o = spinorbit(&["orbit", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn orbit_files() {
    let dir = tempfile::tempdir().unwrap();
    ok(&spinorbit(&["orbit", "--preset", "fig1-k4"], dir.path()));
    let (header, rows) = csv_rows(&dir.path().join("orbit.csv"));
    assert_eq!(header, "phi,r,x,y");
    let a_c = rows.iter().map(|r| r[1]).fold(0.0, f64::max);
    for r in &rows {
        assert!((r[1] * r[0].cos() - r[2]).abs() <= 1e-12 * a_c);
    }
    // four petals: apex directions in half-radian bins, 13 bins wrapping the full turn
    let mut directions: Vec<i64> = rows
        .iter()
        .filter(|r| r[1] > 0.999 * a_c)
        .map(|r| (r[3].atan2(r[2]).rem_euclid(std::f64::consts::TAU) / 0.5).round() as i64 % 13)
        .collect();
    directions.sort();
    directions.dedup();
    assert_eq!(directions.len(), 4, "{directions:?}");
    let ppm = fs::read(dir.path().join("orbit.ppm")).unwrap();
    assert!(ppm.starts_with(b"P6\n256 256\n255\n"));
    assert_eq!(ppm.len(), 15 + 3 * 256 * 256);
    let config = json(&dir.path().join("config.json"));
    assert_eq!(config["k"], "4");
    assert_eq!(config["gamma"], "60");
    assert_eq!(config["q"], 0.1);
}

#[test]
fn preset_and_explicit_parameters_agree() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    ok(&spinorbit(&["orbit", "--preset", "fig1-k1"], a.path()));
    ok(&spinorbit(&["orbit", "--k", "1", "--gamma", "15"], b.path()));
    assert_eq!(outputs(a.path()), outputs(b.path()));
    let (_, rows) = csv_rows(&b.path().join("orbit.csv"));
    // k = 1 is a circle through the origin of diameter a_c
    let a_c = rows.iter().map(|r| r[1]).fold(0.0, f64::max);
    for r in &rows {
        assert!(((r[2] - a_c / 2.0).hypot(r[3]) - a_c / 2.0).abs() < 1e-12 * a_c);
    }
}

#[test]
fn qcc_detects_fourfold_symmetry() {
    let dir = tempfile::tempdir().unwrap();
    ok(&spinorbit(&["qcc", "--preset", "fig1-k4", "--n", "30"], dir.path()));
    let report = json(&dir.path().join("qcc.json"));
    assert_eq!(report["symmetry_order_detected"], 4.0);
    assert!(report["symmetry_mismatch"].as_f64().unwrap() < 1e-9);
    assert!(report["mean_relative_deviation"].as_f64().unwrap() <= 0.05);
    let (header, rows) = csv_rows(&dir.path().join("ridge.csv"));
    assert_eq!(header, "phi,r_peak,density_peak");
    assert!(!rows.is_empty());
}

#[test]
fn spectrum_spacing_and_splitting() {
    let dir = tempfile::tempdir().unwrap();
    ok(&spinorbit(&["spectrum", "--k", "7/3", "--q", "0.1", "--nu", "1..5"], dir.path()));
    let report = json(&dir.path().join("spectrum.json"));
    let levels = report["levels"].as_array().unwrap();
    assert_eq!(levels.len(), 10);
    let lambda = |i: usize| levels[i]["lambda"].as_f64().unwrap();
    for i in 0..5 {
        assert!((lambda(2 * i) - lambda(2 * i + 1) - 0.1).abs() < 1e-12);
        if i > 0 {
            assert!((lambda(2 * i) - lambda(2 * i - 2) - 7.0 / 3.0).abs() < 1e-12);
        }
    }
}

#[test]
fn spin_precesses_as_cos_and_minus_sin() {
    let dir = tempfile::tempdir().unwrap();
    ok(&spinorbit(&["spin", "--chi", "plusx", "--q", "0.1", "--span", "4pi"], dir.path()));
    let (header, rows) = csv_rows(&dir.path().join("spin.csv"));
    assert_eq!(header, "phi,sx,sy,sz");
    let last = rows.last().unwrap();
    assert!((last[0] - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    for r in &rows {
        assert!((r[1] - (0.1 * r[0]).cos()).abs() < 1e-12);
        assert!((r[2] + (0.1 * r[0]).sin()).abs() < 1e-12);
        assert!(r[3].abs() < 1e-12);
    }
}

#[test]
fn gauge_report() {
    let dir = tempfile::tempdir().unwrap();
    ok(&spinorbit(&["gauge", "--q", "2", "--beta", "0.5", "--r", "1.5", "--phi", "pi/3"], dir.path()));
    let report = json(&dir.path().join("gauge.json"));
    assert_eq!(report["eta"], 2.0);
    let fields = report["fields"].as_array().unwrap();
    let names: Vec<_> = fields.iter().map(|f| f["component"].as_str().unwrap()).collect();
    assert_eq!(names, ["A_x", "A_y", "A_z", "B_x", "B_y", "B_z"]);
    let bx = &fields[3];
    for part in ["re", "im"] {
        for row in bx[part].as_array().unwrap() {
            for v in row.as_array().unwrap() {
                assert_eq!(v.as_f64().unwrap(), 0.0);
            }
        }
    }
    // q = 2: transport around the loop gives e^{±2πi} = 1
    let h = &report["holonomy"];
    assert!((h["re"][0][0].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert!(h["im"][0][0].as_f64().unwrap().abs() < 1e-8);
}

#[test]
fn thread_count_does_not_change_bytes() {
    let one = tempfile::tempdir().unwrap();
    let many = tempfile::tempdir().unwrap();
    ok(&spinorbit_env(&["qcc", "--preset", "fig1-k7over3"], one.path(), "1"));
    ok(&spinorbit_env(&["qcc", "--preset", "fig1-k7over3"], many.path(), "4"));
    assert_eq!(outputs(one.path()), outputs(many.path()));
    ok(&spinorbit_env(&["density", "--preset", "fig2-km6"], one.path(), "1"));
    ok(&spinorbit_env(&["density", "--preset", "fig2-km6"], many.path(), "3"));
    assert_eq!(outputs(one.path()), outputs(many.path()));
}

#[test]
fn resolved_config_reproduces_the_run() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    ok(&spinorbit(&["density", "--k", "9/2", "--n", "12", "--chi", "plusy", "--phi0", "pi/7"], first.path()));
    let config = first.path().join("config.json");
    let resolved = json(&config);
    assert_eq!(resolved["gamma"], "27");
    assert_eq!(resolved["nu_min"], 1);
    assert!(resolved["grid"].is_object());
    ok(&spinorbit(&["density", "--config", config.to_str().unwrap()], second.path()));
    assert_eq!(outputs(first.path()), outputs(second.path()));
    let again = json(&second.path().join("config.json"));
    assert_eq!(resolved["grid"], again["grid"]);
}

#[test]
fn unsafe_modes_start_at_zero() {
    let dir = tempfile::tempdir().unwrap();
    ok(&spinorbit(
        &[
            "density",
            "--k",
            "1",
            "--n",
            "6",
            "--unsafe-modes",
            "--mode-r-max",
            "2",
            "--n-r",
            "64",
            "--n-phi",
            "64",
            "--r-min",
            "0.01",
            "--r-max",
            "2",
        ],
        dir.path(),
    ));
    let config = json(&dir.path().join("config.json"));
    assert_eq!(config["nu_min"], 0);
    assert_eq!(config["mode_r_max"], 2.0);
    let (_, rows) = csv_rows(&dir.path().join("density.csv"));
    assert_eq!(rows.len(), 64 * 64);
    assert!(rows.iter().all(|r| r[2].is_finite() && r[2] >= 0.0));
}

#[test]
fn selftest_subset() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("selftest.json");
    let o = Command::new(env!("CARGO_BIN_EXE_spinorbit"))
        .args(["selftest", "--only", "5,8", "--json"])
        .arg(&report)
        .output()
        .unwrap();
    ok(&o);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("[PASS]  5."));
    assert!(stdout.contains("[PASS]  8."));
    assert!(stdout.contains("2 of 2 criteria passed"));
    assert_eq!(json(&report).as_array().unwrap().len(), 2);
}
