//! The `mlrh` binary: exit codes, output formats, config precedence and
//! determinism.

use std::process::{Command, Output};

use mlrh::cli::{resolve_config, Format};

fn mlrh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlrh")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn hcurve_csv_layout() {
    let o = mlrh(&["hcurve", "--t-points", "5", "--methods", "pade3,hinf"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["t", "method", "re_h", "im_h", "re_dalpha_h", "im_dalpha_h", "error"]);
    assert_eq!(rows.len(), 10);
    // 17 significant digits: one leading digit and 16 decimals
    let re = &rows[0][col(&header, "re_h")];
    let mantissa = re.trim_start_matches('-').split('e').next().unwrap();
    assert_eq!(mantissa.len(), 18, "{re}");
    let t0: f64 = rows[0][0].parse().unwrap();
    let t4: f64 = rows[4][0].parse().unwrap();
    assert_eq!((t0, t4), (0.01, 10.0));
}

#[test]
fn json_output_is_an_array_of_row_objects() {
    let o = mlrh(&["price", "--strikes", "1.0", "--maturities", "0.5", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    let keys: Vec<&str> = rows[0].as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["maturity", "strike", "price", "implied_vol", "method", "error"] {
        assert!(keys.contains(&k), "missing {k}");
    }
    assert!(rows[0]["price"].as_f64().unwrap() > 0.0);
}

#[test]
fn invalid_parameters_exit_with_code_two() {
    for args in [
        &["converge", "--H", "0.7"][..],
        &["hcurve", "--rho", "1.5"],
        &["hcurve", "--methods", "spline"],
        &["smile", "--strikes", "-1"],
        &["hcurve", "--no-such-flag"],
    ] {
        let o = mlrh(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"H": 0.1, "nu": 0.3, "format": "json", "strikes": [0.9, 1.1]}"#).unwrap();
    let p = path.to_str().unwrap();
    let cfg = resolve_config(["mlrh", "smile", "--config", p, "--nu", "0.5"]).unwrap();
    assert_eq!(cfg.hurst, 0.1);
    assert_eq!(cfg.nu, 0.5);
    assert_eq!(cfg.format, Format::Json);
    assert_eq!(cfg.strikes, vec![0.9, 1.1]);
    // untouched fields keep their defaults
    assert_eq!(cfg.rho, -0.65);
}

#[test]
fn unknown_config_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"nu": 0.3, "experiment": "smile"}"#).unwrap();
    let o = mlrh(&["smile", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = ["hcurve", "--t-points", "20", "--methods", "pade5,adams:300,series_large:3"];
    assert_eq!(mlrh(&args).stdout, mlrh(&args).stdout);
    assert_eq!(mlrh(&["selftest"]).stdout, mlrh(&["selftest"]).stdout);
}

#[test]
fn zero_fourier_argument_gives_zero_curves() {
    let o = mlrh(&["hcurve", "--a-re", "0", "--a-im", "0", "--t-points", "4", "--methods", "pade4,adams:200"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&stdout(&o));
    for r in rows {
        for name in ["re_h", "im_h"] {
            let v: f64 = r[col(&header, name)].parse().unwrap();
            assert_eq!(v, 0.0);
        }
    }
}

#[test]
fn converge_errors_decrease_in_the_rough_case() {
    let o = mlrh(&["converge", "--H", "0.2", "--t-points", "40"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&stdout(&o));
    let errs: Vec<f64> = rows.iter().map(|r| r[col(&header, "max_abs_err_h")].parse().unwrap()).collect();
    assert_eq!(errs.len(), 4);
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert!(rows.iter().all(|r| r[col(&header, "benchmark")].starts_with("adams")));
}

#[test]
fn converge_at_h_zero_annotates_unavailable_orders() {
    let o = mlrh(&["converge", "--H", "0", "--t-points", "20"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&stdout(&o));
    let e = col(&header, "error");
    assert!(rows[0][e].is_empty() && rows[1][e].is_empty());
    assert!(!rows[2][e].is_empty() && !rows[3][e].is_empty());
}

#[test]
fn smile_methods_agree_away_from_short_dated_wings() {
    // short maturities far from the money are excluded: there the Pade
    // transform loses accuracy at large u
    let o = mlrh(&[
        "smile",
        "--methods",
        "pade5,adams:1000",
        "--strikes",
        "0.8,0.9,1.0,1.1,1.2",
        "--maturities",
        "0.25,1",
    ]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&stdout(&o));
    let (m, iv) = (col(&header, "method"), col(&header, "implied_vol"));
    let pade: Vec<f64> = rows.iter().filter(|r| r[m] == "pade5").map(|r| r[iv].parse().unwrap()).collect();
    let adams: Vec<f64> = rows.iter().filter(|r| r[m] == "adams:1000").map(|r| r[iv].parse().unwrap()).collect();
    assert_eq!(pade.len(), 10);
    for (p, a) in pade.iter().zip(&adams) {
        assert!((p - a).abs() < 1e-3, "{p} vs {a}");
    }
}

#[test]
fn zero_vol_of_vol_prices_black_scholes() {
    let o = mlrh(&["smile", "--nu", "0", "--strikes", "0.9,1.1", "--maturities", "1"]);
    assert!(o.status.success());
    let (header, rows) = csv_rows(&stdout(&o));
    for r in rows {
        let v: f64 = r[col(&header, "implied_vol")].parse().unwrap();
        assert!((v - 0.2).abs() < 1e-9, "{v}");
    }
}

#[test]
fn out_flag_writes_data_and_gnuplot_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    let o = mlrh(&["hcurve", "--t-points", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let data = std::fs::read_to_string(&out).unwrap();
    assert!(data.starts_with("t,method,"));
    let script = dir.path().join("curve.gp");
    assert!(std::fs::read_to_string(script).unwrap().contains("curve.csv"));
}

#[test]
fn selftest_passes_and_detects_a_corrupted_gamma() {
    let ok = mlrh(&["selftest"]);
    assert!(ok.status.success());
    let text = stdout(&ok);
    assert!(text.lines().all(|l| !l.starts_with("FAIL")));

    let bad = mlrh(&["selftest", "--corrupt-gamma"]);
    assert_eq!(bad.status.code(), Some(1));
    let text = stdout(&bad);
    for name in ["gamma.factorials", "gamma.reflection"] {
        assert!(text.lines().any(|l| l.starts_with(&format!("FAIL {name}"))), "{name} not flagged:\n{text}");
    }
}
