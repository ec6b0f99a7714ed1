use std::io::Write;
use std::process::{Command, Output};

fn sl1d(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sl1d")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(o: &Output) -> Vec<Vec<String>> {
    stdout(o).lines().skip(1).map(|l| l.split('\t').map(str::to_string).collect()).collect()
}

#[test]
fn census_small_levels() {
    let o = sl1d(&["census", "--q", "3", "--ell", "2", "--max-level", "4", "--classes", "--format", "tsv"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = rows(&o);
    assert_eq!(rows.len(), 5);
    let last = &rows[4];
    assert_eq!((last[1].as_str(), last[2].as_str()), ("24", "9"));
    assert!(rows.iter().all(|r| r[7] == "pass" && r[3] == r[6]));
}

#[test]
fn census_cubic_level_one() {
    let o = sl1d(&["census", "--q", "5", "--ell", "3", "--max-level", "1", "--format", "tsv"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = rows(&o);
    assert_eq!((rows[1][1].as_str(), rows[1][2].as_str()), ("4", "31"));
}

#[test]
fn rejects_even_field() {
    let o = sl1d(&["census", "--q", "4", "--ell", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("q = 4"));
}

#[test]
fn zeta_pole_and_value() {
    let pole = sl1d(&["zeta", "--q", "3", "--ell", "2", "--s", "1", "--format", "tsv"]);
    assert_eq!(pole.status.code(), Some(0));
    assert_eq!(rows(&pole)[0][2], "pole");
    let v = sl1d(&["zeta", "--q", "3", "--ell", "2", "--s", "2"]);
    let json: serde_json::Value = serde_json::from_slice(&v.stdout).unwrap();
    let cf = json["closed_form"][0].as_f64().unwrap();
    assert!((cf - 25.0 / 3.0).abs() < 1e-12);
    assert!(json["abs_error"].as_f64().unwrap() < 1e-12);
}

#[test]
fn zeta_telescoping_table() {
    let o = sl1d(&["zeta", "--q", "3", "--ell", "2", "--s", "-2", "--exact", "--terms", "4", "--format", "tsv"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = rows(&o);
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r[1] == r[2] && r[3] == "pass"));
}

#[test]
fn elem_literal() {
    let o = sl1d(&["elem", "--q", "3", "--ell", "2", "1+n*t3+p^2", "--prec", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["value"], "t0 + n*t3 + n^4*t0 + O(n^6)");
    assert_eq!(json["valuation"], "0");
    let bad = sl1d(&["elem", "--q", "3", "--ell", "2", "1+"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn config_file_and_flag_precedence() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "q = 5\nell = 2\nformat = \"tsv\"").unwrap();
    let path = file.path().to_str().unwrap();
    let from_file = sl1d(&["census", "--config", path, "--max-level", "1"]);
    assert_eq!(rows(&from_file)[1][1], "16");
    let overridden = sl1d(&["census", "--config", path, "--q", "3", "--max-level", "1"]);
    assert_eq!(rows(&overridden)[1][1], "8");

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "q = 5\nbogus = 1").unwrap();
    let o = sl1d(&["census", "--config", bad.path().to_str().unwrap(), "--ell", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "--q", "3", "--ell", "2", "--suite", "arith", "--seed", "7"];
    let (a, b) = (sl1d(&args), sl1d(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_orbit_suite() {
    let o = sl1d(&["verify", "--q", "3", "--ell", "2", "--suite", "orbits", "--m", "2", "--format", "tsv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(rows(&o).iter().all(|r| r[4] == "pass"));
}

#[test]
fn verify_construction_level_three() {
    let o = sl1d(&["verify-construction", "--q", "3", "--ell", "2", "--m", "3", "--format", "tsv"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &rows(&o)[0];
    assert_eq!((r[4].as_str(), r[5].as_str()), ("24", "24"));
}

#[test]
fn guard_exit_code() {
    let o = sl1d(&["verify-construction", "--q", "5", "--ell", "3", "--m", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("484375"));
}

#[test]
fn unknown_suite() {
    let o = sl1d(&["verify", "--q", "3", "--ell", "2", "--suite", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}
