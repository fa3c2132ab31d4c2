use std::f64::consts::PI;
use std::process::{Command, Output};

use trispec::scanner::{FemSetting, ScanConfig};

fn trispec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trispec")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn eig_half_square() {
    let o = trispec(&["eig", "--vertices", "0,0 1,0 0,1", "--k", "2", "--level", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "index,level,eigenvalue,extrapolated,error_estimate");
    let ext: Vec<f64> = lines.map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(ext.len(), 2);
    assert!((ext[0] / (PI * PI) - 1.0).abs() < 1e-3);
    assert!((ext[1] / (2.0 * PI * PI) - 1.0).abs() < 2e-3);
}

#[test]
fn eig_json_parses() {
    let o = trispec(&["eig", "--vertices", "0,0 1,0 0.5,0.8660254037844386", "--level", "5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["extrapolated"].as_array().unwrap().len(), 2);
}

#[test]
fn scan_writes_header_and_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    let o = trispec(&["scan", "--grid", "6x5", "--level", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let expected = ScanConfig::new(6, 5, 0.05, FemSetting::Level(4), None).unwrap().grid().len();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().clone();
    assert_eq!(&header[0], "r");
    let rows: Vec<_> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), expected);
    assert!(rows.iter().all(|r| r.len() == header.len()));
    let again = trispec(&["scan", "--grid", "6x5", "--level", "4", "--jobs", "2"]);
    assert_eq!(stdout(&again), text);
}

#[test]
fn certify_one_up_s() {
    let o = trispec(&["certify", "--theorem", "1upS", "--samples", "10000"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for field in ["theorem", "samples", "worst_margin", "at", "pass"] {
        assert!(v.get(field).is_some(), "missing {field}");
    }
    assert_eq!(v["theorem"], "1upS");
    assert_eq!(v["pass"], true);
}

#[test]
fn integrals_and_bounds_succeed() {
    assert_eq!(trispec(&["integrals"]).status.code(), Some(0));
    let o = trispec(&["bounds", "--rs", "1.5,0.2", "--level", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["bounds"].as_array().unwrap().len(), 11);
}

#[test]
fn exit_codes() {
    assert_eq!(trispec(&["eig", "--vertices", "0,0 1,0 2,0"]).status.code(), Some(2));
    assert_eq!(trispec(&["certify", "--theorem", "unknown"]).status.code(), Some(2));
    assert_eq!(trispec(&["scan", "--grid", "1x5"]).status.code(), Some(2));
    assert_eq!(trispec(&["no-such-command"]).status.code(), Some(2));
    // a negative tolerance cannot be met even at the equality corner
    let o = trispec(&["verify", "--grid", "3x3", "--level", "4", "--tolerance=-0.5"]);
    assert_eq!(o.status.code(), Some(1));
}
