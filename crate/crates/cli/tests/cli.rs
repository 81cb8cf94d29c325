use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torus-locus")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_slice(&run(args).stdout).expect("JSON output")
}

fn verify(path: &Path) -> i32 {
    code(&["verify-certificate", path.to_str().unwrap()])
}

const UNKNOWN_CURVE: &str = "(z + w + 3)*(z^-1 + w^-1 + 3) + 1";

#[test]
fn decide_exit_codes() {
    assert_eq!(code(&["decide", "z^2*w - 1"]), 0);
    assert_eq!(code(&["decide", "z + w - 2"]), 1);
    assert_eq!(code(&["decide", UNKNOWN_CURVE]), 2);
    assert_eq!(code(&["decide", ""]), 64);
    assert_eq!(code(&["decide", "z + * w"]), 64);
    assert_eq!(code(&["decide", "0"]), 65);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&[]), 64);
    assert_eq!(code(&["frobnicate"]), 64);
    assert_eq!(code(&["decide", "--grid", "8", "z*w - 1"]), 64);
    assert_eq!(code(&["decide", "--tol", "-1", "z*w - 1"]), 64);
    assert_eq!(code(&["decide", "--format", "csv", "z*w - 1"]), 64);
    assert_eq!(code(&["decide", "--vars", "z,z", "z*w - 1"]), 64);
}

#[test]
fn parse_errors_point_at_the_problem() {
    let out = run(&["decide", "--vars", "z,w", "z + q"]);
    assert_eq!(out.status.code(), Some(64));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("position 4"), "{err}");
}

#[test]
fn solve_outputs() {
    let v = json(&["solve", "2*z^2*w^3 + 3*i*z*w^2 - (6/5 + 23/5*i)"]);
    assert_eq!(v["solutions"]["kind"], "finite");
    assert_eq!(v["solutions"]["points"].as_array().unwrap().len(), 2);

    let csv = String::from_utf8(run(&["solve", "--format", "csv", "z*w - 2"]).stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("re_z,im_z,re_w,im_w,residual"));
    assert!(csv.contains("|alpha| != 1"));
    assert!(!csv.lines().skip(1).any(|l| !l.starts_with('#')));

    let csv = String::from_utf8(run(&["solve", "--format", "csv", "z^2*w - 1"]).stdout).unwrap();
    assert!(csv.contains("coset_family"));
    let rows: Vec<&str> = csv.lines().skip(1).filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 16);
    for row in rows {
        let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells.len(), 5);
        assert!(cells[4] < 1e-12);
    }

    let out = run(&["solve", "z + w + z*w + 1"]);
    assert_eq!(out.status.code(), Some(65));
    assert!(String::from_utf8(out.stderr).unwrap().contains("decide"));
}

#[test]
fn circle_map_commands() {
    let v = json(&["circle-map", "verify", "(z-2)", "(1-2*z)"]);
    assert_eq!(v["status"], "proven");
    assert_eq!(code(&["circle-map", "verify", "z - 2", "1 - 3*z"]), 1);
    let v = json(&["circle-map", "make", "z1*z2+2"]);
    assert_eq!(v["numerator"], "z1*z2 + 2");
    assert_eq!(v["denominator"], "2*z1*z2 + 1");
    let v = json(&["circle-map", "factor", "(z - 1/2)*(z - 1/3*i)*(z - 1 - i)"]);
    assert_eq!(v["factors"]["alphas"].as_array().unwrap().len(), 3);
    assert_eq!(code(&["circle-map", "factor", "z - 2", "1 - 3*z"]), 65);
}

#[test]
fn plots_are_svg_and_bounded() {
    for expr in ["z^2*w - 1", "z + w - 2", "2*z^2*(w^2 + 1) - w*(z^2 + 1)^2"] {
        let out = run(&["plot", expr]);
        assert_eq!(out.status.code(), Some(0), "{expr}");
        assert!(out.stdout.len() <= 2 * 1024 * 1024);
        let svg = String::from_utf8(out.stdout).unwrap();
        assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
    }
    // no witness: heat-line plus a note, with the single torus point marked
    let out = run(&["plot", "z + w - 2"]);
    assert!(String::from_utf8(out.stderr).unwrap().contains("note:"));
    assert_eq!(String::from_utf8(out.stdout).unwrap().matches(r#"r="4""#).count(), 1);
}

#[test]
fn output_is_deterministic() {
    let cases: [&[&str]; 5] = [
        &["decide", "2*z^2*(w^2 + 1) - w*(z^2 + 1)^2"],
        &["decide", UNKNOWN_CURVE],
        &["solve", "--format", "csv", "2*z^2*w^3 + 3*i*z*w^2 - (6/5 + 23/5*i)"],
        &["plot", "z^2*w - 1"],
        &["circle-map", "verify", "--seed", "9", "z1 - 2", "1 - 3*z2"],
    ];
    for args in cases {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
    let v = json(&["decide", "z^2*w - 1"]);
    assert!(v["timing"].is_null());
    let v = json(&["decide", "--timing", "z^2*w - 1"]);
    assert!(v["timing"].as_f64().is_some());
}

#[test]
fn every_report_replays() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 11] = [
        &["decide", "z + w - 2"],
        &["decide", "z^2*w - 1"],
        &["decide", "w*(2 + z) - (1 + 2*z)"],
        &["decide", "2*z^2*(w^2 + 1) - w*(z^2 + 1)^2"],
        &["decide", UNKNOWN_CURVE],
        &["decide", "z1*z2*z3 - 1"],
        &["solve", "2*z^2*w^3 + 3*i*z*w^2 - (6/5 + 23/5*i)"],
        &["solve", "z^2*w - 1"],
        &["circle-map", "make", "z1*z2 + 2"],
        &["circle-map", "verify", "z - 2", "1 - 3*z"],
        &["circle-map", "factor", "(z - 1/2)*(z + 2)"],
    ];
    for (k, args) in cases.iter().enumerate() {
        let out = run(args);
        let path = dir.path().join(format!("{k}.json"));
        std::fs::write(&path, &out.stdout).unwrap();
        assert_eq!(verify(&path), 0, "{args:?}");
    }
}

#[test]
fn tampered_or_missing_reports_fail() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = json(&["decide", "z^2*w - 1"]);
    v["result"]["certificate"]["detail"]["arc"]["points"][7]["value"] = serde_json::json!([0.6, 0.8]);
    let path = dir.path().join("bad.json");
    std::fs::write(&path, v.to_string()).unwrap();
    assert_eq!(verify(&path), 3);

    let mut v = json(&["decide", "z + w - 2"]);
    v["input"]["expressions"][0] = Value::from("z + w - 3");
    std::fs::write(&path, v.to_string()).unwrap();
    assert_eq!(verify(&path), 3);

    std::fs::write(&path, "not json").unwrap();
    assert_eq!(verify(&path), 65);
    assert_eq!(verify(&dir.path().join("missing.json")), 66);
}
