use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn esf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_esf")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn num(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn analyze_reports_the_invariant_form() {
    let out = esf(&["analyze", "--matrix", "0,-2;1,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let q2 = &v["Q2"];
    let expect = [[2.0, -0.5], [-0.5, 1.0]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((num(&q2[i][j]) - expect[i][j]).abs() < 1e-12);
        }
    }
    assert!(num(&v["orthogonality_defect"]) < 1e-12);
    assert_eq!(v["q"], 2);

    let v = json(&esf(&["analyze", "--matrix", "1,-1;1,1"]));
    assert_eq!(v["Q2"][0][1].as_f64(), Some(0.0));
    assert_eq!(v["digits_A"]["w"].as_array().unwrap().len(), 2);
}

#[test]
fn exit_codes() {
    assert_eq!(esf(&["analyze", "--matrix", "2,1;0,2"]).status.code(), Some(3));
    assert_eq!(esf(&["analyze", "--matrix", "1,2;3"]).status.code(), Some(2));
    assert_eq!(esf(&["analyze", "--matrix", "1,0;0,1"]).status.code(), Some(2));
    assert_eq!(esf(&["spectrum", "--matrix", "2", "--tol", "0"]).status.code(), Some(2));
    assert_eq!(esf(&["mask", "--matrix", "2,1;0,2"]).status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.json");
    std::fs::write(&cfg, r#"{"matrix": [[2]], "level": 3}"#).unwrap();
    let out = esf(&["eval", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("level"));
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.json");
    std::fs::write(&cfg, r#"{"matrix": [[2]], "m": 2, "J": 1}"#).unwrap();
    let rows = |args: &[&str]| csv_rows(&String::from_utf8(esf(args).stdout).unwrap()).len();
    let c = cfg.to_str().unwrap();
    assert_eq!(rows(&["eval", "--config", c]), 9);
    assert_eq!(rows(&["eval", "--config", c, "--J", "2"]), 17);
}

#[test]
fn univariate_mask_and_spectrum() {
    let v = json(&esf(&["mask", "--matrix", "2"]));
    let coeffs: Vec<(i64, f64)> = v["mask"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| (t["k"][0].as_i64().unwrap(), num(&t["c"])))
        .collect();
    assert_eq!(coeffs, vec![(-1, 0.25), (0, 0.5), (1, 0.25)]);
    let v = json(&esf(&["mask", "--matrix", "2", "--m", "2"]));
    let sq: Vec<f64> = v["mask_m"].as_array().unwrap().iter().map(|t| num(&t["c"])).collect();
    assert_eq!(sq, vec![0.0625, 0.25, 0.375, 0.25, 0.0625]);
    let r: Vec<f64> = v["refinement_coefficients"]["c"].as_array().unwrap().iter().map(|t| num(&t["c"])).collect();
    assert_eq!(r, vec![0.125, 0.5, 0.75, 0.5, 0.125]);

    let v = json(&esf(&["spectrum", "--matrix", "2"]));
    assert!((num(&v["B"]) - 1.0).abs() < 1e-12);
}

#[test]
fn supremum_values_of_the_planar_examples() {
    for (m, b) in [("1,-1;1,1", 1.0), ("0,-2;1,1", 2.0), ("1,-2;1,0", 25.0 / 24.0), ("2,0;0,2", 9.0 / 8.0)] {
        let v = json(&esf(&["spectrum", "--matrix", m]));
        assert!((num(&v["B"]) - b).abs() < 1e-6, "{m}");
    }
}

#[test]
fn hat_values_are_exact() {
    let out = esf(&["eval", "--matrix", "2", "--J", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# A=[[2]], J=3, d=1\n"));
    for row in csv_rows(&text) {
        assert_eq!(row[1], (1.0 - row[0].abs()).max(0.0));
    }
}

#[test]
fn cubic_b_spline_from_the_cascade() {
    let text = String::from_utf8(esf(&["eval", "--matrix", "2", "--m", "2", "--J", "4"]).stdout).unwrap();
    for row in csv_rows(&text) {
        let t = row[0].abs();
        let b = if t < 1.0 { 2.0 / 3.0 - t * t + t * t * t / 2.0 } else { (2.0 - t).max(0.0).powi(3) / 6.0 };
        assert!((row[1] - b).abs() < 1e-12, "{row:?}");
    }
}

#[test]
fn verify_exit_status_follows_the_report() {
    let out = esf(&["verify", "--matrix", "2", "--m", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], true);

    let out = esf(&["verify", "--matrix", "0,-2;1,1"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let status = |name: &str| {
        v["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap()["status"].clone()
    };
    assert_eq!(status("riesz"), "fail");
    assert_eq!(status("cascade"), "fail");
    assert_eq!(status("partition_of_unity"), "skip");
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap()
}

#[test]
fn reports_are_byte_identical_for_one_seed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = esf(&[
            "report", "--matrix", "1,-1;1,1", "--J", "7", "--seed", "7", "--out", dir.path().to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let mut names: Vec<String> = std::fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        ["analyze.json", "mask.json", "mask.txt", "phi.csv", "report.json", "spectrum.csv", "spectrum.json"]
    );
    for name in &names {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
    let report: Value = serde_json::from_slice(&read(a.path(), "report.json")).unwrap();
    assert!(report["checks"][0].get("runtime_ms").is_none());
}

#[test]
fn timings_are_opt_in() {
    let v = json(&esf(&["verify", "--matrix", "2", "--timings"]));
    assert!(v["checks"][0]["runtime_ms"].is_number());
}
