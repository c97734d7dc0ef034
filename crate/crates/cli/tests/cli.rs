use std::path::Path;
use std::process::Command;

use serde_json::Value;

const SQRT3: f64 = 1.732_050_807_568_877_2;

fn hexcmc(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_hexcmc")).args(args).output().expect("spawn hexcmc");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap_or_else(|e| panic!("{e}: {text}"))
}

fn f(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} in {v}"))
}

fn read_json(p: &Path) -> Value {
    json(&std::fs::read_to_string(p).unwrap())
}

fn path(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn solve_unduloid_on_branch() {
    let (code, out, _) = hexcmc(&["solve", "--kind", "unduloid", "--r", "0.05"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["kind"], "unduloid");
    assert!(f(&v, "Q") < 2.0);
    assert!(f(&v, "residual_norm") < 1e-9);
    assert!(v["iterations"].as_u64().is_some());
    for key in ["r", "Q", "R", "S", "q", "s"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn solve_trivial_is_exact() {
    let (code, out, _) = hexcmc(&["solve", "--kind", "unduloid", "--r", "0"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(f(&v, "Q"), 2.0);
    assert_eq!(f(&v, "R"), 2.0 / SQRT3);
    assert_eq!(f(&v, "S"), 2.0 / SQRT3);
    assert_eq!((f(&v, "q"), f(&v, "s"), f(&v, "residual_norm")), (0.0, 0.0, 0.0));
}

#[test]
fn solve_out_of_range_reports_failure() {
    let (code, out, err) = hexcmc(&["solve", "--kind", "nodoid", "--r", "0.9"]);
    assert_eq!(code, 2);
    let v = json(&out);
    assert_eq!(v["status"], "failed");
    assert_eq!(v["kind"], "nodoid");
    assert!(v["error"].as_str().unwrap().contains("0.9"));
    assert!(err.contains("error"));
}

#[test]
fn flags_are_validated() {
    assert_eq!(hexcmc(&["solve", "--kind", "unduloid", "--r", "0.05", "--bogus"]).0, 1);
    assert_eq!(hexcmc(&["solve", "--kind", "unduloid"]).0, 1);
    assert_eq!(hexcmc(&["solve", "--kind", "torus", "--r", "0.05"]).0, 1);
    assert_eq!(hexcmc(&["solve", "--kind", "unduloid", "--r", "-1"]).0, 1);
    assert_eq!(hexcmc(&["solve", "--kind", "unduloid", "--r", "0.05", "--fit"]).0, 1);
    assert_eq!(hexcmc(&["verify", "lemma", "--resolution", "13"]).0, 1);
    assert_eq!(hexcmc(&["verify", "lemma", "--hole", "2"]).0, 1);
    let (code, out, _) = hexcmc(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("sweep"));
}

#[test]
fn io_failure_exits_3() {
    let (code, _, err) = hexcmc(&["solve", "--kind", "unduloid", "--r", "0", "--out", "/nonexistent-dir/x.json"]);
    assert_eq!(code, 3);
    assert!(err.contains("I/O"));
    assert_eq!(hexcmc(&["verify", "curvature", "--surface", "/nonexistent-dir/x.json"]).0, 3);
}

#[test]
fn mesh_wulff() {
    let dir = tempfile::tempdir().unwrap();
    let obj = path(&dir, "wulff.obj");
    assert_eq!(hexcmc(&["mesh", "--kind", "wulff", "--out", &obj]).0, 0);
    let text = std::fs::read_to_string(&obj).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 12);
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 8);
    let side = read_json(Path::new(&format!("{obj}.json")));
    assert!((f(&side, "E") - 12.0 * SQRT3).abs() < 1e-12);
    assert!((f(&side, "V") - 4.0 * SQRT3).abs() < 1e-12);
    assert_eq!(f(&side, "closure"), 0.0);
}

#[test]
fn mesh_solved_nodoid_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let params = path(&dir, "nodoid.json");
    let obj = path(&dir, "nodoid.obj");
    assert_eq!(hexcmc(&["solve", "--kind", "nodoid", "--r", "0.05", "--out", &params]).0, 0);
    assert_eq!(hexcmc(&["mesh", "--kind", "nodoid", "--params", &params, "--out", &obj]).0, 0);
    let text = std::fs::read_to_string(&obj).unwrap();
    // every record is o, v or f, and f indices are in range
    let mut verts = 0;
    let mut faces = 0;
    for line in text.lines() {
        let mut it = line.split(' ');
        match it.next().unwrap() {
            "o" => {}
            "v" => {
                let coords: Vec<f64> = it.map(|t| t.parse().unwrap()).collect();
                assert_eq!(coords.len(), 3);
                verts += 1;
            }
            "f" => {
                let idx: Vec<usize> = it.map(|t| t.parse().unwrap()).collect();
                assert!(idx.len() >= 3 && idx.iter().all(|&i| i >= 1 && i <= verts));
                faces += 1;
            }
            other => panic!("record {other}"),
        }
    }
    // 6 plain prism faces, 2 annulus faces as 4 quads each, 6 tube faces
    assert_eq!(faces, 20);
    let side = read_json(Path::new(&format!("{obj}.json")));
    assert_eq!(side["faces"].as_u64(), Some(20));
    assert_eq!(side["objects"].as_u64(), Some(2));
    assert_eq!(side["period"].as_array().unwrap().len(), 3);
    assert!(f(&side, "closure") < 1e-12);
    // kind mismatch is rejected
    assert_eq!(hexcmc(&["mesh", "--kind", "unduloid", "--params", &params, "--out", &obj]).0, 1);
}

#[test]
fn mesh_assembly_needs_a_fit() {
    let dir = tempfile::tempdir().unwrap();
    let obj = path(&dir, "a.obj");
    let (code, out, _) = hexcmc(&["mesh", "--kind", "assembly", "--out", &obj]);
    assert_eq!(code, 2);
    assert_eq!(json(&out)["status"], "failed");
    assert!(!Path::new(&obj).exists());

    let params = path(&dir, "unfitted.json");
    assert_eq!(hexcmc(&["solve", "--kind", "assembly", "--r", "0.03", "--out", &params]).0, 0);
    let v = read_json(Path::new(&params));
    assert_eq!(v["fitted"], false);
    assert!(f(&v, "Q0") < 2.0 && f(&v, "R2") > 2.0 / SQRT3 && f(&v, "r2") > 0.0);
    assert_eq!(hexcmc(&["mesh", "--kind", "assembly", "--params", &params, "--out", &obj]).0, 2);
    assert!(!Path::new(&obj).exists());
}

#[test]
fn verify_lemma_examples() {
    let (code, out, _) =
        hexcmc(&["verify", "lemma", "--x1", "1", "--y1", "1", "--hole", "0.05", "--trials", "10000", "--seed", "7"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["lemma_regime"], true);
    assert!(f(&v, "min_proper_margin") > 0.0);
    assert_eq!(f(&v, "min_margin"), 0.0);

    let (code, out, _) = hexcmc(&["verify", "lemma", "--x1", "10", "--y1", "1.001", "--hole", "1", "--trials", "500"]);
    assert_eq!(code, 1);
    let v = json(&out);
    assert_eq!(v["pass"], false);
    let w = &v["witness"];
    assert!(f(w, "ratio") < f(&v, "annulus_ratio"));
    // a full-height rectangle beside the hole, as in case (ii)
    let rect = w["rects"][0].as_array().unwrap();
    assert_eq!(w["rects"].as_array().unwrap().len(), 1);
    assert!((rect[3].as_f64().unwrap() - rect[2].as_f64().unwrap() - 2.002).abs() < 1e-12);
}

#[test]
fn verify_variation_small() {
    let (code, out, _) = hexcmc(&["verify", "variation", "--functions", "20", "--grid", "16", "--seed", "3"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(f(&v, "I_constant"), 0.0);
    assert!(f(&v, "min_I") >= -1e-12);
}

#[test]
fn verify_curvature_of_solved_files() {
    let dir = tempfile::tempdir().unwrap();
    let params = path(&dir, "u.json");
    assert_eq!(hexcmc(&["solve", "--kind", "unduloid", "--r", "0.05", "--out", &params]).0, 0);
    let (code, out, _) = hexcmc(&["verify", "curvature", "--surface", &params]);
    assert_eq!(code, 0);
    let v = json(&out);
    let res = v["residuals"].as_object().unwrap();
    assert_eq!(res.len(), 5);
    assert!(res.values().all(|x| x.as_f64().unwrap().abs() < 1e-9));

    let (code, out, _) = hexcmc(&["verify", "curvature", "--wulff"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["residuals"].as_object().unwrap().len(), 8);

    // a perturbed period is not critical
    let mut p = read_json(Path::new(&params));
    p["Q"] = serde_json::json!(1.9);
    let bad = path(&dir, "bad.json");
    std::fs::write(&bad, p.to_string()).unwrap();
    let (code, out, _) = hexcmc(&["verify", "curvature", "--surface", &bad]);
    assert_eq!(code, 1);
    assert_eq!(json(&out)["pass"], false);
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn sweep_examples() {
    let dir = tempfile::tempdir().unwrap();
    let csv = path(&dir, "s.csv");
    assert_eq!(hexcmc(&["sweep", "--kind", "unduloid", "--r", "0.01:0.05:0.01", "--out", &csv]).0, 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("r,Q,R,S,q,s,residual,period_length"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 5);
    let dist = |row: &Vec<String>| {
        let x: Vec<f64> = row[1..6].iter().map(|c| c.parse().unwrap()).collect();
        let w = 2.0 / SQRT3;
        (x[0] - 2.0).abs() + (x[1] - w).abs() + (x[2] - w).abs() + x[3].abs() + x[4].abs()
    };
    assert!(dist(&rows[0]) < dist(&rows[4]));
    assert!(rows.iter().all(|r| r[6].parse::<f64>().unwrap() < 1e-9));

    let empty = path(&dir, "empty.csv");
    assert_eq!(hexcmc(&["sweep", "--kind", "unduloid", "--r", "0.05:0.01:0.01", "--out", &empty]).0, 1);
    assert!(!Path::new(&empty).exists());

    let (code, out, _) = hexcmc(&["sweep", "--kind", "nodoid", "--r", "0.02,0.9"]);
    assert_eq!(code, 2);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][6], "failed");
    assert!(rows[1][1..6].iter().all(String::is_empty));
}

#[test]
fn sweep_modes_are_byte_identical() {
    let a = hexcmc(&["sweep", "--kind", "nodoid", "--r", "0.01:0.04:0.01"]);
    let b = hexcmc(&["sweep", "--kind", "nodoid", "--r", "0.01:0.04:0.01", "--sequential"]);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
}
