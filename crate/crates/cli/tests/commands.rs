use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn eqforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eqforge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn group_orders() {
    let g = json_stdout(&eqforge(&[
        "group", "--family", "g", "--a", "5", "--b", "3",
    ]));
    assert_eq!(g["order"], 240);
    assert_eq!(g["enumerated_order"], 240);
    assert_eq!(g["rho"], 3);
    assert_eq!(g["relations_hold"], true);
    assert_eq!(g["specversion"], "1");
    assert_eq!(g["generator_matrices"]["V"].as_array().unwrap().len(), 8);
    let h = json_stdout(&eqforge(&[
        "group", "--family", "h", "--a", "5", "--b", "7",
    ]));
    assert_eq!(h["order"], 280);
    assert!(h["generator_matrices"].get("V").is_none());
}

#[test]
fn invalid_parameters_exit_2() {
    let out = eqforge(&["group", "--family", "g", "--a", "3", "--b", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("𝔸"));
    let out = eqforge(&["group", "--family", "h", "--a", "5", "--b", "15"]);
    assert_eq!(out.status.code(), Some(2));
    let out = eqforge(&["molien", "--a", "5", "--b", "3", "--degree", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unsupported degree 4"));
    let out = eqforge(&[
        "bifurcate",
        "--a",
        "13",
        "--b",
        "3",
        "--coefficients",
        "1,0,0,0,0,0,0,0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn molien_with_cross_check() {
    for (a, b, r3) in [(5, 3, 8), (13, 3, 5)] {
        let (a, b) = (a.to_string(), b.to_string());
        let m = json_stdout(&eqforge(&["molien", "--a", &a, "--b", &b]));
        assert_eq!(m["R"], serde_json::json!([1, 0, r3]));
        assert_eq!(m["R_3"], r3);
        assert_eq!(m["r"], serde_json::json!([1, 0, 1, 0]));
        assert_eq!(m["cross_check"]["agree"], true);
    }
    let m = json_stdout(&eqforge(&[
        "molien",
        "--a",
        "5",
        "--b",
        "7",
        "--no-cross-check",
    ]));
    assert_eq!(m["R"], serde_json::json!([1, 0, 8]));
    assert!(m.get("cross_check").is_none());
}

#[test]
fn isotropy_classes() {
    let g = json_stdout(&eqforge(&["isotropy", "--a", "5", "--b", "3"]));
    assert_eq!(g["class_count"], 1);
    assert_eq!(g["classes"][0]["fixed_dim"], 4);
    let h = json_stdout(&eqforge(&[
        "isotropy", "--family", "h", "--a", "5", "--b", "3",
    ]));
    assert_eq!(h["class_count"], 2);
}

#[test]
fn equivariants_round_trip() {
    let e = json_stdout(&eqforge(&[
        "equivariants",
        "--a",
        "5",
        "--b",
        "3",
        "--degree",
        "1",
    ]));
    assert_eq!(e["dimension"], 1);
    assert_eq!(e["molien"], 1);
    let basis = e["basis"].as_array().unwrap();
    let map: eqforge::poly::PolyMapJson = serde_json::from_value(basis[0].clone()).unwrap();
    let p = eqforge::PolyMap::<f64>::from_json(&map).unwrap();
    // The only linear equivariant is a multiple of the identity.
    let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
    let y = p.evaluate(&x);
    let s = y[0] / x[0];
    assert!(y.iter().zip(&x).all(|(a, b)| (a - s * b).abs() < 1e-12));
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn bifurcate_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = eqforge(&[
        "bifurcate",
        "--a",
        "13",
        "--b",
        "3",
        "--coefficients",
        "1,2,3,4,5",
        "--out-dir",
        d,
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: Value = serde_json::from_str(&read(&dir.path().join("phase_field.json"))).unwrap();
    let ev: Vec<f64> = report["phase_field"]["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e[0].as_f64().unwrap())
        .collect();
    for (a, b) in ev.iter().zip(&[-2.0, 1.0, 2.0, 3.0]) {
        assert!((a - b).abs() < 1e-12);
    }
    assert_eq!(report["phase_field"]["hyperbolic"], true);
    let csv = read(&dir.path().join("branch.csv"));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "r,lambda,x1,x2,x3,x4,x5,x6,x7,x8,residual");
    assert_eq!(lines.len(), 101);
    for line in &lines[1..] {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert!((f[1] + f[0] * f[0]).abs() < 1e-12, "λ = −r² fails: {line}");
    }
    assert!(!csv.contains('\r'));
}

#[test]
fn non_generic_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = eqforge(&[
        "bifurcate",
        "--a",
        "13",
        "--b",
        "3",
        "--coefficients",
        "1,1,0,0,0",
        "--out-dir",
        d,
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("α = β"));
}

#[test]
fn eight_coefficient_path() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = eqforge(&[
        "bifurcate",
        "--a",
        "5",
        "--b",
        "3",
        "--coefficients",
        "1,0,0,0,0,0,0,0",
        "--out-dir",
        d,
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: Value = serde_json::from_str(&read(&dir.path().join("phase_field.json"))).unwrap();
    assert!(report["branch"]["max_law_deviation"].as_f64().unwrap() < 1e-9);
    let negative = "-1.5,0.25,0.5,-0.75,1,0.3,-0.2,0.6";
    let out = eqforge(&[
        "bifurcate",
        "--a",
        "5",
        "--b",
        "3",
        "--coefficients",
        negative,
        "--out-dir",
        d,
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn output_is_byte_identical() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for (i, dir) in dirs.iter().enumerate() {
        let d = dir.path().to_str().unwrap();
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_eqforge"));
        cmd.args([
            "bifurcate",
            "--a",
            "13",
            "--b",
            "3",
            "--coefficients",
            "1,-0.5,0.3,2,0.7",
            "--out-dir",
            d,
        ]);
        // Different worker counts must not change the bytes.
        cmd.env("EQFORGE_THREADS", if i == 0 { "1" } else { "3" });
        assert!(cmd.output().unwrap().status.success());
    }
    for f in ["phase_field.json", "branch.csv"] {
        assert_eq!(
            read(&dirs[0].path().join(f)),
            read(&dirs[1].path().join(f)),
            "{f}"
        );
    }
    let m1 = eqforge(&["molien", "--a", "13", "--b", "3", "--no-cross-check"]);
    let m2 = eqforge(&["molien", "--a", "13", "--b", "3", "--no-cross-check"]);
    assert_eq!(m1.stdout, m2.stdout);
}

#[test]
fn bad_thread_count() {
    let out = Command::new(env!("CARGO_BIN_EXE_eqforge"))
        .args(["group", "--a", "5", "--b", "3"])
        .env("EQFORGE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_quick_and_fault() {
    let out = eqforge(&["verify", "--quick", "--pairs", "5:3"]);
    let v = json_stdout(&out);
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(!names.iter().any(|n| n.ends_with(".all")));
    assert!(stderr(&out).lines().all(|l| l.starts_with("PASS ")));
    let out = eqforge(&["verify", "--quick", "--pairs", "5:3", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("FAIL equivariants.span_match.G(5,3)"));
}
