mod common;

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn qencode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qencode")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn info(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sparse_single_entry_is_three_flips() {
    let dir = tempfile::tempdir().unwrap();
    let info_path = dir.path().join("info.json");
    let o = qencode(&[
        "encode",
        r#"{"pattern":"sparse","entries":[[19,1.0]]}"#,
        "-N",
        "64",
        "--info",
        path_str(&info_path),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("u3(")).count(), 3);
    assert_eq!(text.lines().filter(|l| l.starts_with("cx ")).count(), 0);
    let v = info(&info_path);
    assert_eq!(v["gate_count"], 3);
    assert_eq!(v["pattern_name"], "SPARSE");
    let s = common::run_qasm(&text);
    assert!((s[19].norm() - 1.0).abs() < 1e-12);
}

#[test]
fn geometric_reports_linear_complexity() {
    let o = qencode(&["encode", r#"{"pattern":"geometric","r":0.5}"#, "-N", "8", "--emit", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["complexity"], "O(m)");
    assert_eq!(v["N"], 8);
}

#[test]
fn validate_passes_for_exact_patterns() {
    let o = qencode(&["encode", r#"{"pattern":"dicke","k":2}"#, "-N", "16", "--validate", "--emit", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["validated"], true);
}

#[test]
fn malformed_json_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.qasm");
    let o = qencode(&["encode", r#"{"pattern":"sparse","#, "-N", "8", "-o", path_str(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn invalid_fields_exit_2() {
    for spec in [
        r#"{"pattern":"bogus"}"#,
        r#"{"pattern":"step","k_e":3,"extra":1}"#,
        r#"{"pattern":"step","k_e":99}"#,
    ] {
        let o = qencode(&["encode", spec, "-N", "8"]);
        assert_eq!(o.status.code(), Some(2), "{spec}");
        assert!(o.stdout.is_empty());
    }
    let o = qencode(&["encode", r#"{"pattern":"step","k_e":3}"#, "-N", "12"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn predict_outputs() {
    let o = qencode(&["predict", r#"{"pattern":"polynomial","coeffs":[0,1]}"#, "-N", "4096"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["exact"], true);
    assert_eq!(v["m"], 12);

    let o = qencode(&["predict", r#"{"pattern":"hamming","r":0.5}"#, "-N", "64"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["gate_count_2q"], 0);

    let o = qencode(&["predict", r#"{"pattern":"bogus"}"#, "-N", "8"]);
    assert_eq!(o.status.code(), Some(2));
}

fn write_csv(path: &Path, v: &[f64]) {
    let text: String = v.iter().map(|x| format!("{x:e}\n")).collect();
    std::fs::write(path, text).unwrap();
}

#[test]
fn mps_gaussian_is_loaded_accurately() {
    let dir = tempfile::tempdir().unwrap();
    let vec_path = dir.path().join("g.csv");
    let info_path = dir.path().join("info.json");
    let n = 256;
    let v: Vec<f64> = (0..n).map(|i| (-((i as f64 - 128.0) / 30.0).powi(2) / 2.0).exp()).collect();
    write_csv(&vec_path, &v);
    let o = qencode(&["mps", path_str(&vec_path), "--bond-dim", "8", "--info", path_str(&info_path)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let meta = info(&info_path);
    assert!(meta["params"]["truncation_error_sq"].as_f64().unwrap() < 1e-12);

    let s = common::run_qasm(&stdout(&o));
    let target: Vec<C> = v.iter().map(|&x| C::new(x, 0.0)).collect();
    let kept = &s[..n];
    let prob: f64 = kept.iter().map(|z| z.norm_sqr()).sum();
    assert!((prob - 1.0).abs() < 1e-9);
    assert!(common::distance(kept, &target) < 1e-6);
}

#[test]
fn mps_product_state_has_no_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let vec_path = dir.path().join("p.json");
    let info_path = dir.path().join("info.json");
    let a = [0.6, 0.8];
    let b = [1.0, -2.0];
    let c = [3.0, 1.0];
    let v: Vec<f64> = (0..8).map(|i| a[i >> 2] * b[(i >> 1) & 1] * c[i & 1]).collect();
    std::fs::write(&vec_path, serde_json::to_string(&v).unwrap()).unwrap();
    let o = qencode(&["mps", path_str(&vec_path), "--bond-dim", "1", "--validate", "--info", path_str(&info_path)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(info(&info_path)["params"]["truncation_error_sq"], 0.0);
}

#[test]
fn mps_empty_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let vec_path = dir.path().join("e.csv");
    std::fs::write(&vec_path, "").unwrap();
    let o = qencode(&["mps", path_str(&vec_path)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mps_truncated_random_vector_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let vec_path = dir.path().join("r.csv");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let v: Vec<f64> = (0..256).map(|_| rng.random_range(-1.0..1.0)).collect();
    write_csv(&vec_path, &v);
    let o = qencode(&["mps", path_str(&vec_path), "--bond-dim", "4", "--validate"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn golden_qasm() {
    let cases = [
        ("sparse_19_n64", r#"{"pattern":"sparse","entries":[[19,1.0]]}"#, "64"),
        ("sparse_two_n8", r#"{"pattern":"sparse","entries":[[1,3.0],[6,-4.0]]}"#, "8"),
        ("step_3_n8", r#"{"pattern":"step","k_e":3}"#, "8"),
    ];
    for (name, spec, n) in cases {
        let golden = std::fs::read_to_string(format!("{}/tests/golden/{name}.qasm", env!("CARGO_MANIFEST_DIR"))).unwrap();
        let o = qencode(&["encode", spec, "-N", n]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o), golden, "{name}");
    }
}

#[test]
fn qasm_output_reparses_to_the_target() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.qasm");
    let spec = r#"{"pattern":"sum","terms":[{"weight":1,"of":{"pattern":"step","k_e":5}},{"weight":0.5,"of":{"pattern":"walsh","k":1}}]}"#;
    let o = qencode(&["encode", spec, "-N", "16", "-o", path_str(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let s = common::run_qasm(&std::fs::read_to_string(&out).unwrap());
    let p = qencode::cli::parse_pattern_str(spec).unwrap();
    let t = common::target(&p, 16);
    assert!(common::distance(&s[..16], &t) < 1e-9);
}
