use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mubs_core::verification::fixtures::{load_corrected, read_manifest};
use serde_json::Value;

fn mubs(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mubs"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn generate_counts_bases() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mubs(tmp.path(), &["generate", "--method", "prime", "--p", "5", "--out", "d5.json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(read_json(&tmp.path().join("d5.json"))["bases"].as_array().unwrap().len(), 6);
    let out = mubs(tmp.path(), &["generate", "--method", "prime-squared", "--p", "3", "--theta", "2", "--out", "d9.json"]);
    assert_eq!(code(&out), 0);
    let doc = read_json(&tmp.path().join("d9.json"));
    assert_eq!(doc["bases"].as_array().unwrap().len(), 10);
    assert_eq!(doc["provenance"]["theta"], 2);
}

#[test]
fn generate_errors() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&mubs(tmp.path(), &["generate", "--method", "prime", "--p", "6"])), 3);
    assert_eq!(code(&mubs(tmp.path(), &["generate", "--method", "wocjan-beth", "--p", "4"])), 3);
    assert_eq!(code(&mubs(tmp.path(), &["generate", "--method", "prime"])), 2);
    assert_eq!(code(&mubs(tmp.path(), &["generate", "--method", "prime-squared", "--p", "7", "--theta", "1"])), 2);
    assert_eq!(code(&mubs(tmp.path(), &["generate", "--method", "hadamard", "--p", "3"])), 2);
    assert_eq!(code(&mubs(tmp.path(), &["generate", "--p", "3"])), 2);
    assert_eq!(code(&mubs(tmp.path(), &["frobnicate"])), 2);
}

#[test]
fn every_method_verifies() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 8] = [
        &["--method", "prime", "--p", "7"],
        &["--method", "prime-squared", "--p", "5"],
        &["--method", "prime-squared", "--p", "2"],
        &["--method", "two-qubit"],
        &["--method", "three-qubit"],
        &["--method", "wocjan-beth", "--p", "3"],
        &["--method", "product", "--dA", "2", "--dB", "3"],
        &["--method", "blocking-pair", "--p", "3", "--r", "2"],
    ];
    for args in cases {
        let mut full = vec!["generate"];
        full.extend_from_slice(args);
        full.extend(["--out", "set.json"]);
        assert_eq!(code(&mubs(tmp.path(), &full)), 0, "{args:?}");
        let out = mubs(tmp.path(), &["verify", "set.json"]);
        assert_eq!(code(&out), 0, "{args:?}: {}", stdout(&out));
    }
}

#[test]
fn verify_reference_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let d4 = fixture("d4.json");
    let out = mubs(tmp.path(), &["verify", d4.to_str().unwrap(), "--design", "--complete"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).ends_with("PASS\n"));
    // the printed d = 6 table carries one wrong exponent
    let raw = fixture("d6.json");
    assert_eq!(code(&mubs(tmp.path(), &["verify", raw.to_str().unwrap()])), 2);
    let dir = fixture("");
    let manifest = read_manifest(&dir).unwrap();
    let entry = manifest.fixtures.iter().find(|e| e.dim == 6).unwrap();
    let corrected = load_corrected(&dir, entry).unwrap();
    std::fs::write(tmp.path().join("d6.json"), corrected.to_canonical_json()).unwrap();
    let d6 = "d6.json";
    let out = mubs(tmp.path(), &["verify", d6]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let out = mubs(tmp.path(), &["verify", d6, "--complete"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("complete: no (3 of 7 bases)"));
}

#[test]
fn verify_reports_witnesses() {
    let tmp = tempfile::tempdir().unwrap();
    mubs(tmp.path(), &["generate", "--method", "two-qubit", "--out", "d4.json"]);
    // replace one basis by a copy of another
    let mut doc = read_json(&tmp.path().join("d4.json"));
    let first = doc["bases"][0].clone();
    doc["bases"][1]["exact"] = first["exact"].clone();
    doc["bases"][1]["scale"] = first["scale"].clone();
    std::fs::write(tmp.path().join("bad.json"), serde_json::to_string(&doc).unwrap()).unwrap();
    let out = mubs(tmp.path(), &["verify", "bad.json"]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("unbiased: no"), "{text}");
    assert!(text.contains("witness"), "{text}");
    let out = mubs(tmp.path(), &["verify", "bad.json", "--format", "json"]);
    assert_eq!(code(&out), 1);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], false);
    assert!(!report["verification"]["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn verify_rejects_malformed_documents() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("junk.json"), "{\"dim\": 3, \"bases\": [").unwrap();
    assert_eq!(code(&mubs(tmp.path(), &["verify", "junk.json"])), 2);
    assert_eq!(code(&mubs(tmp.path(), &["verify", "missing.json"])), 2);
    // an exponent grid that is not unitary
    mubs(tmp.path(), &["generate", "--method", "prime", "--p", "3", "--out", "d3.json"]);
    let mut doc = read_json(&tmp.path().join("d3.json"));
    doc["bases"][0]["exact"][1][1] = Value::from(0);
    std::fs::write(tmp.path().join("bent.json"), serde_json::to_string(&doc).unwrap()).unwrap();
    let out = mubs(tmp.path(), &["verify", "bent.json"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not unitary"));
}

#[test]
fn analyze_conservation() {
    let tmp = tempfile::tempdir().unwrap();
    mubs(tmp.path(), &["generate", "--method", "prime-squared", "--p", "3", "--theta", "2", "--out", "d9.json"]);
    let out = mubs(tmp.path(), &["analyze", "d9.json", "--split", "3x3", "--out", "a9.json"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("total purity 54.0000000000 vs reference 54.0000000000"));
    let doc = read_json(&tmp.path().join("a9.json"));
    let rows: f64 = doc["bases"].as_array().unwrap().iter().map(|b| b["sum"].as_f64().unwrap()).sum();
    assert!((rows - doc["total"].as_f64().unwrap()).abs() < 1e-10);
    assert_eq!(doc["product_bases"], 4);
    assert_eq!(doc["maximal_bases"], 6);

    mubs(tmp.path(), &["generate", "--method", "three-qubit", "--out", "d8.json"]);
    let out = mubs(tmp.path(), &["analyze", "d8.json", "--split", "2 x 4"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("total purity 48.0000000000 vs reference 48.0000000000"));
    assert_eq!(code(&mubs(tmp.path(), &["analyze", "d9.json", "--split", "2x4"])), 2);
    assert_eq!(code(&mubs(tmp.path(), &["analyze", "d9.json", "--split", "three"])), 2);
}

#[test]
fn analyze_haar_estimate_is_seeded() {
    let tmp = tempfile::tempdir().unwrap();
    mubs(tmp.path(), &["generate", "--method", "two-qubit", "--out", "d4.json"]);
    let run = |seed: &str| {
        let out = mubs(tmp.path(), &["analyze", "d4.json", "--split", "2x2", "--samples", "500", "--seed", seed]);
        assert_eq!(code(&out), 0);
        stdout(&out)
    };
    assert_eq!(run("4"), run("4"));
    assert_ne!(run("4"), run("5"));
    assert!(run("4").contains("vs 0.800000"));
}

#[test]
fn export_formats() {
    let tmp = tempfile::tempdir().unwrap();
    mubs(tmp.path(), &["generate", "--method", "prime", "--p", "3", "--out", "d3.json"]);
    let text = stdout(&mubs(tmp.path(), &["export", "d3.json", "--format", "text"]));
    assert!(text.contains("α = exp(2πi/3)"));
    assert!(text.contains("B_1  m=1  1/√3\n    1    1    1\n    α  α^2    1\n    α    1  α^2\n"), "{text}");
    let json = mubs(tmp.path(), &["export", "d3.json", "--format", "json"]);
    assert_eq!(json.stdout, std::fs::read(tmp.path().join("d3.json")).unwrap());
    let tex = stdout(&mubs(tmp.path(), &["export", "d3.json", "--format", "latex", "--out", "d3.tex"]));
    assert!(tex.is_empty());
    let tex = std::fs::read_to_string(tmp.path().join("d3.tex")).unwrap();
    assert_eq!(tex.matches("\\begin{array}").count(), 4);
    assert_eq!(tex.matches("\\[").count(), tex.matches("\\]").count());
    assert_eq!(code(&mubs(tmp.path(), &["export", "d3.json", "--format", "pdf"])), 2);
}

#[test]
fn seed_is_recorded_and_output_is_stable() {
    let tmp = tempfile::tempdir().unwrap();
    let run = || mubs(tmp.path(), &["generate", "--method", "wocjan-beth", "--p", "5", "--seed", "17"]).stdout;
    let first = run();
    assert_eq!(first, run());
    let doc: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(doc["provenance"]["seed"], 17);
}
