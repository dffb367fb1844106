use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qukit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qukit")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn gen_to(path: &Path, args: &[&str]) {
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path.to_str().unwrap()]);
    let out = qukit(&full);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn coherent_state_classifies_as_product() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    gen_to(&path, &["coherent", "--n", "3", "--k", "3", "--tau", "0.5+0.2i,-1i"]);
    let out = qukit(&["classify", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["verdict"], "product");
    assert_eq!(report["factors"].as_array().unwrap().len(), 3);
}

#[test]
fn zero_tau_gives_the_lowest_weight_state() {
    let out = qukit(&["gen", "coherent", "--n", "3", "--k", "2", "--tau", "0"]);
    assert_eq!(code(&out), 0);
    let state = json(&out);
    let amps = state["amps"].as_array().unwrap();
    assert_eq!(amps.len(), 8);
    assert_eq!(amps[0], serde_json::json!([1.0, 0.0]));
}

#[test]
fn dicke_state_is_entangled() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.json");
    gen_to(&path, &["dicke", "--occ", "1,2,0"]);
    let out = qukit(&["classify", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["verdict"], "entangled");
}

#[test]
fn displaced_state_is_product() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.json");
    gen_to(&path, &["coherent", "--n", "4", "--k", "3", "--eta", "0.3-0.1i,0.2"]);
    assert_eq!(code(&qukit(&["classify", path.to_str().unwrap()])), 0);
}

#[test]
fn random_and_product_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let random = dir.path().join("r.json");
    let product = dir.path().join("p.json");
    gen_to(&random, &["random", "--n", "3", "--k", "3", "--seed", "4"]);
    gen_to(&product, &["product", "--n", "3", "--k", "3", "--seed", "4"]);
    assert_eq!(code(&qukit(&["classify", random.to_str().unwrap()])), 1);
    assert_eq!(code(&qukit(&["classify", product.to_str().unwrap()])), 0);
}

#[test]
fn project_then_classify_compressed() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("c.json");
    let sym = dir.path().join("s.json");
    gen_to(&full, &["coherent", "--n", "4", "--k", "3", "--tau", "0.3,1.5+0.5i"]);
    let out = qukit(&["project", full.to_str().unwrap(), "--out", sym.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&sym).unwrap();
    let value: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["convention"], "unnormalized");
    assert_eq!(value["coeffs"].as_array().unwrap().len(), 15);
    let out = qukit(&["classify", sym.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["verdict"], "product");
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    gen_to(&path, &["coherent", "--n", "3", "--k", "2", "--tau", "0.5"]);
    let text = fs::read_to_string(&path).unwrap();
    let truncated = dir.path().join("t.json");
    fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    assert_eq!(code(&qukit(&["classify", truncated.to_str().unwrap()])), 2);

    let wrong_len = dir.path().join("w.json");
    fs::write(&wrong_len, r#"{"n_sites": 2, "local_dim": 2, "amps": [[1.0, 0.0]]}"#).unwrap();
    assert_eq!(code(&qukit(&["classify", wrong_len.to_str().unwrap()])), 2);

    let missing = dir.path().join("missing.json");
    assert_eq!(code(&qukit(&["classify", missing.to_str().unwrap()])), 2);
}

#[test]
fn bad_parameters_exit_2() {
    assert_eq!(code(&qukit(&["gen", "coherent", "--n", "3", "--k", "3", "--tau", "1"])), 2);
    assert_eq!(code(&qukit(&["gen", "coherent", "--n", "3", "--k", "2", "--tau", "abc"])), 2);
    assert_eq!(code(&qukit(&["gen", "dicke", "--occ", "1,2,0", "--n", "4"])), 2);
    assert_eq!(code(&qukit(&["gen", "random", "--k", "2"])), 2);
    assert_eq!(code(&qukit(&["frobnicate"])), 2);
}

#[test]
fn size_guards_exit_3() {
    assert_eq!(code(&qukit(&["gen", "random", "--n", "30", "--k", "2"])), 3);
    assert_eq!(code(&qukit(&["bench", "--n", "20", "--k", "3", "--mode", "full"])), 3);
    assert_eq!(code(&qukit(&["verify", "--n", "7", "--k", "4", "--samples", "1"])), 3);
}

#[test]
fn verify_examples_pass() {
    for args in [
        ["--n", "3", "--k", "2", "--samples", "100", "--seed", "1"],
        ["--n", "2", "--k", "4", "--samples", "100", "--seed", "2"],
        ["--n", "5", "--k", "3", "--samples", "50", "--seed", "3"],
    ] {
        let mut full = vec!["verify"];
        full.extend_from_slice(&args);
        let out = qukit(&full);
        assert_eq!(code(&out), 0, "{args:?}");
        let report = json(&out);
        assert_eq!(report["theorem1_pass"]["passed"], report["theorem1_pass"]["total"]);
        assert_eq!(report["theorem2_pass"]["passed"], report["theorem2_pass"]["total"]);
    }
}

#[test]
fn verify_is_deterministic_and_reports_seed() {
    let args = ["verify", "--n", "3", "--k", "3", "--samples", "30", "--threads", "3"];
    let (a, b) = (qukit(&args), qukit(&args));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["seed"], 1);
    let timed = qukit(&["verify", "--n", "2", "--k", "2", "--samples", "5", "--timing"]);
    assert!(json(&timed)["elapsed"].is_f64());
}

#[test]
fn bench_compressed_at_scale() {
    let out = qukit(&["bench", "--n", "20", "--k", "3", "--mode", "compressed", "--reps", "5"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    let reports = report["reports"].as_array().unwrap();
    assert!(reports.iter().all(|r| r["dim"] == 231 && r["mode"] == "compressed"));
    assert!(report["cross_mode_max_error"].is_null());
}

#[test]
fn bench_both_modes_agree() {
    let out = qukit(&["bench", "--n", "10", "--k", "2", "--reps", "3"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["reports"].as_array().unwrap().len(), 4);
    assert!(report["cross_mode_max_error"].as_f64().unwrap() <= 1e-10);
}
