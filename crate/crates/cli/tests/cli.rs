use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn enriques(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_enriques")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

#[test]
fn genus_of_lattice_files() {
    let dir = tempfile::tempdir().unwrap();
    let a2 = write(dir.path(), "a2.json", r#"{"gram": [[2, -1], [-1, 2]]}"#);
    let o = enriques(&["genus", &a2]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "II_(2,0)3^-1");

    // U ⊕ U(2) ⊕ E8(-2)
    let e8 = [
        [2, -1, 0, 0, 0, 0, 0, 0],
        [-1, 2, -1, 0, 0, 0, 0, 0],
        [0, -1, 2, -1, 0, 0, 0, -1],
        [0, 0, -1, 2, -1, 0, 0, 0],
        [0, 0, 0, -1, 2, -1, 0, 0],
        [0, 0, 0, 0, -1, 2, -1, 0],
        [0, 0, 0, 0, 0, -1, 2, 0],
        [0, 0, -1, 0, 0, 0, 0, 2],
    ];
    let mut gram = vec![vec![0i64; 12]; 12];
    gram[0][1] = 1;
    gram[1][0] = 1;
    gram[2][3] = 2;
    gram[3][2] = 2;
    for i in 0..8 {
        for j in 0..8 {
            gram[4 + i][4 + j] = -2 * e8[i][j];
        }
    }
    let n = write(dir.path(), "n.json", &serde_json::json!({ "gram": gram }).to_string());
    let o = enriques(&["--format", "json", "genus", &n]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["genus"], "II_(2,10)2^10");
}

#[test]
fn malformed_lattice_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"gram": [[2, 1], ["#);
    let o = enriques(&["genus", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    let odd = write(dir.path(), "odd.json", r#"{"gram": [[1, 0], [0, 1]]}"#);
    assert_eq!(enriques(&["genus", &odd]).status.code(), Some(2));
    assert_eq!(enriques(&["genus", "/nonexistent/lattice.json"]).status.code(), Some(2));
}

#[test]
fn phi15_enumeration_finds_only_e8() {
    let o = enriques(&["--format", "json", "phi", "--n", "15", "--sig", "0,8", "--sig", "2,6", "--n2-min", "6", "--n2-max", "8"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let classes = v["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 1);
    assert_eq!(classes[0]["name"], "E8(-2)");
    assert_eq!(classes[0]["genus"], "II_(0,8)2^8");
}

#[test]
fn phi3_twists_are_rescaled_a2() {
    let o = enriques(&["phi", "--n", "3", "--rank", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for name in ["A2(-6)", "A2(-2)", "A2(2)", "A2(6)"] {
        assert!(text.lines().any(|l| l.starts_with(&format!("{name}\t"))), "{name} missing in\n{text}");
    }
    assert_eq!(enriques(&["phi", "--n", "3", "--rank", "4"]).status.code(), Some(2));
}

#[test]
fn phi_rejects_small_n() {
    let o = enriques(&["phi", "--n", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn borcherds_runs_on_bundled_fixtures() {
    let o = enriques(&["--format", "json", "borcherds", "f7"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["R_count"], 2);
    assert_eq!(v["complete"], true);
    assert_eq!(v["mod2_image_order"], "5040");

    let o = enriques(&["borcherds", "rho18"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("R_count 1\n"), "{text}");
    assert!(text.contains("mod-2 image order 362880\n"), "{text}");
}

#[test]
fn borcherds_budget_exhaustion_dumps_partial_state() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("partial.json");
    let o = enriques(&["--budget", "3", "borcherds", "rho16", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["complete"], false);
    assert_eq!(v["R_count"], 3);
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(saved, v);
    assert_eq!(enriques(&["--budget", "0", "borcherds", "rho16"]).status.code(), Some(2));
}

#[test]
fn fixture_dir_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_enriques"))
        .args(["borcherds", "f7"])
        .env("ENRIQUES_FIXTURE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn fixture_rejects_unknown_kinds() {
    assert_eq!(enriques(&["fixture", "rho17"]).status.code(), Some(2));
}

#[test]
fn verify_single_claims() {
    let o = enriques(&["verify", "f15"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("status: verified"));
    let o = enriques(&["verify", "unknown-id"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_all_reports_every_claim() {
    let o = enriques(&["--format", "json", "--threads", "4", "verify", "all"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let reports = v.as_array().unwrap();
    let claims: Vec<&str> = reports.iter().map(|r| r["claim"].as_str().unwrap()).collect();
    assert_eq!(claims, ["f15", "f9", "f7", "headline"]);
    let refuted: Vec<&str> =
        reports.iter().filter(|r| r["status"] == "refuted").map(|r| r["claim"].as_str().unwrap()).collect();
    // the f9 replay finds an extra N1 genus that glues with A2(-2)
    assert_eq!(refuted, ["f9"]);
    assert_eq!(o.status.code(), Some(1));
}
