use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn homcx(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homcx"))
        .args(args)
        .env("HOMCX_CACHE_DIR", cache)
        .env_remove("HOMCX_CONFIG")
        .output()
        .expect("binary runs")
}

fn payload(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    v["payload"].clone()
}

fn group(p: &Value, key: &str, k: i64) -> (u64, Vec<u64>) {
    let g = p[key].as_array().unwrap().iter().find(|g| g["degree"] == k).unwrap();
    (g["free_rank"].as_u64().unwrap(), g["torsion"].as_array().unwrap().iter().map(|t| t.as_u64().unwrap()).collect())
}

#[test]
fn homology_of_pentagon_into_k4() {
    let dir = tempfile::tempdir().unwrap();
    let p = payload(&homcx(dir.path(), &["homology", "--hom", "C5", "K4", "--coeff", "Z", "--degrees", "1..3"]));
    assert_eq!(group(&p, "cohomology", 2), (0, vec![2]));
    assert_eq!(group(&p, "cohomology", 1), (0, vec![]));
}

#[test]
fn independence_complex_of_hexagon() {
    let dir = tempfile::tempdir().unwrap();
    let p = payload(&homcx(dir.path(), &["homology", "--ind", "C6", "--reduced"]));
    assert_eq!(group(&p, "homology", 1), (2, vec![]));
}

#[test]
fn second_run_is_served_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["homology", "--hom-plus", "P3", "K3", "--coeff", "Z3"];
    let a = homcx(dir.path(), &args);
    let b = homcx(dir.path(), &args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(std::fs::read_dir(dir.path().join("reports")).unwrap().filter(|e| e.as_ref().unwrap().path().extension().unwrap() == "json").count(), 1);
    // a cold run without the cache reproduces the payload
    let c = homcx(dir.path(), &["--no-cache", "homology", "--hom-plus", "P3", "K3", "--coeff", "Z3"]);
    assert_eq!(payload(&a), payload(&c));
}

#[test]
fn heights_and_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let p = payload(&homcx(dir.path(), &["sw", "--hom", "K2", "K4", "--invol", "swap"]));
    assert_eq!(p["height"], 2);
    let p = payload(&homcx(dir.path(), &["--verify", "sw", "--hom", "C5", "K5", "--invol", "reflect", "--check-power", "3"]));
    assert_eq!(p["check"]["vanishes"], true);
    assert_eq!(p["check"]["certificate"]["kind"], "vanishing");
}

#[test]
fn clique_bound_is_tight() {
    let dir = tempfile::tempdir().unwrap();
    let p = payload(&homcx(dir.path(), &["--verify", "bound", "--graph", "K4", "--test", "K2", "--m", "2..4"]));
    assert_eq!(p["chi_at_least"], 4);
    assert!(p["premises"]["source_nonzero"].is_object());
}

#[test]
fn scan_writes_experimental_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("grid.csv");
    let out = homcx(dir.path(), &["scan-conjecture", "--r", "2", "--n", "3..5", "--csv", csv.to_str().unwrap()]);
    let p = payload(&out);
    assert_eq!(p["experimental"], true);
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].starts_with("2,3,1,vanishes"));
    assert!(rows[2].starts_with("2,5,3,vanishes"));
    assert!(rows.iter().all(|r| r.ends_with("experimental")));
    // a tight budget turns grid points into explicit skips
    let out = homcx(dir.path(), &["--budget", "1000", "scan-conjecture", "--r", "2", "--n", "5"]);
    let p = payload(&out);
    assert_eq!(p["grid"].as_array().unwrap().len(), 0);
    assert_eq!(p["skipped"][0]["n"], 5);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| homcx(dir.path(), args).status.code().unwrap();
    assert_eq!(code(&["homology", "--hom", "C5"]), 2);
    assert_eq!(code(&["homology", "--hom", "C5", "Q7"]), 2);
    assert_eq!(code(&["homology", "--hom", "C5", "K4", "--degrees", "3..1"]), 2);
    assert_eq!(code(&["--no-cache", "--budget", "10", "homology", "--hom", "K3", "K5"]), 3);
    assert_eq!(code(&["sw", "--hom", "K3", "K3", "--invol", "identity"]), 4);
    assert_eq!(code(&["sw", "--hom", "C5", "K3", "--invol", "1,0,2,3,4"]), 2);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("homcx.conf");
    let cache = dir.path().join("from-config");
    std::fs::write(&cfg, format!("# test\nbudget = 10\ncache_dir = {}\n", cache.display())).unwrap();
    let run = |extra: &[&str]| {
        let mut args = vec!["--config", cfg.to_str().unwrap()];
        args.extend_from_slice(extra);
        Command::new(env!("CARGO_BIN_EXE_homcx")).args(&args).env_remove("HOMCX_CACHE_DIR").output().unwrap()
    };
    assert_eq!(run(&["homology", "--hom", "K3", "K4"]).status.code(), Some(3));
    let ok = run(&["--budget", "100000", "homology", "--hom", "K3", "K4"]);
    assert!(ok.status.success());
    assert!(cache.join("reports").is_dir());
    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(run(&["homology", "--hom", "K3", "K4"]).status.code(), Some(2));
}

#[test]
fn saved_reports_verify_and_tampering_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("sw.json");
    let out = homcx(dir.path(), &["sw", "--hom", "C5", "K4", "-o", report.to_str().unwrap()]);
    assert!(out.status.success());
    let ok = homcx(dir.path(), &["verify", report.to_str().unwrap()]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));

    let mut v: Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    let cycle = v["payload"]["certificates"]["nonzero"]["cycle"].as_array_mut().unwrap();
    cycle.pop();
    std::fs::write(&report, serde_json::to_vec(&v).unwrap()).unwrap();
    assert_eq!(homcx(dir.path(), &["verify", report.to_str().unwrap()]).status.code(), Some(4));

    v["input"]["check_power"] = Value::from(1);
    std::fs::write(&report, serde_json::to_vec(&v).unwrap()).unwrap();
    assert_eq!(homcx(dir.path(), &["verify", report.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn graphs_from_files_hash_like_descriptors() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("c5.txt");
    std::fs::write(&file, "0: 1 4\n1: 0 2\n2: 1 3\n3: 2 4\n4: 3 0\n").unwrap();
    let digest = |g: &str| {
        let out = homcx(dir.path(), &["--no-cache", "homology", "--hom", g, "K3"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        v["input_digest"].as_str().unwrap().to_string()
    };
    assert_eq!(digest("C5"), digest(file.to_str().unwrap()));
}
