use std::path::Path;
use std::process::{Command, Output};

fn minvec(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minvec"))
        .arg("--out-dir")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(out.join("report.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn default_verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = minvec(dir.path(), &["verify"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path());
    assert_eq!(r["passed"], true);
    assert_eq!(r["result"][0]["p"], 3);
    assert!(dir.path().join("samples.csv").exists());
}

#[test]
fn corrupted_theta_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let o = minvec(dir.path(), &["verify", "--corrupt-theta"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(report(dir.path())["passed"], false);
}

#[test]
fn even_prime_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = minvec(dir.path(), &["--levels", "2:1", "verify"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("report.json").exists());
    let o = minvec(dir.path(), &["que", "--primes", "3,4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "levles = \"3:1\"\n").unwrap();
    let o = minvec(dir.path(), &["--config", cfg.to_str().unwrap(), "verify"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn level_one_scan_reports_sup() {
    let dir = tempfile::tempdir().unwrap();
    let o = minvec(dir.path(), &["scan-supnorm", "--weight", "12", "--coefficients", "all-ones"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path());
    let sup = r["result"]["sup"].as_f64().unwrap();
    let ratio = r["result"]["ratio"].as_f64().unwrap();
    let witness = r["result"]["witness"]["value"].as_f64().unwrap();
    assert!(sup.is_finite() && sup > 0.0);
    assert!(ratio.is_finite() && ratio > 0.0);
    assert!(sup >= witness);
    assert_eq!(r["result"]["level"], 1);
}

#[test]
fn same_seed_same_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--levels", "3:1", "--seed", "11", "scan-supnorm", "--coefficients", "sato-tate"];
    assert!(minvec(a.path(), &args).status.success());
    assert!(minvec(b.path(), &args).status.success());
    for f in ["report.json", "samples.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
    }
}

#[test]
fn que_grid_normalizes_to_q_over_q_minus_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = minvec(dir.path(), &["que", "--primes", "3,5,7", "--exponents", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path());
    let rows = r["result"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for (row, expect) in rows.iter().zip(["3/2", "5/4", "7/6"]) {
        assert_eq!(row["normalized"], expect);
        assert_eq!(row["distinguished_a3_0"], true);
        assert_eq!(row["distinguished_a3_1"], false);
    }
}

#[test]
fn empty_que_grid_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "primes = []\n").unwrap();
    let o = minvec(dir.path(), &["--config", cfg.to_str().unwrap(), "que"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(report(dir.path())["result"].as_array().unwrap().len(), 0);
}
