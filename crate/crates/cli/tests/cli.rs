//! End-to-end runs of the `varbound` binary.

use std::fs;
use std::process::{Command, Output};

fn varbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_varbound"))
        .args(args)
        .env_remove("VARBOUND_OUT_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn compute_emits_every_bound() {
    let o = varbound(&["compute", "--a", "sx", "--b", "sy", "--state", "[1, 0]", "--restarts", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["bounds"].as_array().unwrap().len(), 15);
    assert_eq!(v["exact"]["variance_product"], 1.0);
    assert_eq!(v["bounds"][0]["id"], "rs_product");
}

#[test]
fn compute_reads_instance_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("inst.ini");
    fs::write(
        &cfg,
        "# spin-1 at theta = 0\n[instance]\nobservable_a = lx\nobservable_b = ly\nstate = [1, 0, 0]\nbounds = rs_product, fidelity_product\n",
    )
    .unwrap();
    let o = varbound(&["compute", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "bound,side,quantity,exact,value,status");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("rs_product,lower,product,2.5"));
}

#[test]
fn sweep_writes_default_grid_to_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_varbound"))
        .args(["sweep", "--preset", "fig3"])
        .env("VARBOUND_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("sweep-fig3.csv")).unwrap();
    assert_eq!(text.lines().count(), 182);
    assert!(text.starts_with("theta,variance_product,variance_sum,std_sum,reverse_fidelity_product,"));
}

#[test]
fn sweep_json_carries_metadata() {
    let o = varbound(&["sweep", "--preset", "fig4", "--theta-count", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["metadata"]["observable_a"], "sx");
    assert_eq!(v["metadata"]["state_family"], "bloch_fig3");
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn custom_sweep_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.ini");
    fs::write(
        &cfg,
        "[sweep]\npreset = custom\nobservable_a = [[1, 0], [0, -1]]\nobservable_b = [[0, -1i], [1i, 0]]\n\
         state_family = superposition\nstate_u = [1, 0]\nstate_w = [0, 1]\ntheta_count = 4\n\
         bounds = rs_product, optimized_sum\n[optimizer]\nrestarts = 1\n",
    )
    .unwrap();
    let out = dir.path().join("custom.csv");
    let o = varbound(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(out).unwrap().lines().count(), 5);
}

#[test]
fn verify_small_run_passes() {
    let o = varbound(&["verify", "--n", "20", "--dims", "2,3", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["instances"], 40);
    assert!(v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn optimize_prints_trace() {
    let o = varbound(&["optimize", "--a", "lx", "--b", "ly", "--state", "[0.8, -0.6, 0]", "--restarts", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    // Three seed starts plus three random restarts.
    assert_eq!(text.lines().count(), 7);
    assert!(text.starts_with("restart,value\n0,"));
}

#[test]
fn usage_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("typo.ini");
    fs::write(&bad, "[sweep]\npreset = fig1\ntheta_cuont = 5\n").unwrap();
    for args in [
        &["verify", "--n", "0"][..],
        &["sweep", "--preset", "fig7"],
        &["sweep"],
        &["compute", "--a", "sx", "--b", "sy", "--state", "[1, 0]", "--bounds", "nope"],
        &["compute", "--a", "lx", "--b", "sy", "--state", "[1, 0]"],
        &["compute", "--a", "[[1, 1i], [0, 1]]", "--b", "sy", "--state", "[1, 0]"],
        &["sweep", "--config", "/nonexistent/file.ini"],
        &["sweep", "--config", bad.to_str().unwrap()],
        &["frobnicate"],
    ] {
        let o = varbound(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}
