use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn dissim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dissim"))
        .args(args)
        .env_remove("DISSIM_THREADS")
        .output()
        .expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn error_kind(out: &Output) -> String {
    let line = String::from_utf8_lossy(&out.stderr);
    let v: Value = serde_json::from_str(line.trim()).unwrap_or_else(|e| panic!("{e}: {line}"));
    v["error"]["kind"].as_str().unwrap().to_string()
}

#[test]
fn simulate_dephasing_meets_bound() {
    let input = data("dephasing.json");
    let out = dissim(&["simulate", "--input", input.to_str().unwrap(), "--time", "1", "--epsilon", "1e-4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    assert_eq!(v["bound_satisfied"], true);
    assert!(v["choi_distance"].as_f64().unwrap() <= v["bound"].as_f64().unwrap());
    assert!(v["state_trace_distance"].as_f64().unwrap() <= v["bound"].as_f64().unwrap());
}

#[test]
fn simulate_zero_time_is_identity() {
    let input = data("pauli_dephasing.json");
    let out = dissim(&["simulate", "--input", input.to_str().unwrap(), "--time", "0", "--initial", "plus"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    assert_eq!(v["plan"]["order"], 0);
    for row in v["state"].as_array().unwrap() {
        for z in row.as_array().unwrap() {
            assert!((z[0].as_f64().unwrap() - 0.25).abs() < 1e-15 && z[1].as_f64().unwrap() == 0.0);
        }
    }
}

#[test]
fn simulate_writes_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let traj = dir.path().join("traj.jsonl");
    let input = data("pauli_dephasing.json");
    let out = dissim(&[
        "simulate",
        "--input",
        input.to_str().unwrap(),
        "--shots",
        "300",
        "--seed",
        "9",
        "--trajectories",
        traj.to_str().unwrap(),
        "--output",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read_to_string(&traj).unwrap().lines().count(), 300);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["trajectories"]["path"], "pauli");
    assert!(v["trajectories"]["trace_distance_to_series"].as_f64().unwrap() < 0.2);
}

#[test]
fn malformed_input_leaves_no_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let input = data("malformed.json");
    let out = dissim(&["simulate", "--input", input.to_str().unwrap(), "--output", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "parse");
    assert!(!report.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(dissim(&["simulate"]).status.code(), Some(2));
    assert_eq!(dissim(&["bogus"]).status.code(), Some(2));
    let out = dissim(&["simulate", "--input", "/nonexistent/spec.json"]);
    assert_eq!(out.status.code(), Some(2));
    let input = data("dephasing.json");
    let out = dissim(&["simulate", "--input", input.to_str().unwrap(), "--epsilon", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "usage");
}

#[test]
fn gca_flagship_matches_oracle() {
    let input = data("flagship.json");
    let out = dissim(&["gca", "--input", input.to_str().unwrap(), "--method", "exact"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    let cmp = &v["oracle"]["comparisons"][0];
    assert!(cmp["abs_error"].as_f64().unwrap() <= 1e-3);
    assert_eq!(v["oracle"]["magnitude_bound_holds"], true);
}

#[test]
fn gca_trivial_overlap() {
    let input = data("trivial.json");
    let out = dissim(&["gca", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    let re = v["estimates"][0]["re"].as_f64().unwrap();
    assert!((re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
}

#[test]
fn gca_ceilings() {
    let input = data("flagship.json");
    let out = dissim(&["gca", "--input", input.to_str().unwrap(), "--ceiling-qubits", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = dissim(&["gca", "--input", input.to_str().unwrap(), "--ceiling-qubits", "2", "--no-oracle"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json_stdout(&out).get("oracle").is_none());

    // The amplitude-estimation register is wider than the state-vector cap.
    let input = data("trivial.json");
    let out = dissim(&["gca", "--input", input.to_str().unwrap(), "--method", "mlae", "--max-statevector-qubits", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_kind(&out), "ceiling");
}

#[test]
fn gca_sampled_methods_are_deterministic() {
    let input = data("trivial.json");
    let args = ["gca", "--input", input.to_str().unwrap(), "--method", "all", "--shots", "2000", "--seed", "11"];
    let a = dissim(&args);
    let b = dissim(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = Command::new(env!("CARGO_BIN_EXE_dissim"))
        .args(args)
        .env("DISSIM_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_dissim"))
        .args(["resources", "--beta", "1"])
        .env("DISSIM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn resources_tables() {
    let out = dissim(&["resources", "--beta", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "method,param_point,queries,depth,ancillas");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("theorem3,") && lines[2].starts_with("qsvt,"));

    let out = dissim(&["resources", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    let rows = v["comparison"].as_array().unwrap();
    assert_eq!(rows.len(), 17);
    for r in rows {
        let beta = r["beta"].as_f64().unwrap();
        let m = 10.0;
        let k = r["ours_depth_per_query"].as_f64().unwrap();
        assert!(k <= m * (2.0 * beta.log2() + 8.0), "{r}");
        assert!((r["qsvt_depth_per_query"].as_f64().unwrap() - m * beta.sqrt() * 100f64.ln()).abs() < 1e-6);
    }
    assert_eq!(v["crossover"]["single_crossover"], true);
}

#[test]
fn resources_rejects_bad_amplification() {
    let out = dissim(&["resources", "--norm", "0.5", "--alpha", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = dissim(&["resources", "--beta-min", "10", "--beta-max", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_passes_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let c = dir.path().join("c.json");
    for (path, seed) in [(&a, "5"), (&b, "5"), (&c, "6")] {
        let out = dissim(&["verify", "--seed", seed, "--output", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    }
    let (ra, rb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ra, rb);
    let pass_set = |p: &Path| -> Vec<(String, bool)> {
        let v: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        v["checks"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| (c["name"].as_str().unwrap().to_string(), c["passed"].as_bool().unwrap()))
            .collect()
    };
    assert_eq!(pass_set(&a), pass_set(&c));
}

#[test]
fn verify_names_corrupted_constant() {
    let out = dissim(&["verify", "--fault", "HTH"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    let failed: Vec<&str> = text.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(failed.len(), 1, "{text}");
    assert!(failed[0].contains("gates/HTH"));
}
