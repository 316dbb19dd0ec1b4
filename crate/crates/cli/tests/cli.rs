use std::path::Path;
use std::process::{Command, Output};

fn pqst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pqst"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Value after `key` on the first line starting with it.
fn field(out: &str, key: &str) -> f64 {
    let line = out
        .lines()
        .find(|l| l.starts_with(key))
        .unwrap_or_else(|| panic!("no `{key}` in\n{out}"));
    line.split_whitespace().last().unwrap().parse().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exact_two_qubit_reconstruction() {
    let o = pqst(&[
        "reconstruct",
        "--state",
        "table2-v",
        "--sets",
        "zeta-X,zeta-A:1|zeta-A:2",
        "--exact",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(field(&stdout(&o), "fidelity") >= 1.0 - 1e-10);
}

#[test]
fn exact_three_qubit_reconstruction_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = pqst(&[
        "reconstruct",
        "--state",
        "rho3",
        "--sets",
        "zeta-m:3,zeta-m:1,zeta-m:2",
        "--exact",
        "--out",
        path_str(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!((report["estimate_re"][7][7].as_f64().unwrap() - 0.13).abs() < 1e-12);
    assert_eq!(report["owner"][0][0], "zeta-X");
    assert_eq!(report["owner"][0][7], "zeta-X");
    assert_eq!(report["owner"][0][1], "zeta-m:1");
    assert_eq!(report["owner"][0][3], "zeta-m:2");
    assert!(report["trusted"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|r| r.as_array().unwrap())
        .all(|t| t == true));
    assert!(report["stderr_re"].is_null());
}

#[test]
fn missing_set_names_the_patterns() {
    let o = pqst(&[
        "reconstruct",
        "--state",
        "rho3",
        "--sets",
        "zeta-X,zeta-m:1",
        "--exact",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(
        err.contains("not covered") && err.contains("{1,2}"),
        "{err}"
    );
}

#[test]
fn sampled_reconstruction_reports_errors_and_repeats() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str| {
        let out = dir.path().join(name);
        let o = pqst(&[
            "reconstruct",
            "--state",
            "table2-iv",
            "--sets",
            "zeta-X,zeta-m:1",
            "--shots",
            "20000",
            "--seed",
            "5",
            "--workers",
            workers,
            "--out",
            path_str(&out),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read_to_string(out).unwrap()
    };
    let a = run("a.json", "1");
    assert_eq!(a, run("b.json", "3"));
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert!(v["stderr_re"][0][1].as_f64().unwrap() > 0.0);
    assert!(v["fidelity"].as_f64().unwrap() > 0.95);
}

#[test]
fn sampled_runs_need_a_seed() {
    let o = pqst(&[
        "reconstruct",
        "--state",
        "rho2",
        "--sets",
        "zeta-X,zeta-m:1",
        "--shots",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--seed"));
    let o = pqst(&["bench", "--state", "rho2", "--obs", "O2X"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn pipeline_mode() {
    let o = pqst(&[
        "reconstruct",
        "--state",
        "table2-i",
        "--pipeline",
        "--exact",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(field(&stdout(&o), "fidelity") >= 1.0 - 1e-10);
    let o = pqst(&["reconstruct", "--state", "rho3", "--pipeline", "--exact"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn state_from_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plus.json");
    // |+>|0>
    let re = [
        0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0,
    ];
    let doc = serde_json::json!({ "n_qubits": 2, "re": re, "im": vec![0.0; 16] });
    std::fs::write(&path, doc.to_string()).unwrap();
    let o = pqst(&[
        "estimate",
        "--state",
        path_str(&path),
        "--obs",
        "1 XI; 1 IZ",
        "--exact",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!((field(&stdout(&o), "estimate") - 2.0).abs() < 1e-12);
    let o = pqst(&[
        "estimate",
        "--state",
        "nowhere/x.json",
        "--obs",
        "1 XI",
        "--exact",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exact_estimates_match_the_trace() {
    let o = pqst(&[
        "estimate", "--state", "rho2X", "--obs", "1 ZZ", "--method", "pqst", "--exact",
    ]);
    let s = stdout(&o);
    assert!(s.contains("direct PSE: zeta-X"));
    assert!((field(&s, "estimate") - field(&s, "trace")).abs() < 1e-12);
    assert!((field(&s, "trace") - (0.19375 - 0.30625 - 0.30625 + 0.19375)).abs() < 1e-12);

    let o = pqst(&[
        "estimate",
        "--state",
        "rho2",
        "--obs",
        "1 ZX",
        "--method",
        "pqst-rotated",
        "--exact",
    ]);
    let s = stdout(&o);
    assert!(s.contains("X-shadow"));
    assert!((field(&s, "estimate") - field(&s, "trace")).abs() <= 1e-10);

    for method in ["pqst", "pauli", "mub", "clifford"] {
        let o = pqst(&[
            "estimate", "--state", "rho3", "--obs", "O3", "--method", method, "--exact",
        ]);
        let s = stdout(&o);
        assert!(
            (field(&s, "estimate") - field(&s, "trace")).abs() <= 1e-10,
            "{method}: {s}"
        );
    }
}

#[test]
fn sampled_estimate_prints_standard_error() {
    let args = [
        "estimate", "--state", "rho2", "--obs", "O2", "--shots", "50000", "--seed", "11",
    ];
    let a = stdout(&pqst(&args));
    assert_eq!(a, stdout(&pqst(&args)));
    let (v, se, t) = (
        field(&a, "estimate"),
        field(&a, "stderr"),
        field(&a, "trace"),
    );
    assert!(se > 0.0 && (v - t).abs() < 5.0 * se, "{a}");
}

#[test]
fn malformed_observable_is_a_usage_error() {
    let o = pqst(&["estimate", "--state", "rho2", "--obs", "1 ZQ", "--exact"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("position 3"), "{}", stderr(&o));
    let o = pqst(&["estimate", "--state", "rho2", "--obs", "1 ZZZ", "--exact"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_grid_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str| {
        let out = dir.path().join(name);
        let o = pqst(&[
            "bench",
            "--state",
            "rho2",
            "--obs",
            "O2X",
            "--methods",
            "pqst,pauli,clifford,mub",
            "--trials",
            "1000",
            "--seed",
            "7",
            "--workers",
            workers,
            "--out",
            path_str(&out),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        std::fs::read(out).unwrap()
    };
    let a = run("a.csv", "1");
    assert_eq!(a, run("b.csv", "1"));
    assert_eq!(a, run("c.csv", "4"));
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "method,n_qubits,state,observable,shots,trials,mse,stderr,true_value,slope_tag,seed"
    );
    assert_eq!(lines.count(), 16);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "state = \"rho2X\"\nobs = \"O2\"\nmethods = \"pqst,pauli\"\nshots = [100, 1000, 10000, 100000]\ntrials = 50\nseed = 1\n",
    )
    .unwrap();
    let out_cfg = dir.path().join("cfg.csv");
    let o = pqst(&[
        "bench",
        "--config",
        path_str(&cfg),
        "--seed",
        "2",
        "--out",
        path_str(&out_cfg),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out_flags = dir.path().join("flags.csv");
    let o = pqst(&[
        "bench",
        "--state",
        "rho2X",
        "--obs",
        "O2",
        "--methods",
        "pqst,pauli",
        "--trials",
        "50",
        "--seed",
        "2",
        "--out",
        path_str(&out_flags),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let a = std::fs::read_to_string(out_cfg).unwrap();
    assert_eq!(a, std::fs::read_to_string(out_flags).unwrap());
    assert!(a.lines().nth(1).unwrap().ends_with(",2"));

    std::fs::write(&cfg, "sead = 1\n").unwrap();
    let o = pqst(&["validate", "--config", path_str(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_checks_the_output_path_first() {
    let o = pqst(&[
        "bench",
        "--state",
        "rho2",
        "--obs",
        "O2X",
        "--seed",
        "1",
        "--out",
        "/no/such/dir/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("does not exist"));
}

#[test]
fn validate_passes_and_catches_a_perturbed_p() {
    let o = pqst(&["validate", "--states", "5"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(!s.contains("FAIL"));
    assert!(s.contains("zeta-A:1,2|zeta-A:1,3: 9 members, p = 9"));

    let o = pqst(&["validate", "--states", "3", "--p-offset", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert!(s.contains("FAIL zeta-X closed form"), "{s}");
    assert!(s.contains("residual"));
}

#[test]
fn ensemble_info_text_and_json() {
    let o = pqst(&["ensemble-info", "--n", "3", "--ensemble", "zeta-m:2"]);
    let s = stdout(&o);
    assert!(
        s.contains("members    13") && s.contains("p          13"),
        "{s}"
    );
    let o = pqst(&[
        "ensemble-info",
        "--n",
        "3",
        "--ensemble",
        "zeta-X",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["members"], 9);
    assert_eq!(v["p"], 9.0);
    let o = pqst(&["ensemble-info", "--n", "2", "--ensemble", "zeta-B"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_flags_exit_with_usage_code() {
    let o = pqst(&["estimate", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
}
