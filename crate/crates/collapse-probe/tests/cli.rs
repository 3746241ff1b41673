//! End-to-end tests of the `collapse-probe` binary: exit codes, output
//! schemas, unit handling, and record determinism.

use std::process::{Command, Output};

const SWEEP_HEADER: &str =
    "axis_value,p_less,lambda,lambda_hat,p_plus_minus,delta_n,required_n,z,seed,error";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_collapse-probe"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn analyze_defaults_emits_json_record() {
    let out = run(&["analyze", "--set", "n_trials=1000"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // both Lambda normalizations and the symmetry residual are present
    let a = &v["analytics"];
    assert!(a["lambda_uncond"].is_number());
    assert!(a["lambda_cond"].is_number());
    assert!(a["gamma_uncond"].is_number());
    assert!(a["gamma_cond"].is_number());
    assert!(a["symmetry_residual"].is_number());
    assert!(a["lambda_literal_exceeds_bound"].as_bool().unwrap());
    // exact band probability of the reference scenario
    let p_less = a["p_less"].as_f64().unwrap();
    assert!((p_less - 6.666_637_6e-5).abs() < 1e-9);
    // fully resolved config echo in femtoseconds
    assert_eq!(v["config"]["sigma_t"].as_f64().unwrap(), 1000.0);
    assert_eq!(v["config"]["window_dt"].as_f64().unwrap(), 1e6);
}

#[test]
fn analyze_accepts_unit_suffixes() {
    let out = run(&["analyze", "--set", "sigma_t=1 ps", "--set", "window_dt=1 ns"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["config"]["sigma_t"].as_f64().unwrap(), 1000.0);
    assert_eq!(v["config"]["window_dt"].as_f64().unwrap(), 1e6);
}

#[test]
fn analyze_zero_delta_t_is_born() {
    let out = run(&["analyze", "--set", "delta_t=0"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["analytics"]["p_less"].as_f64().unwrap(), 0.0);
    assert_eq!(v["analytics"]["p_plus_minus_exact"].as_f64().unwrap(), 0.75);
}

#[test]
fn unknown_key_is_usage_error() {
    let out = run(&["analyze", "--set", "bogus=1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bogus"));
}

#[test]
fn simulate_records_are_identical_apart_from_timestamp() {
    let args =
        &["simulate", "--set", "n_trials=200000", "--set", "delta_t=20", "--set", "seed=7"];
    let a = run(args);
    let b = run(args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    let strip = |s: &str| -> String {
        s.lines().filter(|l| !l.contains("timestamp_unix_s")).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(strip(&stdout(&a)), strip(&stdout(&b)));
}

#[test]
fn simulate_instantaneous_matches_born_rate() {
    let out = run(&["simulate", "--set", "n_trials=1000000", "--set", "scenario=instantaneous"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let n_pm = v["counts"]["n_pm"].as_u64().unwrap() as f64;
    let n = v["counts"]["n_total"].as_u64().unwrap() as f64;
    let sd = (0.75f64 * 0.25 * n).sqrt();
    assert!((n_pm - 0.75 * n).abs() < 4.0 * sd);
    assert!(v["significance"]["z_score"].as_f64().unwrap().abs() < 4.0);
}

#[test]
fn simulate_csv_schema_is_stable() {
    let out = run(&["simulate", "--set", "n_trials=10000", "--set", "output_format=csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let header = text.lines().next().unwrap();
    assert_eq!(header, collapse_probe::report::RECORD_CSV_HEADER);
    assert_eq!(text.lines().count(), 2);
    assert_eq!(
        header.split(',').count(),
        text.lines().nth(1).unwrap().split(',').count()
    );
}

#[test]
fn plan_balanced_state_exits_3_with_record() {
    let out = run(&["plan", "--set", "alpha2=0.5"]);
    assert_eq!(out.status.code(), Some(3));
    let text = stdout(&out);
    assert!(text.contains("\"infeasible\": true"), "{text}");
}

#[test]
fn plan_paper_literal_reports_both_durations() {
    let out = run(&["plan", "--k-sigma", "6", "--set", "lambda_source=paper_literal"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["required_n"].as_u64().unwrap(), 900_000_000);
    assert!((v["duration_hours"].as_f64().unwrap() - 2.5).abs() < 1e-9);
    assert_eq!(v["reference_duration_hours"].as_f64().unwrap(), 12.0);
    assert!(v["note"].as_str().unwrap().contains("not reconcile"));
}

#[test]
fn plan_k_scaling() {
    let at = |k: &str| -> u64 {
        let out = run(&["plan", "--k-sigma", k, "--set", "lambda_source=paper_literal"]);
        assert_eq!(out.status.code(), Some(0));
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        v["required_n"].as_u64().unwrap()
    };
    assert_eq!(at("6"), 36 * at("1"));
}

#[test]
fn sweep_alpha_grid_csv() {
    let out = run(&[
        "sweep",
        "--axis",
        "alpha2",
        "--grid",
        "0.5,0.6,0.75,0.9",
        "--set",
        "output_format=csv",
        "--set",
        "n_trials=1000",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), SWEEP_HEADER);
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    // required N falls from infeasible at the balanced state to its
    // minimum at the most unbalanced point
    assert_eq!(rows[0][6], "infeasible");
    let req: Vec<u64> = rows[1..].iter().map(|r| r[6].parse().unwrap()).collect();
    assert!(req[0] > req[1] && req[1] > req[2], "{req:?}");
}

#[test]
fn sweep_delay_grid_insensitive() {
    let out = run(&[
        "sweep",
        "--axis",
        "delay_T",
        "--grid",
        "0,3.3",
        "--set",
        "output_format=csv",
        "--set",
        "n_trials=1000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let p: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!((p[0] - p[1]).abs() / p[0] < 0.01, "{p:?}");
}

#[test]
fn sweep_empty_grid_is_usage_error() {
    let out = run(&["sweep", "--axis", "alpha2", "--set", "n_trials=1000"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn sweep_bad_axis_is_usage_error() {
    let out = run(&["sweep", "--axis", "frequency", "--grid", "1,2", "--set", "n_trials=1000"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("frequency"));
}

#[test]
fn sweep_bad_point_marked_in_row_exit_zero() {
    let out = run(&[
        "sweep",
        "--axis",
        "alpha2",
        "--grid",
        "0.75,1.5",
        "--set",
        "output_format=csv",
        "--set",
        "n_trials=1000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("1 warning"));
    let text = stdout(&out);
    let bad_row = text.lines().nth(2).unwrap();
    assert!(bad_row.ends_with(&"alpha2 must lie strictly inside (0;1); got 1.5".replace(';', ","))
        || !bad_row.split(',').next_back().unwrap().is_empty());
}

#[test]
fn verify_defaults_passes() {
    let out = run(&["verify", "--set", "n_trials=200000", "--set", "delta_t=20"]);
    assert_eq!(out.status.code(), Some(0), "{}\n{}", stdout(&out), stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("PASS closed_vs_quadrature_point"));
    assert!(text.contains("PASS determinism_partition_invariance"));
    assert!(text.lines().last().unwrap().contains("OK"));
}

#[test]
fn config_file_and_output_dir_override() {
    let dir = std::env::temp_dir().join(format!("collapse-probe-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg_path = dir.join("run.cfg");
    std::fs::write(
        &cfg_path,
        "# reference scenario, small run\nn_trials = 50000\ndelta_t = 20\noutput_path = out.json\n",
    )
    .unwrap();
    let out = bin()
        .args(["simulate", "--config", cfg_path.to_str().unwrap()])
        .env("COLLAPSE_PROBE_OUTPUT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let written = dir.join("out.json");
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&written).unwrap()).unwrap();
    assert_eq!(v["counts"]["n_total"].as_u64().unwrap(), 50_000);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn missing_config_file_is_usage_error() {
    let out = run(&["analyze", "--config", "/nonexistent/path.cfg"]);
    assert_eq!(out.status.code(), Some(2));
}
