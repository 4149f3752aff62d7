//! End-to-end behavior of the runner and artifact contracts.

use dispersia_cli::runner::{run_scenario, sweep, RunStatus};
use dispersia_cli::scenario::ScenarioConfig;
use dispersia_cli::{templates, CliError};
use std::fs;
use std::path::PathBuf;

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dispersia-test-{}-{tag}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

#[test]
fn zero_data_run_produces_zero_diagnostics() {
    let mut cfg = templates::kdv_soliton();
    cfg.name = "zero_bbm".into();
    cfg.equation = dispersia_cli::scenario::EquationSpec::Bbm;
    cfg.initial_data = dispersia_cli::scenario::InitialData::ClosedForm {
        name: "zero".into(),
        params: Default::default(),
    };
    cfg.stepping.t_end = 0.05;
    cfg.stepping.save_stride = 10;
    let out = scratch("zero");
    let artifacts = run_scenario(&cfg, &out).unwrap();
    assert_eq!(artifacts.status, RunStatus::Ok);
    let diag = fs::read_to_string(artifacts.dir.join("diag.csv")).unwrap();
    let mut rows = 0;
    for line in diag.lines().skip(1) {
        let value: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert_eq!(value, 0.0, "nonzero diagnostic row: {line}");
        rows += 1;
    }
    assert!(rows > 0);
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(artifacts.dir.join("meta.json")).unwrap()).unwrap();
    assert_eq!(meta["status"], "ok");
    let _ = fs::remove_dir_all(&out);
}

#[test]
fn malformed_config_is_a_config_error() {
    assert!(matches!(
        ScenarioConfig::parse("{ definitely not json"),
        Err(CliError::Config(_))
    ));
    // valid JSON, invalid scenario (odd n)
    let mut cfg = templates::kdv_soliton();
    cfg.grid.n = 777;
    let err = run_scenario(&cfg, &scratch("badgrid")).unwrap_err();
    assert!(matches!(err, CliError::Config(_)));
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn instability_is_reported_with_failure_time() {
    let mut cfg = templates::kdv_soliton();
    cfg.name = "unstable_kdv".into();
    cfg.stepping.dt = 0.5; // far beyond the advective limit
    cfg.stepping.t_end = 2.0;
    let out = scratch("unstable");
    let artifacts = run_scenario(&cfg, &out).unwrap();
    match artifacts.status {
        RunStatus::Unstable { time } => assert!(time >= 0.0),
        ref other => panic!("expected instability, got {other:?}"),
    }
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(artifacts.dir.join("meta.json")).unwrap()).unwrap();
    assert_eq!(meta["status"], "unstable");
    assert!(meta["failure_time"].is_number());
    assert!(!artifacts.dir.join("diag.csv").exists());
    let _ = fs::remove_dir_all(&out);
}

#[test]
fn sweep_writes_summary_with_pairwise_h3() {
    let mut cfg = templates::quasilinear_smooth();
    cfg.stepping.t_end = 0.002;
    cfg.stepping.save_stride = 100;
    let out = scratch("sweep");
    let outcome = sweep(&cfg, "/equation/eps_visc", &[1e-2, 5e-3, 2.5e-3], &out).unwrap();
    assert_eq!(outcome.runs.len(), 3);
    assert!(outcome.runs.iter().all(|(_, s)| matches!(s, RunStatus::Ok)));
    let summary = fs::read_to_string(outcome.dir.join("summary.csv")).unwrap();
    assert!(summary.starts_with("axis_value,name,value\n"));
    let h3_rows: Vec<&str> = summary
        .lines()
        .filter(|l| l.contains(",h3_diff_prev,"))
        .collect();
    assert_eq!(h3_rows.len(), 2, "summary:\n{summary}");
    let _ = fs::remove_dir_all(&out);
}

#[test]
fn sweep_rejects_unknown_axis() {
    let cfg = templates::quasilinear_smooth();
    let err = sweep(&cfg, "/equation/nonsense", &[1.0], &scratch("axis")).unwrap_err();
    assert!(matches!(err, CliError::Config(_)));
}

#[test]
fn sweep_over_grid_size_takes_integers() {
    let mut cfg = templates::kdv_soliton();
    cfg.stepping.t_end = 0.01;
    cfg.stepping.save_stride = 10;
    let out = scratch("gridsweep");
    let outcome = sweep(&cfg, "/grid/n", &[512.0, 1024.0], &out).unwrap();
    assert_eq!(outcome.runs.len(), 2);
    assert!(sweep(&cfg, "/grid/n", &[512.5], &scratch("gridbad")).is_err());
    let _ = fs::remove_dir_all(&out);
}

#[test]
fn fields_dump_respects_numeric_contract() {
    let mut cfg = templates::kdv_soliton();
    cfg.name = "fields_dump".into();
    cfg.grid.n = 256;
    cfg.stepping.t_end = 0.01;
    cfg.stepping.save_stride = 10;
    cfg.save_fields = true;
    let out = scratch("fields");
    let artifacts = run_scenario(&cfg, &out).unwrap();
    let fields = fs::read_to_string(artifacts.dir.join("fields.csv")).unwrap();
    let mut lines = fields.lines();
    assert_eq!(lines.next(), Some("t,x,u"));
    let first = lines.next().unwrap();
    // 17 significant digits, scientific, LF endings, '.' decimal
    for part in first.split(',') {
        assert!(part.contains('e'), "bad numeric field {part}");
        let _: f64 = part.parse().unwrap();
    }
    assert!(!fields.contains('\r'));
    let _ = fs::remove_dir_all(&out);
}

#[test]
fn single_value_sweep_matches_plain_run() {
    let mut cfg = templates::kdv_soliton();
    cfg.stepping.t_end = 0.02;
    cfg.stepping.save_stride = 10;
    cfg.grid.n = 512;
    let out = scratch("single-sweep");
    let outcome = sweep(&cfg, "/stepping/dt", &[1e-3], &out).unwrap();
    assert_eq!(outcome.runs.len(), 1);
    let mut plain = cfg.clone();
    plain.name = format!("{}__1e_3", cfg.name);
    let direct = run_scenario(&plain, &scratch("single-direct")).unwrap();
    let a = fs::read_to_string(outcome.dir.join(&plain.name).join("diag.csv")).unwrap();
    let b = fs::read_to_string(direct.dir.join("diag.csv")).unwrap();
    assert_eq!(a, b, "sweep run differs from the direct run");
    let _ = fs::remove_dir_all(&out);
}

#[test]
fn soliton_meta_records_small_conserved_drift() {
    let mut cfg = templates::kdv_soliton();
    cfg.stepping.t_end = 0.2;
    cfg.stepping.save_stride = 50;
    let out = scratch("soliton-meta");
    let artifacts = run_scenario(&cfg, &out).unwrap();
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(artifacts.dir.join("meta.json")).unwrap()).unwrap();
    let drift = meta["conserved_drift"].as_array().unwrap();
    for d in drift {
        assert!(d.as_f64().unwrap() <= 1e-6, "drift {d}");
    }
    let _ = fs::remove_dir_all(&out);
}

#[test]
fn dealias_flag_is_honored() {
    let mut cfg = templates::kdv_soliton();
    cfg.name = "no_dealias".into();
    cfg.stepping.t_end = 0.01;
    cfg.stepping.save_stride = 10;
    cfg.stepping.dealias = false;
    let out = scratch("dealias");
    let artifacts = run_scenario(&cfg, &out).unwrap();
    assert_eq!(artifacts.status, RunStatus::Ok);
    let _ = fs::remove_dir_all(&out);
}

#[test]
fn suite_names_resolve() {
    use dispersia_cli::suites::suite_ids;
    for name in ["operators", "linear", "solitons", "propagation", "blowup", "transport", "all"] {
        assert!(suite_ids(name).is_some(), "missing suite {name}");
    }
    assert!(suite_ids("bogus").is_none());
    assert_eq!(suite_ids("all").unwrap().len(), 12);
}
