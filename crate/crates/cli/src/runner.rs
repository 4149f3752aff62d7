//! Execute scenarios and write their artifacts.
//!
//! Artifact contract per run directory:
//! * `meta.json` — scenario echo, grid, status, timings, conserved drift;
//! * `diag.csv`  — long-format table `t,name,value`, 17 significant digits,
//!   `.` decimal point, `,` separator, LF line endings (a bit-exact contract
//!   for regression baselines);
//! * `fields.csv` — optional `t,x,u` dump under the same numeric contract.

use crate::scenario::{build_initial_data, DiagnosticSpec, ScenarioConfig};
use crate::CliError;
use dispersia_core::diagnostics::{
    halfline_energy, holder_seminorm, locate_jumps, smoothing_integral, weighted_decay_norm,
    CutoffFamily,
};
use dispersia_core::fieldkit::{sobolev_norm, RealField};
use dispersia_core::solvers::{run, Trajectory};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// 17 significant digits, locale-independent.
pub fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Ok,
    Unstable { time: f64 },
}

#[derive(Debug)]
pub struct RunArtifacts {
    pub dir: PathBuf,
    pub status: RunStatus,
    pub meta: serde_json::Value,
    pub diag_rows: usize,
    /// Final state, kept for sweep-level comparisons.
    pub final_state: Option<RealField>,
}

/// Run a scenario file and write artifacts under `out_root/<name>/`.
pub fn run_scenario_file(path: &Path, out_root: &Path) -> Result<RunArtifacts, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let cfg = ScenarioConfig::parse(&text)?;
    run_scenario(&cfg, out_root)
}

/// Run a parsed scenario and write artifacts under `out_root/<name>/`.
pub fn run_scenario(cfg: &ScenarioConfig, out_root: &Path) -> Result<RunArtifacts, CliError> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let u0 = build_initial_data(cfg, grid)?;
    let solver_cfg = cfg.solver_config()?;

    let dir = out_root.join(&cfg.name);
    let started = Instant::now();
    match run(&u0, &solver_cfg) {
        Ok(traj) => {
            let diag = diagnostics_table(cfg, &traj)?;
            fs::create_dir_all(&dir)?;
            let mut csv = String::from("t,name,value\n");
            for (t, name, value) in &diag {
                let _ = writeln!(csv, "{},{},{}", fmt_value(*t), name, fmt_value(*value));
            }
            fs::write(dir.join("diag.csv"), csv)?;
            if cfg.save_fields {
                let mut fields = String::from("t,x,u\n");
                for (t, state) in traj.times().iter().zip(traj.states()) {
                    for (i, v) in state.values().iter().enumerate() {
                        let _ = writeln!(
                            fields,
                            "{},{},{}",
                            fmt_value(*t),
                            fmt_value(grid.point(i)),
                            fmt_value(*v)
                        );
                    }
                }
                fs::write(dir.join("fields.csv"), fields)?;
            }
            let drift = traj.conserved_drift();
            let meta = serde_json::json!({
                "scenario": cfg,
                "version": env!("CARGO_PKG_VERSION"),
                "status": "ok",
                "failure_time": null,
                "grid": {"n": grid.n(), "length": grid.length(), "left": grid.left(), "dx": grid.dx()},
                "snapshots": traj.len(),
                "t_end": traj.last_time(),
                "conserved_names": traj.conserved_names(),
                "conserved_drift": drift,
                "wall_ms": started.elapsed().as_millis() as u64,
            });
            fs::write(dir.join("meta.json"), serde_json::to_string_pretty(&meta).unwrap())?;
            Ok(RunArtifacts {
                dir,
                status: RunStatus::Ok,
                meta,
                diag_rows: diag.len(),
                final_state: Some(traj.last_state().clone()),
            })
        }
        Err(dispersia_core::Error::Instability { time, reason }) => {
            fs::create_dir_all(&dir)?;
            let meta = serde_json::json!({
                "scenario": cfg,
                "version": env!("CARGO_PKG_VERSION"),
                "status": "unstable",
                "failure_time": time,
                "failure_reason": reason,
                "wall_ms": started.elapsed().as_millis() as u64,
            });
            fs::write(dir.join("meta.json"), serde_json::to_string_pretty(&meta).unwrap())?;
            Ok(RunArtifacts {
                dir,
                status: RunStatus::Unstable { time },
                meta,
                diag_rows: 0,
                final_state: None,
            })
        }
        Err(e) => Err(e.into()),
    }
}

/// Evaluate the requested diagnostics on every snapshot (trajectory-level
/// diagnostics land on the final time). Conserved functionals are always
/// included. Returns `(t, name, value)` rows, time-major.
fn diagnostics_table(
    cfg: &ScenarioConfig,
    traj: &Trajectory,
) -> Result<Vec<(f64, String, f64)>, CliError> {
    let mut rows = Vec::new();
    for (snap, (t, state)) in traj.times().iter().zip(traj.states()).enumerate() {
        for (name, value) in traj.conserved_names().iter().zip(&traj.conserved()[snap]) {
            rows.push((*t, (*name).to_string(), *value));
        }
        for d in &cfg.diagnostics {
            match d {
                DiagnosticSpec::Mass => rows.push((*t, "mass_diag".into(), state.integral())),
                DiagnosticSpec::L2 => rows.push((*t, "l2".into(), state.l2_norm())),
                DiagnosticSpec::Sobolev { s } => {
                    rows.push((*t, format!("sobolev_s{s}"), sobolev_norm(state, *s)));
                }
                DiagnosticSpec::Halfline { j, a } => {
                    rows.push((*t, format!("halfline_j{j}"), halfline_energy(state, *j, *a)?));
                }
                DiagnosticSpec::HalflineMoving { j, x0, eps, v } => {
                    let a = x0 + eps - v * t;
                    rows.push((
                        *t,
                        format!("halfline_moving_j{j}"),
                        halfline_energy(state, *j, a)?,
                    ));
                }
                DiagnosticSpec::WeightedDecay { j, delta } => {
                    rows.push((
                        *t,
                        format!("decay_j{j}"),
                        weighted_decay_norm(state, *j, *delta)?,
                    ));
                }
                DiagnosticSpec::Jumps { threshold } => {
                    let jumps = locate_jumps(state, *threshold);
                    let strongest = jumps
                        .iter()
                        .max_by(|a, b| a.size.abs().total_cmp(&b.size.abs()));
                    rows.push((*t, "jump_count".into(), jumps.len() as f64));
                    rows.push((*t, "jump_position".into(), strongest.map_or(0.0, |j| j.position)));
                    rows.push((*t, "jump_size".into(), strongest.map_or(0.0, |j| j.size)));
                }
                DiagnosticSpec::Holder { k, theta, a, b } => {
                    rows.push((
                        *t,
                        format!("holder_k{k}"),
                        holder_seminorm(state, (*a, *b), *k, *theta)?,
                    ));
                }
                DiagnosticSpec::Smoothing { .. } => {}
            }
        }
    }
    for d in &cfg.diagnostics {
        if let DiagnosticSpec::Smoothing { l, v, eps, b } = d {
            let cutoff = CutoffFamily::new(*eps, *b)?;
            let value = smoothing_integral(traj, *l, *v, &cutoff)?;
            rows.push((traj.last_time(), format!("smoothing_l{l}"), value));
        }
    }
    Ok(rows)
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub dir: PathBuf,
    pub runs: Vec<(f64, RunStatus)>,
    pub summary_rows: usize,
}

/// Run the scenario once per value of `axis` (a JSON pointer such as
/// `/equation/eps_visc` or `/grid/n`), in parallel, and write a long-format
/// `summary.csv` of each run's final-time diagnostics. When consecutive runs
/// share a grid, the `h3_diff_prev` row records the `H^3` distance between
/// their final states.
pub fn sweep(
    cfg: &ScenarioConfig,
    axis: &str,
    values: &[f64],
    out_root: &Path,
) -> Result<SweepOutcome, CliError> {
    if values.is_empty() {
        return Err(CliError::Config("sweep needs at least one value".into()));
    }
    let base = serde_json::to_value(cfg).unwrap();
    if base.pointer(axis).is_none() {
        return Err(CliError::Config(format!(
            "axis '{axis}' does not name a scenario parameter"
        )));
    }
    let integer_axis = base.pointer(axis).unwrap().is_u64();
    let sweep_dir = out_root.join(format!("{}__sweep", cfg.name));

    let mut configs = Vec::new();
    for v in values {
        let mut modified = base.clone();
        let slot = modified.pointer_mut(axis).unwrap();
        *slot = if integer_axis {
            if v.fract() != 0.0 || *v < 0.0 {
                return Err(CliError::Config(format!(
                    "axis '{axis}' takes integer values, got {v}"
                )));
            }
            serde_json::json!(*v as u64)
        } else {
            serde_json::json!(v)
        };
        let mut sub: ScenarioConfig = serde_json::from_value(modified)
            .map_err(|e| CliError::Config(format!("axis value {v} yields an invalid config: {e}")))?;
        sub.name = format!("{}__{}", cfg.name, sanitize(&format!("{v:e}")));
        sub.validate()?;
        configs.push(sub);
    }

    // share-nothing fan-out; artifact directories are disjoint
    let results: Vec<Result<RunArtifacts, CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|sub| {
                let dir = sweep_dir.clone();
                scope.spawn(move || run_scenario(sub, &dir))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });

    let mut summary = String::from("axis_value,name,value\n");
    let mut runs = Vec::new();
    let mut rows = 0usize;
    let mut prev_state: Option<RealField> = None;
    for (v, result) in values.iter().zip(results) {
        match result {
            Ok(artifacts) => {
                runs.push((*v, artifacts.status.clone()));
                match artifacts.status {
                    RunStatus::Ok => {
                        let diag = fs::read_to_string(artifacts.dir.join("diag.csv"))?;
                        let final_t = diag
                            .lines()
                            .skip(1)
                            .filter_map(|l| l.split(',').next())
                            .last()
                            .unwrap_or("")
                            .to_string();
                        for line in diag.lines().skip(1) {
                            let mut parts = line.splitn(3, ',');
                            let (t, name, value) = (
                                parts.next().unwrap_or(""),
                                parts.next().unwrap_or(""),
                                parts.next().unwrap_or(""),
                            );
                            if t == final_t {
                                let _ = writeln!(summary, "{},{name},{value}", fmt_value(*v));
                                rows += 1;
                            }
                        }
                        if let (Some(prev), Some(cur)) = (&prev_state, &artifacts.final_state) {
                            if prev.grid() == cur.grid() {
                                let d = sobolev_norm(&cur.sub(prev), 3.0);
                                let _ = writeln!(
                                    summary,
                                    "{},h3_diff_prev,{}",
                                    fmt_value(*v),
                                    fmt_value(d)
                                );
                                rows += 1;
                            }
                        }
                        prev_state = artifacts.final_state;
                    }
                    RunStatus::Unstable { time } => {
                        let _ = writeln!(summary, "{},unstable_at,{}", fmt_value(*v), fmt_value(time));
                        rows += 1;
                        prev_state = None;
                    }
                }
            }
            Err(e) => return Err(e),
        }
    }
    fs::create_dir_all(&sweep_dir)?;
    fs::write(sweep_dir.join("summary.csv"), summary)?;
    Ok(SweepOutcome {
        dir: sweep_dir,
        runs,
        summary_rows: rows,
    })
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}
