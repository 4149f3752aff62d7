use dispersia_cli::runner::{run_scenario_file, sweep, RunStatus};
use dispersia_cli::scenario::ScenarioConfig;
use dispersia_cli::{output_root, suites, templates, CliError};
use std::path::Path;
use std::process::ExitCode;

const USAGE: &str = "\
dispersia — spectral laboratory for one-dimensional dispersive equations

USAGE:
    dispersia run <config.json>
    dispersia sweep <config.json> --axis <json-pointer> --values <v1,v2,...>
    dispersia check <suite>
    dispersia list

The output root is ./out, overridden by DISPERSIA_OUT. Suites: operators,
linear, solitons, propagation, blowup, transport, all. Axis pointers address
the config document, e.g. /equation/eps_visc or /grid/n.
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(args: &[String]) -> Result<ExitCode, CliError> {
    match args.first().map(String::as_str) {
        Some("run") => {
            let path = args
                .get(1)
                .ok_or_else(|| CliError::Config("run needs a config path".into()))?;
            let artifacts = run_scenario_file(Path::new(path), &output_root())?;
            match artifacts.status {
                RunStatus::Ok => {
                    println!(
                        "ok: {} diagnostic rows -> {}",
                        artifacts.diag_rows,
                        artifacts.dir.display()
                    );
                    Ok(ExitCode::SUCCESS)
                }
                RunStatus::Unstable { time } => {
                    eprintln!(
                        "unstable at t = {time}; failure recorded in {}",
                        artifacts.dir.join("meta.json").display()
                    );
                    Ok(ExitCode::from(3))
                }
            }
        }
        Some("sweep") => {
            let path = args
                .get(1)
                .ok_or_else(|| CliError::Config("sweep needs a config path".into()))?;
            let mut axis = None;
            let mut values: Option<Vec<f64>> = None;
            let mut i = 2;
            while i < args.len() {
                match args[i].as_str() {
                    "--axis" => {
                        axis = args.get(i + 1).cloned();
                        i += 2;
                    }
                    "--values" => {
                        let list = args
                            .get(i + 1)
                            .ok_or_else(|| CliError::Config("--values needs a list".into()))?;
                        let parsed: Result<Vec<f64>, _> =
                            list.split(',').map(str::parse::<f64>).collect();
                        values = Some(parsed.map_err(|e| {
                            CliError::Config(format!("cannot parse --values: {e}"))
                        })?);
                        i += 2;
                    }
                    other => {
                        return Err(CliError::Config(format!("unknown sweep flag '{other}'")));
                    }
                }
            }
            let axis = axis.ok_or_else(|| CliError::Config("sweep needs --axis".into()))?;
            let values = values.ok_or_else(|| CliError::Config("sweep needs --values".into()))?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {path}: {e}")))?;
            let cfg = ScenarioConfig::parse(&text)?;
            let outcome = sweep(&cfg, &axis, &values, &output_root())?;
            let failures = outcome
                .runs
                .iter()
                .filter(|(_, s)| !matches!(s, RunStatus::Ok))
                .count();
            for (v, status) in &outcome.runs {
                match status {
                    RunStatus::Ok => println!("{axis} = {v}: ok"),
                    RunStatus::Unstable { time } => println!("{axis} = {v}: unstable at t = {time}"),
                }
            }
            println!(
                "summary: {} rows -> {}",
                outcome.summary_rows,
                outcome.dir.join("summary.csv").display()
            );
            if failures == outcome.runs.len() {
                Ok(ExitCode::from(3))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
        Some("check") => {
            let suite = args
                .get(1)
                .ok_or_else(|| CliError::Config("check needs a suite name".into()))?;
            match suites::run_suite(suite) {
                Some(results) => {
                    let mut all_pass = true;
                    for r in &results {
                        println!("{}", r.line());
                        all_pass &= r.passed;
                    }
                    if all_pass {
                        Ok(ExitCode::SUCCESS)
                    } else {
                        let failed: Vec<String> = results
                            .iter()
                            .filter(|r| !r.passed)
                            .map(|r| format!("{{\"id\":{},\"name\":\"{}\"}}", r.id, r.name))
                            .collect();
                        eprintln!("{{\"failed\":[{}]}}", failed.join(","));
                        Ok(ExitCode::from(1))
                    }
                }
                None => Err(CliError::Config(format!(
                    "unknown suite '{suite}'; expected one of operators, linear, solitons, propagation, blowup, transport, all"
                ))),
            }
        }
        Some("list") => {
            for (cfg, blurb) in templates::all() {
                println!("### {} — {blurb}", cfg.name);
                println!("{}", serde_json::to_string_pretty(&cfg).unwrap());
            }
            Ok(ExitCode::SUCCESS)
        }
        _ => {
            eprint!("{USAGE}");
            Ok(ExitCode::from(2))
        }
    }
}
