//! Command line front end.
//!
//! `check` runs the comparison suite described by a JSON config and emits a
//! report; `model-fn` tabulates the one-dimensional model functions as CSV.
//!
//! Exit codes for `check`: 0 when every requested check holds or is vacuous
//! by declared expectation, 2 on any violated or undeclared-vacuous verdict,
//! 1 on config or solver errors.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use wricci::config::{run, write_atomic, write_margin_csvs, RunConfig};
use wricci::model_functions::{solve_model, KappaProfile};

#[derive(Parser)]
#[command(name = "wricci", version, about = "Curvature comparison checks on weighted model spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks requested by a JSON config file
    Check {
        /// Path to the JSON run configuration
        #[arg(long)]
        config: PathBuf,
        /// Write the JSON report here instead of stdout
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write one margin-curve CSV per check into this directory
        #[arg(long)]
        csv_dir: Option<PathBuf>,
        /// Override a tolerance, e.g. --tol check_tol=1e-5 (repeatable)
        #[arg(long = "tol", value_name = "NAME=VALUE")]
        tol: Vec<String>,
    },
    /// Tabulate the model functions for a curvature profile as CSV
    ModelFn {
        /// Constant value, or path to a JSON file {"grid": [...], "values": [...]}
        #[arg(long)]
        kappa: String,
        /// Normalization constant of the comparison ODE (must be positive)
        #[arg(long)]
        c: f64,
        /// Largest argument to tabulate
        #[arg(long)]
        max: f64,
        /// Tabulation step
        #[arg(long)]
        step: f64,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
    },
}

fn apply_tol_overrides(cfg: &mut RunConfig, overrides: &[String]) -> Result<(), String> {
    for item in overrides {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| format!("--tol expects NAME=VALUE, got {item:?}"))?;
        let value: f64 = value
            .parse()
            .map_err(|_| format!("--tol value {value:?} is not a number"))?;
        match name {
            "check_tol" => cfg.tolerances.check_tol = Some(value),
            "eq_tol" => cfg.tolerances.eq_tol = Some(value),
            other => return Err(format!("unknown tolerance {other:?}")),
        }
    }
    Ok(())
}

fn cmd_check(
    config: &PathBuf,
    report_path: Option<&PathBuf>,
    csv_dir: Option<&PathBuf>,
    tol: &[String],
) -> Result<u8, String> {
    let text = std::fs::read_to_string(config)
        .map_err(|e| format!("cannot read {}: {e}", config.display()))?;
    let mut cfg: RunConfig =
        serde_json::from_str(&text).map_err(|e| format!("invalid config: {e}"))?;
    apply_tol_overrides(&mut cfg, tol)?;
    let report = run(&cfg).map_err(|e| e.to_string())?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
    match report_path {
        Some(p) => write_atomic(p, json.as_bytes())
            .map_err(|e| format!("cannot write {}: {e}", p.display()))?,
        None => println!("{json}"),
    }
    if let Some(dir) = csv_dir {
        write_margin_csvs(&report, dir)
            .map_err(|e| format!("cannot write CSVs in {}: {e}", dir.display()))?;
    }
    for line in &report.canonical.summary {
        eprintln!("{line}");
    }
    Ok(report.canonical.exit_code as u8)
}

fn parse_kappa_spec(spec: &str) -> Result<KappaProfile, String> {
    if let Ok(v) = spec.parse::<f64>() {
        return Ok(KappaProfile::constant(v));
    }
    #[derive(serde::Deserialize)]
    struct Table {
        grid: Vec<f64>,
        values: Vec<f64>,
    }
    let text = std::fs::read_to_string(spec).map_err(|e| format!("cannot read {spec}: {e}"))?;
    let table: Table =
        serde_json::from_str(&text).map_err(|e| format!("invalid curvature table: {e}"))?;
    KappaProfile::sampled(table.grid, table.values).map_err(|e| e.to_string())
}

fn csv_value(v: Result<f64, impl std::fmt::Display>) -> String {
    match v {
        Ok(x) => format!("{x}"),
        Err(_) => "nan".into(),
    }
}

fn cmd_model_fn(kappa: &str, c: f64, max: f64, step: f64, out: &PathBuf) -> Result<(), String> {
    if !(step > 0.0 && max > 0.0) {
        return Err("--max and --step must be positive".into());
    }
    let profile = parse_kappa_spec(kappa)?;
    let mf = solve_model(profile, c, 1.05 * max).map_err(|e| e.to_string())?;
    let mut csv = String::from("s,s_kappa,ds_kappa,cot_kappa,H_kappa,S_kappa\n");
    let rows = (max / step).round() as usize;
    for i in 0..=rows {
        let s = (i as f64 * step).min(max);
        let cot = if s == 0.0 {
            "inf".to_string()
        } else {
            csv_value(mf.cot_kappa(s))
        };
        let h = if s == 0.0 {
            "inf".to_string()
        } else {
            csv_value(mf.h_kappa(s))
        };
        csv.push_str(&format!(
            "{s},{},{},{cot},{h},{}\n",
            mf.s_kappa(s),
            mf.ds_kappa(s),
            csv_value(mf.model_volume(s)),
        ));
    }
    write_atomic(out, csv.as_bytes()).map_err(|e| format!("cannot write {}: {e}", out.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Check {
            config,
            report,
            csv_dir,
            tol,
        } => cmd_check(config, report.as_ref(), csv_dir.as_ref(), tol),
        Command::ModelFn {
            kappa,
            c,
            max,
            step,
            out,
        } => cmd_model_fn(kappa, *c, *max, *step, out).map(|()| 0),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
