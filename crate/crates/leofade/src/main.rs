//! Command-line front end for the downlink fading experiments.
//!
//! Each verb evaluates one experiment over the configured scenario and
//! writes CSV tables plus a `manifest.json` into the output directory; the
//! manifest records the tool version, the SHA-256 of the exact
//! configuration text (which is copied alongside), and the sampling
//! parameters, so any table can be regenerated from the output directory
//! alone.

use clap::{Parser, Subcommand};
use leofade::error::{Error, Result};
use leofade::experiments::config::ScenarioConfig;
use leofade::experiments::drivers::{
    self, default_eta_grid, run_eta_sweep, run_mc, run_outage_experiment, run_stats_experiment,
    run_validation, DEFAULT_SWEEP_ELEVATIONS_DEG,
};
use leofade::experiments::output::{fmt_flag, fmt_num, fmt_opt, RunWriter};
use leofade::experiments::scenario::{CalibrationResult, Scenario};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "leofade",
    version,
    about = "State-coupled fading and outage experiments for LEO-to-ground optical downlinks",
    arg_required_else_help = true
)]
struct Cli {
    /// Scenario configuration (TOML). Bundled reference scenario when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory for CSV tables and the run manifest.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,

    /// Override the Monte Carlo base seed.
    #[arg(long, global = true, value_name = "INT")]
    seed: Option<u64>,

    /// Override the Monte Carlo sample count per estimate.
    #[arg(long, global = true, value_name = "INT")]
    mc_samples: Option<u64>,

    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// State-averaged second-order statistics over the elevation grid.
    Stats,
    /// Calibrated outage probabilities over the elevation grid.
    Outage {
        /// Attach a Monte Carlo estimate to every samplable row.
        #[arg(long)]
        with_mc: bool,
    },
    /// Outage versus residual tip/tilt correction at fixed elevations.
    EtaSweep {
        /// Elevations in degrees (comma-separated). Default: 25,40,55,70.
        #[arg(long, value_delimiter = ',', value_name = "DEG,...")]
        elevations: Option<Vec<f64>>,
        /// Residual correction factors (comma-separated). Default: 0.05 to 1 in steps of 0.05.
        #[arg(long, value_delimiter = ',', value_name = "ETA,...")]
        etas: Option<Vec<f64>>,
    },
    /// Calibrate the detection threshold and report it.
    Calibrate,
    /// Monte Carlo validation of the coupled model at low elevations.
    Mc,
    /// Check the scenario against its reference values and print a pass/fail table.
    Validate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn calibration_json(cal: &CalibrationResult) -> serde_json::Value {
    json!({
        "nu_ref": cal.nu_ref,
        "p_th_w": cal.p_th,
        "achieved_outage": cal.achieved,
    })
}

fn run(cli: Cli) -> Result<()> {
    let (mut cfg, config_text) = ScenarioConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.mc.seed = seed;
    }
    if let Some(n) = cli.mc_samples {
        if n == 0 {
            return Err(Error::Config("--mc-samples must be at least 1".into()));
        }
        cfg.mc.n = n;
    }
    let config_source = cli
        .config
        .as_ref()
        .map(|p| p.display().to_string())
        .unwrap_or_else(|| "bundled reference".to_string());

    let verb_name = match &cli.verb {
        Verb::Stats => "stats",
        Verb::Outage { .. } => "outage",
        Verb::EtaSweep { .. } => "eta-sweep",
        Verb::Calibrate => "calibrate",
        Verb::Mc => "mc",
        Verb::Validate => "validate",
    };
    let mut writer = RunWriter::new(&cli.out, verb_name, &config_text, &config_source)?;
    let sc = Scenario::new(cfg);

    match cli.verb {
        Verb::Stats => {
            let rows = run_stats_experiment(&sc)?;
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        fmt_num(r.elevation_deg),
                        r.case.clone(),
                        fmt_num(r.sigma_a2_avg),
                        fmt_num(r.beta_rms2_avg),
                    ]
                })
                .collect();
            writer.write_csv(
                "stats.csv",
                &["elevation_deg", "case", "sigma_a2_avg", "beta_rms2_avg"],
                &table,
            )?;
            let manifest = writer.finish(json!({
                "rows": rows.len(),
                "grid_deg": {
                    "min": sc.config.grid.min_deg,
                    "max": sc.config.grid.max_deg,
                    "step": sc.config.grid.step_deg,
                },
                "quad_rel_tol": sc.config.quad.rel_tol,
            }))?;
            println!("wrote stats.csv ({} rows); manifest at {}", rows.len(), manifest.display());
        }

        Verb::Outage { with_mc } => {
            let (cal, rows) = run_outage_experiment(&sc, with_mc)?;
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        fmt_num(r.elevation_deg),
                        r.model.clone(),
                        fmt_num(r.p_out),
                        fmt_opt(r.mc.map(|m| m.estimate)),
                        fmt_opt(r.mc.map(|m| m.stderr)),
                        fmt_flag(r.resolvable),
                    ]
                })
                .collect();
            writer.write_csv(
                "outage.csv",
                &["elevation_deg", "model", "p_out", "p_out_mc", "mc_stderr", "resolvable_flag"],
                &table,
            )?;
            let manifest = writer.finish(json!({
                "rows": rows.len(),
                "eta_tt": sc.config.eta_tt,
                "with_mc": with_mc,
                "mc_samples": sc.config.mc.n,
                "seed": sc.config.mc.seed,
                "calibration": calibration_json(&cal),
            }))?;
            println!(
                "calibrated nu_ref = {} (P_th = {} W)",
                fmt_num(cal.nu_ref),
                fmt_num(cal.p_th)
            );
            println!("wrote outage.csv ({} rows); manifest at {}", rows.len(), manifest.display());
        }

        Verb::EtaSweep { elevations, etas } => {
            let elevations = elevations.unwrap_or_else(|| DEFAULT_SWEEP_ELEVATIONS_DEG.to_vec());
            let etas = etas.unwrap_or_else(default_eta_grid);
            let (cal, rows) = run_eta_sweep(&sc, &elevations, &etas)?;
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        fmt_num(r.elevation_deg),
                        fmt_num(r.eta_tt),
                        r.model.clone(),
                        fmt_num(r.p_out),
                    ]
                })
                .collect();
            writer.write_csv("eta_sweep.csv", &["elevation_deg", "eta_tt", "model", "p_out"], &table)?;
            let manifest = writer.finish(json!({
                "rows": rows.len(),
                "elevations_deg": elevations,
                "etas": etas,
                "calibration": calibration_json(&cal),
            }))?;
            println!("wrote eta_sweep.csv ({} rows); manifest at {}", rows.len(), manifest.display());
        }

        Verb::Calibrate => {
            let cal = sc.calibrate()?;
            let mode = sc.config.calibration.baseline_mode.as_str().to_string();
            writer.write_csv(
                "calibration.csv",
                &[
                    "nu_ref",
                    "p_th_w",
                    "achieved_outage",
                    "target_outage",
                    "ref_elevation_deg",
                    "eta_tt_ref",
                    "baseline_mode",
                ],
                &[vec![
                    fmt_num(cal.nu_ref),
                    fmt_num(cal.p_th),
                    fmt_num(cal.achieved),
                    fmt_num(sc.config.calibration.target_outage),
                    fmt_num(sc.config.calibration.ref_elevation.to_degrees()),
                    fmt_num(sc.config.calibration.eta_tt_ref),
                    mode.clone(),
                ]],
            )?;
            let manifest = writer.finish(json!({
                "calibration": calibration_json(&cal),
                "baseline_mode": mode,
                "target_outage": sc.config.calibration.target_outage,
                "ref_elevation_deg": sc.config.calibration.ref_elevation.to_degrees(),
                "eta_tt_ref": sc.config.calibration.eta_tt_ref,
            }))?;
            println!("nu_ref          = {:.17e}", cal.nu_ref);
            println!("P_th            = {:.17e} W", cal.p_th);
            println!("achieved outage = {:.17e}", cal.achieved);
            println!("manifest at {}", manifest.display());
        }

        Verb::Mc => {
            let (cal, rows) = run_mc(&sc)?;
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        fmt_num(r.elevation_deg),
                        r.model.clone(),
                        fmt_num(r.p_out),
                        fmt_num(r.result.estimate),
                        fmt_num(r.result.stderr),
                        fmt_flag(Some(r.resolvable)),
                    ]
                })
                .collect();
            writer.write_csv(
                "mc.csv",
                &["elevation_deg", "model", "p_out", "p_out_mc", "mc_stderr", "resolvable_flag"],
                &table,
            )?;
            let resolvable_rows = rows.iter().filter(|r| r.resolvable).count();
            let manifest = writer.finish(json!({
                "rows": rows.len(),
                "resolvable_rows": resolvable_rows,
                "eta_tt": sc.config.eta_tt,
                "mc_samples": sc.config.mc.n,
                "seed": sc.config.mc.seed,
                "max_elevation_deg": drivers::MC_SWEEP_MAX_ELEVATION_DEG,
                "calibration": calibration_json(&cal),
            }))?;
            println!(
                "wrote mc.csv ({} rows, {} resolvable); manifest at {}",
                rows.len(),
                resolvable_rows,
                manifest.display()
            );
        }

        Verb::Validate => {
            let (cal, rows) = run_validation(&sc)?;
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.name.clone(),
                        fmt_opt(r.expected),
                        fmt_num(r.computed),
                        fmt_opt(r.rel_err),
                        fmt_opt(r.tol),
                        if r.pass { "pass" } else { "fail" }.to_string(),
                    ]
                })
                .collect();
            writer.write_csv(
                "validation.csv",
                &["check", "reference", "computed", "rel_error", "tolerance", "result"],
                &table,
            )?;
            let failed = rows.iter().filter(|r| !r.pass).count();
            let manifest = writer.finish(json!({
                "checks": rows.len(),
                "failed": failed,
                "eta_tt": sc.config.eta_tt,
                "calibration": calibration_json(&cal),
            }))?;

            println!(
                "{:<44} {:>15} {:>15} {:>10} {:>8}  {}",
                "check", "reference", "computed", "rel err", "tol", "result"
            );
            for r in &rows {
                println!(
                    "{:<44} {:>15} {:>15} {:>10} {:>8}  {}",
                    r.name,
                    r.expected.map(|v| format!("{v:.3e}")).unwrap_or_else(|| "-".into()),
                    format!("{:.6e}", r.computed),
                    r.rel_err.map(|v| format!("{v:+.2e}")).unwrap_or_else(|| "-".into()),
                    r.tol.map(|v| format!("{v:.0e}")).unwrap_or_else(|| "-".into()),
                    if r.pass { "PASS" } else { "FAIL" }
                );
            }
            println!("manifest at {}", manifest.display());
            if failed > 0 {
                return Err(Error::Validation(format!(
                    "{failed} of {} reference checks outside tolerance",
                    rows.len()
                )));
            }
            println!("all {} reference checks passed", rows.len());
        }
    }
    Ok(())
}
