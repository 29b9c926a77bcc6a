//! Command implementations behind the `susy-sigma` binary.

pub mod config;

use config::RunConfig;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use susy_sigma::action::total_action;
use susy_sigma::analysis::{decay_profile, lp_norm, morrey_norm, MorreyParams};
use susy_sigma::checks::{self, CheckOutcome, CheckReport};
use susy_sigma::euler_lagrange::{ElResidual, ResidualNorms};
use susy_sigma::io::{write_profile_csv, FieldTable};
use susy_sigma::sampling;
use susy_sigma::solver::solve;
use susy_sigma::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Eval,
    Check,
    Residual,
    Solve,
    Morrey,
}

/// What a command printed and whether it succeeded.
#[derive(Debug)]
pub struct Outcome {
    pub success: bool,
    pub summary: serde_json::Value,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

fn to_value<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("serializable summary")
}

/// Contents of `residuals.json`.
#[derive(Debug, Serialize, Deserialize)]
pub struct ResidualArtifact {
    pub norms: ResidualNorms,
    pub r_phi: FieldTable,
    pub r_psi: FieldTable,
}

/// Loads the config, applies the seed override and runs one command.
pub fn run(command: Command, config_path: &Path, out: &Path, seed: Option<u64>) -> Result<Outcome> {
    let mut cfg = RunConfig::load(config_path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    std::fs::create_dir_all(out)?;
    match command {
        Command::Eval => eval(&cfg, out),
        Command::Check => check(&cfg, out),
        Command::Residual => residual(&cfg, out),
        Command::Solve => run_solve(&cfg, out),
        Command::Morrey => morrey(&cfg, out),
    }
}

fn eval(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let grid = cfg.grid()?;
    let m = cfg.target()?;
    let f = cfg.fields(&grid, &m)?;
    let b = total_action(&f.phi, &f.psi, &f.u, &f.chi, &m, &grid)?;
    write_json(&out.join("breakdown.json"), &b)?;
    Ok(Outcome { success: true, summary: to_value(&b) })
}

fn check(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let grid = cfg.grid()?;
    let m = cfg.target()?;
    let f = cfg.fields(&grid, &m)?;
    // Auxiliary random data comes from a stream independent of the field stream.
    let mut rng = sampling::rng(cfg.seed ^ 0x5eed_c4ec);
    let mut outcomes: Vec<CheckOutcome> = checks::clifford_suite(&mut rng, 1000);
    outcomes.extend(checks::projector_suite(&f.chi));
    let s = sampling::random_spinors(&grid, &mut rng, 1.0);
    let t = sampling::random_spinors(&grid, &mut rng, 1.0);
    outcomes.extend(checks::dirac_suite(&grid, &s, &t, &f.u));
    let shift = sampling::random_spinors(&grid, &mut rng, 1.0);
    outcomes.extend(checks::symmetry_suite(&f.phi, &f.psi, &f.chi, &f.u, &shift, &m, &grid)?);
    let c = checks::conformal_defect(&f.phi, &f.psi, &f.chi, &f.u, &m, &grid)?;
    outcomes.push(CheckOutcome::new("conformal", "rescaled_total", c, 1e-10));
    outcomes.extend(checks::antisymmetry_suite(&f.phi, &f.psi, &f.chi, &f.u, &m, &grid)?);
    let report = CheckReport::new(cfg.seed, outcomes);
    write_json(&out.join("check_report.json"), &report)?;
    let failed: Vec<String> =
        report.checks.iter().filter(|c| !c.passed).map(|c| format!("{}/{}", c.suite, c.name)).collect();
    Ok(Outcome {
        success: report.passed,
        summary: serde_json::json!({ "passed": report.passed, "checks": report.checks.len(), "failed": failed }),
    })
}

fn residual(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let grid = cfg.grid()?;
    let m = cfg.target()?;
    let f = cfg.fields(&grid, &m)?;
    let r = ElResidual::compute(&f.phi, &f.psi, &f.chi, &f.u, &m, &grid)?;
    let art = ResidualArtifact {
        norms: r.norms,
        r_phi: FieldTable::from_map(&grid, &susy_sigma::fields::MapField::new(f.phi.k(), r.r_phi.clone())?),
        r_psi: FieldTable::from_spinors(&grid, &r.r_psi),
    };
    write_json(&out.join("residuals.json"), &art)?;
    Ok(Outcome { success: true, summary: to_value(&r.norms) })
}

fn run_solve(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let grid = cfg.grid()?;
    let m = cfg.target()?;
    let f = cfg.fields(&grid, &m)?;
    let (state, report) = solve(f.phi, f.psi, &f.chi, &f.u, &m, &grid, &cfg.solver_config())?;
    let mut w = BufWriter::new(File::create(out.join("flow_report.jsonl"))?);
    for rec in &report.records {
        serde_json::to_writer(&mut w, rec).map_err(|e| Error::Parse(e.to_string()))?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    FieldTable::from_map(&grid, &state.phi).save(&out.join("fields_phi.csv"))?;
    FieldTable::from_spinors(&grid, &state.psi).save(&out.join("fields_psi.csv"))?;
    FieldTable::from_gravitino(&grid, &f.chi).save(&out.join("fields_chi.csv"))?;
    Ok(Outcome {
        success: report.converged,
        summary: serde_json::json!({
            "converged": report.converged,
            "iterations": report.iterations,
            "seed": report.seed,
            "final_residuals": report.final_residuals,
            "final_action": report.final_action,
        }),
    })
}

fn morrey(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let s = &cfg.morrey;
    let (disc, field, radii) = cfg.disc()?;
    let profile = decay_profile(&disc, &field, s.center, s.p, s.lambda, &radii)?;
    write_profile_csv(File::create(out.join("decay_profile.csv"))?, "scaled_norm", &profile)?;
    let norm = |lambda| morrey_norm(&disc, &field, MorreyParams::new(s.p, lambda)?, &radii);
    Ok(Outcome {
        success: true,
        summary: serde_json::json!({
            "p": s.p,
            "lambda": s.lambda,
            "morrey_norm": norm(s.lambda)?,
            "morrey_norm_lambda_0": norm(0.0)?,
            "morrey_norm_lambda_2": norm(2.0)?,
            "lp_norm": lp_norm(&disc, &field, s.p),
        }),
    })
}

/// Machine-readable error record.
pub fn error_json(e: &Error) -> serde_json::Value {
    serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } })
}
