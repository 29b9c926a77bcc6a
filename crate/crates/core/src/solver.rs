//! Projected gradient flow towards critical points of the discrete action.
//!
//! One step moves the map along its residual and the spinor along the
//! residual-descent direction, then restores the constraints:
//!
//! ```text
//! φ ← project(φ + dt r_φ)
//! ψ ← P_T(φ)(ψ - dt P_T[(D - |Qχ|²) r_ψ])
//! ```
//!
//! A trial step is accepted when the Dirichlet energy does not increase (map
//! sector only, `ψ = χ = 0`) or when the combined residual norm decreases.

use crate::action::{term_dirichlet, total_action, ActionBreakdown};
use crate::clifford::q_norm_sq;
use crate::error::{Error, Result};
use crate::euler_lagrange::{ElResidual, ResidualNorms};
use crate::fields::{
    tangency_project, twisted_dirac, ConformalMetric, GravitinoField, MapField, VectorSpinorField,
};
use crate::geometry::{Grid, TargetManifold};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowMode {
    Joint,
    PhiOnly,
    PsiOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub initial_step: f64,
    pub shrink: f64,
    pub grow: f64,
    pub mode: FlowMode,
    /// Seed of the run that produced the initial data; recorded in reports.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iterations: 100_000,
            tolerance: 1e-6,
            initial_step: 1e-4,
            shrink: 0.5,
            grow: 1.1,
            mode: FlowMode::Joint,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter("tolerance must be positive".into()));
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return Err(Error::InvalidParameter("initial step must be positive".into()));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0 && self.grow > 1.0 && self.grow.is_finite()) {
            return Err(Error::InvalidParameter("need 0 < shrink < 1 < grow".into()));
        }
        Ok(())
    }
}

/// Smallest admissible step size.
pub const MIN_STEP: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct FlowState {
    pub phi: MapField,
    pub psi: VectorSpinorField,
    pub iteration: usize,
    pub residual_norms: ResidualNorms,
    pub step_size: f64,
    residual: ElResidual,
}

impl FlowState {
    pub fn new(
        phi: MapField,
        psi: VectorSpinorField,
        chi: &GravitinoField,
        u: &ConformalMetric,
        m: &TargetManifold,
        grid: &Grid,
        step_size: f64,
    ) -> Result<FlowState> {
        let residual = ElResidual::compute(&phi, &psi, chi, u, m, grid)?;
        Ok(FlowState { phi, psi, iteration: 0, residual_norms: residual.norms, step_size, residual })
    }

    pub fn residual(&self) -> &ElResidual {
        &self.residual
    }
}

/// One record of the convergence report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub step_size: f64,
    pub rejected_trials: usize,
    pub action: ActionBreakdown,
    pub residuals: ResidualNorms,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub converged: bool,
    pub iterations: usize,
    pub seed: u64,
    pub final_residuals: ResidualNorms,
    pub final_action: ActionBreakdown,
    pub records: Vec<IterationRecord>,
}

fn descent_directions(
    state: &FlowState,
    chi: &GravitinoField,
    u: &ConformalMetric,
    m: &TargetManifold,
    grid: &Grid,
    mode: FlowMode,
) -> Result<(Option<Vec<f64>>, Option<VectorSpinorField>)> {
    let dphi = if mode == FlowMode::PsiOnly { None } else { Some(state.residual.r_phi.clone()) };
    let dpsi = if mode == FlowMode::PhiOnly || state.residual.r_psi.is_zero() {
        None
    } else {
        let r = &state.residual.r_psi;
        let mut d = twisted_dirac(r, &state.phi, u, m, grid)?;
        let eu = u.exp(1.0);
        for site in 0..r.sites() {
            let q = eu[site] * q_norm_sq(&chi.data()[site]);
            for (o, x) in d.at_mut(site).iter_mut().zip(r.at(site)) {
                *o = -(*o - *x * q);
            }
        }
        Some(d)
    };
    Ok((dphi, dpsi))
}

/// Attempts steps of decreasing size until one is accepted.
pub fn flow_step(
    state: &FlowState,
    chi: &GravitinoField,
    u: &ConformalMetric,
    m: &TargetManifold,
    grid: &Grid,
    config: &SolverConfig,
) -> Result<(FlowState, usize)> {
    if state.residual_norms.l2 == 0.0 {
        return Ok((state.clone(), 0));
    }
    let (dphi, dpsi) = descent_directions(state, chi, u, m, grid, config.mode)?;
    let pure_map = config.mode != FlowMode::PsiOnly && state.psi.is_zero() && chi.is_zero();
    let energy = if pure_map { term_dirichlet(&state.phi, grid) } else { 0.0 };
    let k = state.phi.k();
    let mut dt = state.step_size;
    let mut rejected = 0;
    loop {
        if !(dt >= MIN_STEP) {
            return Err(Error::StepUnderflow(dt));
        }
        let mut phi = state.phi.clone();
        if let Some(d) = &dphi {
            for site in 0..phi.sites() {
                let p: Vec<f64> = (0..k).map(|a| phi.point(site)[a] + dt * d[site * k + a]).collect();
                phi.point_mut(site).copy_from_slice(&m.project(&p));
            }
        }
        let mut psi = state.psi.clone();
        if let Some(d) = &dpsi {
            for (o, x) in psi.data_mut().iter_mut().zip(d.data()) {
                *o += *x * dt;
            }
        }
        if dphi.is_some() || dpsi.is_some() {
            psi = tangency_project(&psi, &phi, m);
        }
        let residual = ElResidual::compute(&phi, &psi, chi, u, m, grid)?;
        let accept = if pure_map {
            let e = term_dirichlet(&phi, grid);
            e <= energy + 64.0 * f64::EPSILON * energy.abs()
        } else {
            residual.norms.l2 < state.residual_norms.l2
        };
        if accept {
            let next = FlowState {
                phi,
                psi,
                iteration: state.iteration + 1,
                residual_norms: residual.norms,
                step_size: dt * config.grow,
                residual,
            };
            return Ok((next, rejected));
        }
        rejected += 1;
        dt *= config.shrink;
    }
}

/// Runs the flow until the combined residual L² norm reaches the tolerance.
pub fn solve(
    phi: MapField,
    psi: VectorSpinorField,
    chi: &GravitinoField,
    u: &ConformalMetric,
    m: &TargetManifold,
    grid: &Grid,
    config: &SolverConfig,
) -> Result<(FlowState, ConvergenceReport)> {
    config.validate()?;
    let mut state = FlowState::new(phi, psi, chi, u, m, grid, config.initial_step)?;
    let mut records = Vec::new();
    while state.residual_norms.l2 > config.tolerance && state.iteration < config.max_iterations {
        let (next, rejected) = flow_step(&state, chi, u, m, grid, config)?;
        state = next;
        let action = total_action(&state.phi, &state.psi, u, chi, m, grid)?;
        records.push(IterationRecord {
            iteration: state.iteration,
            step_size: state.step_size,
            rejected_trials: rejected,
            action,
            residuals: state.residual_norms,
        });
    }
    let final_action = total_action(&state.phi, &state.psi, u, chi, m, grid)?;
    let report = ConvergenceReport {
        converged: state.residual_norms.l2 <= config.tolerance,
        iterations: state.iteration,
        seed: config.seed,
        final_residuals: state.residual_norms,
        final_action,
        records,
    };
    Ok((state, report))
}
