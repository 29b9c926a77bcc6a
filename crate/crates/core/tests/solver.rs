use susy_sigma::action::term_dirichlet;
use susy_sigma::fields::*;
use susy_sigma::geometry::{Grid, TargetManifold};
use susy_sigma::sampling::*;
use susy_sigma::solver::*;
use susy_sigma::Error;

fn sphere() -> TargetManifold {
    TargetManifold::unit_sphere(3)
}

#[test]
fn critical_point_is_returned_unchanged() {
    let g = Grid::square(8).unwrap();
    let phi = equator_map(&g);
    let chi = GravitinoField::zeros(&g);
    let u = ConformalMetric::flat(&g);
    let (st, rep) = solve(phi.clone(), VectorSpinorField::zeros(&g, 3), &chi, &u, &sphere(), &g, &SolverConfig::default()).unwrap();
    assert!(rep.converged);
    assert_eq!(rep.iterations, 0);
    assert!(rep.records.is_empty());
    assert_eq!(st.phi, phi);
}

#[test]
fn invalid_configs_are_rejected() {
    let bad = [
        SolverConfig { tolerance: 0.0, ..Default::default() },
        SolverConfig { initial_step: f64::NAN, ..Default::default() },
        SolverConfig { shrink: 1.0, ..Default::default() },
        SolverConfig { grow: 0.9, ..Default::default() },
    ];
    let g = Grid::square(4).unwrap();
    for c in bad {
        assert!(matches!(c.validate(), Err(Error::InvalidParameter(_))));
        let r = solve(equator_map(&g), VectorSpinorField::zeros(&g, 3), &GravitinoField::zeros(&g), &ConformalMetric::flat(&g), &sphere(), &g, &c);
        assert!(r.is_err());
    }
    SolverConfig::default().validate().unwrap();
}

#[test]
fn harmonic_flow_converges_to_the_equator_energy() {
    let g = Grid::square(16).unwrap();
    let mut r = rng(3);
    let phi = perturbed_equator(&g, &mut r, 0.05);
    let psi = VectorSpinorField::zeros(&g, 3);
    let chi = GravitinoField::zeros(&g);
    let u = ConformalMetric::flat(&g);
    let cfg = SolverConfig { mode: FlowMode::PhiOnly, initial_step: 1e-3, ..Default::default() };
    let e0 = term_dirichlet(&phi, &g);
    let (st, rep) = solve(phi, psi, &chi, &u, &sphere(), &g, &cfg).unwrap();
    assert!(rep.converged, "{:?}", rep.final_residuals);
    assert!(rep.final_residuals.l2 <= 1e-6);
    st.phi.validate(&g, &sphere()).unwrap();
    let h = g.h1();
    let exact = ((std::f64::consts::TAU * h).sin() / h).powi(2);
    let e = term_dirichlet(&st.phi, &g);
    assert!((e - exact).abs() < 1e-2 * exact, "{e} {exact}");
    assert!(e <= e0);
    for w in rep.records.windows(2) {
        assert!(w[1].action.dirichlet <= w[0].action.dirichlet * (1.0 + 1e-13));
    }
}

#[test]
fn runs_are_deterministic_and_report_non_convergence() {
    let g = Grid::square(8).unwrap();
    let m = sphere();
    let mut r = rng(4);
    let phi = random_map(&g, &m, &mut r, 0.3);
    let psi = random_tangent_spinors(&g, &phi, &m, &mut r, 0.05);
    let chi = random_gravitino(&g, &mut r, 0.05);
    let u = ConformalMetric::flat(&g);
    let cfg = SolverConfig { max_iterations: 25, ..Default::default() };
    let (a, ra) = solve(phi.clone(), psi.clone(), &chi, &u, &m, &g, &cfg).unwrap();
    let (b, rb) = solve(phi, psi, &chi, &u, &m, &g, &cfg).unwrap();
    assert_eq!(ra, rb);
    assert_eq!(a.phi, b.phi);
    assert_eq!(a.psi, b.psi);
    assert!(!ra.converged);
    assert_eq!(ra.iterations, 25);
    assert_eq!(ra.records.len(), 25);
}

#[test]
fn joint_flow_keeps_constraints_and_lowers_the_residual() {
    let g = Grid::square(8).unwrap();
    let m = sphere();
    let mut r = rng(5);
    let phi = random_map(&g, &m, &mut r, 0.3);
    let psi = random_tangent_spinors(&g, &phi, &m, &mut r, 0.1);
    let chi = random_gravitino(&g, &mut r, 0.05);
    let u = ConformalMetric::new(smooth_scalar(&g, &mut r, 1, 0.2)).unwrap();
    let cfg = SolverConfig { max_iterations: 40, ..Default::default() };
    let mut st = FlowState::new(phi, psi, &chi, &u, &m, &g, cfg.initial_step).unwrap();
    let start = st.residual_norms.l2;
    for _ in 0..cfg.max_iterations {
        let (next, _) = flow_step(&st, &chi, &u, &m, &g, &cfg).unwrap();
        assert!(next.residual_norms.l2 < st.residual_norms.l2);
        next.phi.validate(&g, &m).unwrap();
        next.psi.check_tangent(&next.phi.frames(&g, &m).unwrap()).unwrap();
        st = next;
    }
    assert!(st.residual_norms.l2 < start);
}

#[test]
fn single_sector_modes_freeze_the_other_field() {
    let g = Grid::square(8).unwrap();
    let m = sphere();
    let mut r = rng(6);
    let phi = random_map(&g, &m, &mut r, 0.3);
    let psi = random_tangent_spinors(&g, &phi, &m, &mut r, 0.1);
    let chi = GravitinoField::zeros(&g);
    let u = ConformalMetric::flat(&g);
    let st = FlowState::new(phi.clone(), psi.clone(), &chi, &u, &m, &g, 1e-4).unwrap();
    let cfg = SolverConfig { mode: FlowMode::PsiOnly, ..Default::default() };
    let (next, _) = flow_step(&st, &chi, &u, &m, &g, &cfg).unwrap();
    assert_eq!(next.phi, phi);
    assert_ne!(next.psi, psi);
}
