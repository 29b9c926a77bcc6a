//! Identity and symmetry suites shared by the command line and the tests.
//!
//! Each check reports the observed defect next to its tolerance. Defects of
//! scalar quantities are relative to `max(1, |reference|)`.

use crate::action::{total_action, ActionBreakdown};
use crate::clifford::{
    clifford_mul, gamma_contract, p_project, q_norm_sq, q_project, quaternionic_structure,
    sigma_lift, spinor_inner, volume_mul, Quaternion, Spinor, SpinorTangent,
};
use crate::error::Result;
use crate::euler_lagrange::{assemble_map_equation, potentials, residual_phi};
use crate::fields::{
    dirac_conformal, dirac_flat, dirac_untwisted, ConformalMetric, GravitinoField, MapField,
    VectorSpinorField,
};
use crate::geometry::{Grid, TargetManifold};
use crate::sampling::SeededRng;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub suite: String,
    pub name: String,
    pub defect: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckOutcome {
    pub fn new(suite: &str, name: &str, defect: f64, tolerance: f64) -> CheckOutcome {
        CheckOutcome {
            suite: suite.into(),
            name: name.into(),
            defect,
            tolerance,
            passed: defect <= tolerance,
        }
    }
}

/// Tolerance of exact identities.
pub const EXACT: f64 = 1e-12;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn spinor_dist(a: Spinor, b: Spinor) -> f64 {
    (a - b).norm_sq().sqrt()
}

fn tangent_dist(a: &SpinorTangent, b: &SpinorTangent) -> f64 {
    spinor_dist(a.0[0], b.0[0]).max(spinor_dist(a.0[1], b.0[1]))
}

fn random_spinor(rng: &mut SeededRng) -> Spinor {
    Spinor([0; 4].map(|_| rng.gen_range(-1.0..1.0)))
}

fn random_tangent(rng: &mut SeededRng) -> SpinorTangent {
    SpinorTangent([random_spinor(rng), random_spinor(rng)])
}

/// Tracks the worst defect of one named identity.
struct Worst(f64);

impl Worst {
    fn see(&mut self, d: f64) {
        if !(d <= self.0) {
            self.0 = if d.is_nan() { f64::INFINITY } else { d };
        }
    }
}

/// Fiber identities on the basis spinors and on `samples` random fibers.
pub fn clifford_suite(rng: &mut SeededRng, samples: usize) -> Vec<CheckOutcome> {
    let mut spinors: Vec<Spinor> = (0..4).map(Spinor::basis).collect();
    spinors.extend((0..samples).map(|_| random_spinor(rng)));
    let mut vectors = vec![[1.0, 0.0], [0.0, 1.0]];
    vectors.extend((0..samples).map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]));
    let mut tangents: Vec<SpinorTangent> = (0..8)
        .map(|i| {
            let mut t = SpinorTangent::ZERO;
            t.0[i / 4] = Spinor::basis(i % 4);
            t
        })
        .collect();
    tangents.extend((0..samples).map(|_| random_tangent(rng)));

    let names = [
        "clifford_relation",
        "skew_symmetry",
        "quaternion_squares",
        "quaternion_product",
        "quaternion_commutes",
        "volume_square",
        "gamma_sigma_identity",
        "p_plus_q_identity",
        "p_idempotent",
        "q_idempotent",
        "gamma_kills_q",
        "pythagoras_p_q",
    ];
    let mut worst: Vec<Worst> = names.iter().map(|_| Worst(0.0)).collect();

    for (i, s) in spinors.iter().enumerate() {
        let v = vectors[i % vectors.len()];
        let w = vectors[(i * 7 + 1) % vectors.len()];
        let t = spinors[(i * 3 + 1) % spinors.len()];
        let lhs = clifford_mul(v, clifford_mul(w, *s)) + clifford_mul(w, clifford_mul(v, *s));
        let vw = v[0] * w[0] + v[1] * w[1];
        worst[0].see(spinor_dist(lhs, *s * (-2.0 * vw)));
        worst[1].see((spinor_inner(&clifford_mul(v, *s), &t) + spinor_inner(s, &clifford_mul(v, t))).abs());
        for q in [Quaternion::I, Quaternion::J, Quaternion::K] {
            worst[2].see(spinor_dist(quaternionic_structure(q, quaternionic_structure(q, *s)), -*s));
            worst[4].see(spinor_dist(
                quaternionic_structure(q, clifford_mul(v, *s)),
                clifford_mul(v, quaternionic_structure(q, *s)),
            ));
        }
        let jk = quaternionic_structure(Quaternion::J, quaternionic_structure(Quaternion::K, *s));
        worst[3].see(spinor_dist(quaternionic_structure(Quaternion::I, *s), jk));
        worst[5].see(spinor_dist(volume_mul(volume_mul(*s)), -*s));
        worst[6].see(spinor_dist(gamma_contract(&sigma_lift(*s)), *s));
    }
    for chi in &tangents {
        let (p, q) = (p_project(chi), q_project(chi));
        worst[7].see(tangent_dist(&(p + q), chi));
        worst[8].see(tangent_dist(&p_project(&p), &p));
        worst[9].see(tangent_dist(&q_project(&q), &q));
        worst[10].see(gamma_contract(&q).norm_sq().sqrt());
        worst[11].see((p.norm_sq() + q.norm_sq() - chi.norm_sq()).abs());
    }
    names
        .iter()
        .zip(worst)
        .map(|(n, w)| CheckOutcome::new("clifford", n, w.0, EXACT))
        .collect()
}

/// Projector algebra applied fieldwise, plus the identity `⟨χ, Qχ⟩ = |Qχ|²`.
pub fn projector_suite(chi: &GravitinoField) -> Vec<CheckOutcome> {
    let mut sum = Worst(0.0);
    let mut norm = Worst(0.0);
    let mut sigma = Worst(0.0);
    for c in chi.data() {
        let (p, q) = (p_project(c), q_project(c));
        sum.see(tangent_dist(&(p + q), c));
        norm.see((q_norm_sq(c) - q.norm_sq()).abs());
        sigma.see(q_project(&sigma_lift(gamma_contract(c))).norm_sq().sqrt());
    }
    vec![
        CheckOutcome::new("projector", "field_p_plus_q", sum.0, EXACT),
        CheckOutcome::new("projector", "q_norm_identity", norm.0, EXACT),
        CheckOutcome::new("projector", "q_kills_sigma", sigma.0, EXACT),
    ]
}

fn flat_pairing(a: &[Spinor], b: &[Spinor], weight: &[f64]) -> f64 {
    a.iter().zip(b).zip(weight).map(|((x, y), w)| w * x.dot(y)).sum()
}

/// Symmetry of the discrete Dirac operators and the two Dirac actions.
pub fn dirac_suite(grid: &Grid, s: &[Spinor], t: &[Spinor], u: &ConformalMetric) -> Vec<CheckOutcome> {
    let ones = vec![1.0; grid.len()];
    let (ds, dt) = (dirac_flat(s, grid), dirac_flat(t, grid));
    let a = flat_pairing(s, &dt, &ones);
    let b = flat_pairing(&ds, t, &ones);

    let e3 = u.exp(3.0);
    let (gs, gt) = (dirac_conformal(s, u, grid), dirac_conformal(t, u, grid));
    let c = flat_pairing(s, &gt, &e3);
    let d = flat_pairing(&gs, t, &e3);

    let sigma: Vec<[f64; 2]> = s.iter().map(|v| [v.0[0], v.0[1]]).collect();
    let dsig = dirac_untwisted(&sigma, grid);
    let untwisted: f64 = sigma.iter().zip(&dsig).map(|(x, y)| x[0] * y[0] + x[1] * y[1]).sum();
    let twisted = flat_pairing(s, &ds, &ones);
    let scale: f64 = s.iter().map(|v| v.norm_sq()).sum::<f64>().max(1.0);

    vec![
        CheckOutcome::new("dirac", "flat_symmetry", rel(a, b), EXACT),
        CheckOutcome::new("dirac", "conformal_symmetry", rel(c, d), EXACT),
        CheckOutcome::new("dirac", "untwisted_action_vanishes", untwisted.abs() / scale, EXACT),
        // Passing means the spinor Dirac action is visibly nonzero.
        CheckOutcome::new("dirac", "spinor_action_nonzero", if twisted.abs() > 1e-8 { 0.0 } else { 1.0 }, 0.0),
    ]
}

fn breakdown_defects(suite: &str, what: &str, a: &ActionBreakdown, b: &ActionBreakdown) -> Vec<CheckOutcome> {
    let names = ["I_dirichlet", "II_dirac", "III_gravitino", "IV_qchi", "V_curvature"];
    let mut out: Vec<CheckOutcome> = names
        .iter()
        .zip(a.terms().iter().zip(b.terms()))
        .map(|(n, (x, y))| CheckOutcome::new(suite, &format!("{what}_{n}"), rel(*x, y), EXACT))
        .collect();
    out.push(CheckOutcome::new(suite, &format!("{what}_total"), rel(a.total, b.total), EXACT));
    out
}

/// `χ → χ + σ(s)`: the shift lies in `ker Q`.
pub fn super_weyl_shift(chi: &GravitinoField, s: &[Spinor]) -> GravitinoField {
    let data = chi.data().iter().zip(s).map(|(c, v)| *c + sigma_lift(*v)).collect();
    GravitinoField::new(data).expect("finite shift")
}

/// Conformal change `g → e^{2u}δ` in the flat identification: `ψ → e^{-u}ψ`,
/// `χ → e^{-u}χ`.
pub fn conformal_rescale(
    psi: &VectorSpinorField,
    chi: &GravitinoField,
    u: &ConformalMetric,
) -> (VectorSpinorField, GravitinoField) {
    let e = u.exp(-1.0);
    (psi.scaled_by(&e), chi.scaled_by(&e))
}

/// Super-Weyl and `ℤ₂` invariance of every action term.
#[allow(clippy::too_many_arguments)]
pub fn symmetry_suite(
    phi: &MapField,
    psi: &VectorSpinorField,
    chi: &GravitinoField,
    u: &ConformalMetric,
    shift: &[Spinor],
    m: &TargetManifold,
    grid: &Grid,
) -> Result<Vec<CheckOutcome>> {
    let base = total_action(phi, psi, u, chi, m, grid)?;
    let weyl = total_action(phi, psi, u, &super_weyl_shift(chi, shift), m, grid)?;
    let flip = total_action(phi, &psi.scaled(-1.0), u, &chi.scaled(-1.0), m, grid)?;
    let mut out = breakdown_defects("symmetry", "super_weyl", &base, &weyl);
    out.extend(breakdown_defects("symmetry", "z2", &base, &flip));
    Ok(out)
}

/// `|A(φ, e^{-u}ψ; e^{2u}δ, e^{-u}χ) - A(φ, ψ; δ, χ)|` relative to `max(1, |A|)`.
pub fn conformal_defect(
    phi: &MapField,
    psi: &VectorSpinorField,
    chi: &GravitinoField,
    u: &ConformalMetric,
    m: &TargetManifold,
    grid: &Grid,
) -> Result<f64> {
    let flat = ConformalMetric::flat(grid);
    let a = total_action(phi, psi, &flat, chi, m, grid)?;
    let (p2, c2) = conformal_rescale(psi, chi, u);
    let b = total_action(phi, &p2, u, &c2, m, grid)?;
    Ok(rel(a.total, b.total))
}

/// Antisymmetry of `ω, F, T` and the potential form of the map equation.
pub fn antisymmetry_suite(
    phi: &MapField,
    psi: &VectorSpinorField,
    chi: &GravitinoField,
    u: &ConformalMetric,
    m: &TargetManifold,
    grid: &Grid,
) -> Result<Vec<CheckOutcome>> {
    let pots = potentials(phi, psi, chi, u, m, grid)?;
    let direct = residual_phi(phi, psi, chi, u, m, grid)?;
    let assembled = assemble_map_equation(&pots, phi, psi, chi, u, m, grid)?;
    let scale = direct.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    let gap = direct.iter().zip(&assembled).fold(0.0_f64, |a, (x, y)| a.max((x - y).abs()));
    Ok(vec![
        CheckOutcome::new("antisymmetry", "potentials_antisymmetric", pots.antisymmetry_defect(), EXACT),
        CheckOutcome::new("antisymmetry", "assembly_matches_residual", gap / scale, 1e-10),
    ])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

impl CheckReport {
    pub fn new(seed: u64, checks: Vec<CheckOutcome>) -> CheckReport {
        CheckReport { seed, passed: checks.iter().all(|c| c.passed), checks }
    }
}
