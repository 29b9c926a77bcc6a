//! Seeded constructors for smooth test fields.

use crate::clifford::{Spinor, SpinorTangent};
use crate::fields::{tangency_project, GravitinoField, MapField, VectorSpinorField};
use crate::geometry::{Grid, TargetManifold};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random trigonometric polynomial with modes `|m|, |n| ≤ max_mode`, coefficients
/// damped by `1/(1 + m² + n²)`.
pub fn smooth_scalar(grid: &Grid, rng: &mut SeededRng, max_mode: i32, amplitude: f64) -> Vec<f64> {
    let mut modes = Vec::new();
    for m in -max_mode..=max_mode {
        for n in 0..=max_mode {
            if n == 0 && m < 0 {
                continue;
            }
            let damp = 1.0 / (1.0 + (m * m + n * n) as f64);
            let a = rng.gen_range(-1.0..1.0) * damp;
            let b = if m == 0 && n == 0 { 0.0 } else { rng.gen_range(-1.0..1.0) * damp };
            modes.push((m as f64, n as f64, a, b));
        }
    }
    grid.sample(|x, y| {
        let mut v = 0.0;
        for &(m, n, a, b) in &modes {
            let t = TAU * (m * x + n * y);
            v += a * t.cos() + b * t.sin();
        }
        amplitude * v
    })
}

/// Smooth map: a random base point of `N` moved by a smooth ambient field, then projected.
pub fn random_map(grid: &Grid, m: &TargetManifold, rng: &mut SeededRng, amplitude: f64) -> MapField {
    let k = m.ambient_dim();
    let base: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let base = m.project(&base);
    let comps: Vec<Vec<f64>> = (0..k).map(|_| smooth_scalar(grid, rng, 2, amplitude)).collect();
    let mut data = Vec::with_capacity(grid.len() * k);
    for s in 0..grid.len() {
        let p: Vec<f64> = (0..k).map(|a| base[a] + comps[a][s]).collect();
        data.extend(m.project(&p));
    }
    MapField::new(k, data).expect("finite map")
}

/// Smooth spinor field.
pub fn random_spinors(grid: &Grid, rng: &mut SeededRng, amplitude: f64) -> Vec<Spinor> {
    let comps: Vec<Vec<f64>> = (0..4).map(|_| smooth_scalar(grid, rng, 2, amplitude)).collect();
    (0..grid.len()).map(|s| Spinor([comps[0][s], comps[1][s], comps[2][s], comps[3][s]])).collect()
}

/// Smooth spinor field along `φ`, projected to be tangent.
pub fn random_tangent_spinors(
    grid: &Grid,
    phi: &MapField,
    m: &TargetManifold,
    rng: &mut SeededRng,
    amplitude: f64,
) -> VectorSpinorField {
    let k = phi.k();
    let slots: Vec<Vec<Spinor>> = (0..k).map(|_| random_spinors(grid, rng, amplitude)).collect();
    let mut data = Vec::with_capacity(grid.len() * k);
    for s in 0..grid.len() {
        data.extend((0..k).map(|a| slots[a][s]));
    }
    let raw = VectorSpinorField::new(k, data).expect("finite spinors");
    tangency_project(&raw, phi, m)
}

/// Smooth gravitino.
pub fn random_gravitino(grid: &Grid, rng: &mut SeededRng, amplitude: f64) -> GravitinoField {
    let a = random_spinors(grid, rng, amplitude);
    let b = random_spinors(grid, rng, amplitude);
    GravitinoField::new(a.into_iter().zip(b).map(|(x, y)| SpinorTangent([x, y])).collect())
        .expect("finite gravitino")
}

/// Equator loop `(cos 2πx, sin 2πx, 0)` into the unit two-sphere.
pub fn equator_map(grid: &Grid) -> MapField {
    let data = (0..grid.len())
        .flat_map(|s| {
            let [x, _] = grid.position(s);
            [(TAU * x).cos(), (TAU * x).sin(), 0.0]
        })
        .collect();
    MapField::new(3, data).expect("finite map")
}

/// Equator loop with angle `2πx + δ(x, y)`, `δ` smooth with `max |δ| = amplitude`.
/// The perturbation stays in the equatorial plane.
pub fn perturbed_equator(grid: &Grid, rng: &mut SeededRng, amplitude: f64) -> MapField {
    let d = smooth_scalar(grid, rng, 2, 1.0);
    let peak = d.iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let data = (0..grid.len())
        .flat_map(|s| {
            let [x, _] = grid.position(s);
            let t = TAU * x + amplitude * d[s] / peak;
            [t.cos(), t.sin(), 0.0]
        })
        .collect();
    MapField::new(3, data).expect("finite map")
}
