//! Morrey-norm and Riesz-potential diagnostics on the unit disc.
//!
//! The disc grid has nodes `x = -1 + i h`, `h = 2/n`, with `n` even so that the
//! origin is a node; nodes with `|x| < 1` form `U`, each carrying a cell of
//! area `h²`. Balls are open: `B_r(x) = {y : |y - x| < r}`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Sampled unit disc.
#[derive(Clone, Debug)]
pub struct DiscGrid {
    n: usize,
    h: f64,
    points: Vec<[f64; 2]>,
    ij: Vec<(i64, i64)>,
    lookup: Vec<Option<usize>>,
}

impl DiscGrid {
    pub fn new(n: usize) -> Result<DiscGrid> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "disc resolution must be even and at least 4, got {n}"
            )));
        }
        let h = 2.0 / n as f64;
        let mut points = Vec::new();
        let mut ij = Vec::new();
        let mut lookup = vec![None; (n + 1) * (n + 1)];
        for i in 0..=n {
            for j in 0..=n {
                let x = [-1.0 + i as f64 * h, -1.0 + j as f64 * h];
                if x[0] * x[0] + x[1] * x[1] < 1.0 {
                    lookup[i * (n + 1) + j] = Some(points.len());
                    points.push(x);
                    ij.push((i as i64, j as i64));
                }
            }
        }
        Ok(DiscGrid { n, h, points, ij, lookup })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    /// Discrete area of `U`.
    pub fn area(&self) -> f64 {
        self.len() as f64 * self.h * self.h
    }

    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        self.points.iter().map(|p| f(p[0], p[1])).collect()
    }

    fn at(&self, i: i64, j: i64) -> Option<usize> {
        let n = self.n as i64;
        if i < 0 || j < 0 || i > n || j > n {
            return None;
        }
        self.lookup[(i * (n + 1) + j) as usize]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorreyParams {
    pub p: f64,
    pub lambda: f64,
}

/// Dimension of the domain.
pub const DOMAIN_DIM: f64 = 2.0;

impl MorreyParams {
    pub fn new(p: f64, lambda: f64) -> Result<MorreyParams> {
        if !(p >= 1.0 && p.is_finite()) || !(0.0..=DOMAIN_DIM).contains(&lambda) {
            return Err(Error::InvalidParameter(format!(
                "need p >= 1 and 0 <= lambda <= 2, got p={p}, lambda={lambda}"
            )));
        }
        Ok(MorreyParams { p, lambda })
    }
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::EmptyRadii);
    }
    if radii.iter().any(|r| !(*r > 0.0 && *r <= 2.0)) {
        return Err(Error::InvalidParameter("radii must lie in (0, 2]".into()));
    }
    Ok(())
}

/// `max` over grid centres and radii of `(r^{λ-n} Σ_{B_r ∩ U} |f|^p h²)^{1/p}`.
pub fn morrey_norm(grid: &DiscGrid, field: &[f64], params: MorreyParams, radii: &[f64]) -> Result<f64> {
    check_radii(radii)?;
    if field.len() != grid.len() {
        return Err(Error::DimensionMismatch(format!(
            "field has {} samples, disc has {}",
            field.len(),
            grid.len()
        )));
    }
    let fp: Vec<f64> = field.iter().map(|v| v.abs().powf(params.p)).collect();
    let h2 = grid.h * grid.h;
    let mut best: f64 = 0.0;
    for &r in radii {
        let m = (r / grid.h).ceil() as i64;
        let r2 = (r / grid.h) * (r / grid.h);
        let offsets: Vec<(i64, i64)> = (-m..=m)
            .flat_map(|a| (-m..=m).map(move |b| (a, b)))
            .filter(|(a, b)| ((a * a + b * b) as f64) < r2)
            .collect();
        let scale = r.powf(params.lambda - DOMAIN_DIM);
        for &(ci, cj) in &grid.ij {
            let mut s = 0.0;
            for &(a, b) in &offsets {
                if let Some(q) = grid.at(ci + a, cj + b) {
                    s += fp[q];
                }
            }
            best = best.max(scale * s * h2);
        }
    }
    Ok(best.powf(1.0 / params.p))
}

/// Discrete `L^p` norm over `U`.
pub fn lp_norm(grid: &DiscGrid, field: &[f64], p: f64) -> f64 {
    let h2 = grid.h * grid.h;
    (field.iter().map(|v| v.abs().powf(p)).sum::<f64>() * h2).powf(1.0 / p)
}

/// Exact `∫ |y|^{-1} dy` over a square of side `h` centred at the origin.
pub fn self_cell_integral(h: f64) -> f64 {
    4.0 * h * (1.0 + 2.0_f64.sqrt()).ln()
}

/// `I₁f(x) = Σ_y |x - y|^{-1} f(y) h²`, with the self cell integrated exactly.
pub fn riesz_i1(grid: &DiscGrid, field: &[f64]) -> Vec<f64> {
    let h2 = grid.h * grid.h;
    let own = self_cell_integral(grid.h);
    grid.points
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let mut s = 0.0;
            for (j, y) in grid.points.iter().enumerate() {
                if i == j {
                    s += own * field[j];
                } else {
                    let d = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
                    s += field[j] * h2 / d;
                }
            }
            s
        })
        .collect()
}

/// `(r, (r^{λ-n} Σ_{B_r(c) ∩ U} |f|^p h²)^{1/p})` for each radius.
pub fn decay_profile(
    grid: &DiscGrid,
    field: &[f64],
    center: [f64; 2],
    p: f64,
    lambda: f64,
    radii: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let params = MorreyParams::new(p, lambda)?;
    check_radii(radii)?;
    let h2 = grid.h * grid.h;
    Ok(radii
        .iter()
        .map(|&r| {
            let mut s = 0.0;
            for (y, v) in grid.points.iter().zip(field) {
                if (y[0] - center[0]).powi(2) + (y[1] - center[1]).powi(2) < r * r {
                    s += v.abs().powf(params.p);
                }
            }
            (r, (r.powf(params.lambda - DOMAIN_DIM) * s * h2).powf(1.0 / params.p))
        })
        .collect())
}

/// Dyadic radii `r_max 2^{-k}`, `k = 0..count`.
pub fn dyadic_radii(r_max: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| r_max / 2f64.powi(k as i32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_resolution_and_empty_radii() {
        assert!(DiscGrid::new(33).is_err());
        let g = DiscGrid::new(16).unwrap();
        let f = vec![1.0; g.len()];
        let p = MorreyParams::new(2.0, 1.0).unwrap();
        assert!(matches!(morrey_norm(&g, &f, p, &[]), Err(Error::EmptyRadii)));
    }

    #[test]
    fn origin_is_a_node() {
        let g = DiscGrid::new(8).unwrap();
        assert!(g.points().iter().any(|p| p[0] == 0.0 && p[1] == 0.0));
    }
}
