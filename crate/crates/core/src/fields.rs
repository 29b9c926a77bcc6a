//! Grid fields `φ`, `ψ`, `χ`, the conformal factor, and the Dirac operators.
//!
//! Fields are stored in the flat identification. For `g = e^{2u}δ` the frame is
//! `e_α = e^{-u}∂_α`, the spinor metric is `e^{u}⟨·,·⟩` and the volume element is
//! `e^{2u} h₁h₂`. In this identification the Dirac operator of `g` is
//!
//! ```text
//! D_g s = e^{-2u} D_flat(e^{u} s)
//! ```
//!
//! which is symmetric for the pairing `Σ e^{3u}⟨s, D_g t⟩ h₁h₂` and obeys
//! `D_g(e^{-u}s) = e^{-2u} D_flat s` exactly.

use crate::clifford::{
    clifford_mul, gamma, gamma_plus, p_project, q_project, Spinor, SpinorTangent,
};
use crate::error::{Error, Result};
use crate::geometry::{Grid, LocalFrame, TargetManifold};

/// Map into the target, stored extrinsically: `K` reals per site.
#[derive(Clone, Debug, PartialEq)]
pub struct MapField {
    k: usize,
    data: Vec<f64>,
}

impl MapField {
    pub fn new(k: usize, data: Vec<f64>) -> Result<MapField> {
        if k == 0 || !data.len().is_multiple_of(k) {
            return Err(Error::DimensionMismatch(format!(
                "{} values cannot be split into points of R^{k}",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("map field".into()));
        }
        Ok(MapField { k, data })
    }

    /// Builds a field from a per-site closure, projecting every value onto the target.
    pub fn from_fn(grid: &Grid, m: &TargetManifold, f: impl Fn(f64, f64) -> Vec<f64>) -> MapField {
        let mut data = Vec::with_capacity(grid.len() * m.ambient_dim());
        for s in 0..grid.len() {
            let [x, y] = grid.position(s);
            data.extend(m.project(&f(x, y)));
        }
        MapField { k: m.ambient_dim(), data }
    }

    pub fn constant(grid: &Grid, p: &[f64]) -> MapField {
        MapField { k: p.len(), data: p.repeat(grid.len()) }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sites(&self) -> usize {
        self.data.len() / self.k
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn point(&self, site: usize) -> &[f64] {
        &self.data[site * self.k..(site + 1) * self.k]
    }

    pub fn point_mut(&mut self, site: usize) -> &mut [f64] {
        &mut self.data[site * self.k..(site + 1) * self.k]
    }

    /// Checks grid size, ambient dimension and the on-manifold tolerance.
    pub fn validate(&self, grid: &Grid, m: &TargetManifold) -> Result<()> {
        if self.k != m.ambient_dim() || self.sites() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "map field has {} sites in R^{}, expected {} sites in R^{}",
                self.sites(),
                self.k,
                grid.len(),
                m.ambient_dim()
            )));
        }
        for s in 0..self.sites() {
            m.check_on_manifold(self.point(s), s)?;
        }
        Ok(())
    }

    /// Extrinsic frames at every site after validation.
    pub fn frames(&self, grid: &Grid, m: &TargetManifold) -> Result<Vec<LocalFrame>> {
        self.validate(grid, m)?;
        Ok((0..self.sites()).map(|s| m.frame_unchecked(self.point(s))).collect())
    }

    /// `∂_α φ` with centered differences, `K` values per site.
    pub fn derivative(&self, grid: &Grid, alpha: usize) -> Vec<f64> {
        grid.diff_strided(&self.data, self.k, alpha)
    }
}

/// `ψ = ψ^a ⊗ ∂/∂u^a`: `K` spinors per site, tangent to the target along `φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorSpinorField {
    k: usize,
    data: Vec<Spinor>,
}

impl VectorSpinorField {
    pub fn new(k: usize, data: Vec<Spinor>) -> Result<VectorSpinorField> {
        if k == 0 || !data.len().is_multiple_of(k) {
            return Err(Error::DimensionMismatch(format!(
                "{} spinors cannot be split into groups of {k}",
                data.len()
            )));
        }
        if data.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite("vector-spinor field".into()));
        }
        Ok(VectorSpinorField { k, data })
    }

    pub fn zeros(grid: &Grid, k: usize) -> VectorSpinorField {
        VectorSpinorField { k, data: vec![Spinor::ZERO; grid.len() * k] }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sites(&self) -> usize {
        self.data.len() / self.k
    }

    pub fn data(&self) -> &[Spinor] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Spinor] {
        &mut self.data
    }

    pub fn at(&self, site: usize) -> &[Spinor] {
        &self.data[site * self.k..(site + 1) * self.k]
    }

    pub fn at_mut(&mut self, site: usize) -> &mut [Spinor] {
        &mut self.data[site * self.k..(site + 1) * self.k]
    }

    pub fn scaled(&self, t: f64) -> VectorSpinorField {
        VectorSpinorField { k: self.k, data: self.data.iter().map(|s| *s * t).collect() }
    }

    /// Multiplies the spinors at each site by a site-dependent factor.
    pub fn scaled_by(&self, f: &[f64]) -> VectorSpinorField {
        let k = self.k;
        let data = self.data.iter().enumerate().map(|(i, s)| *s * f[i / k]).collect();
        VectorSpinorField { k, data }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|s| *s == Spinor::ZERO)
    }

    /// Checks the tangency tolerance `|normal part| ≤ 1e-9 max(1, |ψ(x)|)`.
    pub fn check_tangent(&self, frames: &[LocalFrame]) -> Result<()> {
        if frames.len() != self.sites() {
            return Err(Error::DimensionMismatch(format!(
                "spinor field has {} sites, map has {}",
                self.sites(),
                frames.len()
            )));
        }
        for (site, fr) in frames.iter().enumerate() {
            if fr.k != self.k {
                return Err(Error::DimensionMismatch(format!(
                    "spinor field has K={}, target has K={}",
                    self.k, fr.k
                )));
            }
            let psi = self.at(site);
            let size = psi.iter().map(|s| s.norm_sq()).sum::<f64>().sqrt();
            let mut worst: f64 = 0.0;
            for l in 0..fr.codim {
                let c = normal_component(psi, fr.normal(l));
                worst = worst.max(c.norm_sq().sqrt());
            }
            if !(worst <= 1e-9 * size.max(1.0)) {
                return Err(Error::TangencyViolation { site, normal: worst });
            }
        }
        Ok(())
    }
}

/// `χ = χ^α ⊗ e_α`, one [`SpinorTangent`] per site.
#[derive(Clone, Debug, PartialEq)]
pub struct GravitinoField {
    data: Vec<SpinorTangent>,
}

impl GravitinoField {
    pub fn new(data: Vec<SpinorTangent>) -> Result<GravitinoField> {
        if data.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("gravitino field".into()));
        }
        Ok(GravitinoField { data })
    }

    pub fn zeros(grid: &Grid) -> GravitinoField {
        GravitinoField { data: vec![SpinorTangent::ZERO; grid.len()] }
    }

    pub fn data(&self) -> &[SpinorTangent] {
        &self.data
    }

    pub fn sites(&self) -> usize {
        self.data.len()
    }

    pub fn scaled(&self, t: f64) -> GravitinoField {
        GravitinoField { data: self.data.iter().map(|c| *c * t).collect() }
    }

    pub fn scaled_by(&self, f: &[f64]) -> GravitinoField {
        GravitinoField { data: self.data.iter().zip(f).map(|(c, t)| *c * *t).collect() }
    }

    pub fn add(&self, other: &GravitinoField) -> GravitinoField {
        GravitinoField { data: self.data.iter().zip(&other.data).map(|(a, b)| *a + *b).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| *c == SpinorTangent::ZERO)
    }
}

/// Conformal factor `u` of `g = e^{2u}(dx² + dy²)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalMetric {
    u: Vec<f64>,
}

impl ConformalMetric {
    pub fn new(u: Vec<f64>) -> Result<ConformalMetric> {
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("conformal factor".into()));
        }
        Ok(ConformalMetric { u })
    }

    pub fn flat(grid: &Grid) -> ConformalMetric {
        ConformalMetric { u: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: &Grid, c: f64) -> ConformalMetric {
        ConformalMetric { u: vec![c; grid.len()] }
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn sites(&self) -> usize {
        self.u.len()
    }

    pub fn is_flat(&self) -> bool {
        self.u.iter().all(|v| *v == 0.0)
    }

    /// `e^{t u}` per site.
    pub fn exp(&self, t: f64) -> Vec<f64> {
        self.u.iter().map(|v| (t * v).exp()).collect()
    }
}

/// `Σ_b ψ^b ν^b`.
pub(crate) fn normal_component(psi: &[Spinor], nu: &[f64]) -> Spinor {
    let mut c = Spinor::ZERO;
    for (s, n) in psi.iter().zip(nu) {
        c += *s * *n;
    }
    c
}

pub(crate) fn project_spinors(psi: &mut [Spinor], fr: &LocalFrame) {
    for l in 0..fr.codim {
        let nu = fr.normal(l);
        let c = normal_component(psi, nu);
        for (s, n) in psi.iter_mut().zip(nu) {
            *s -= c * *n;
        }
    }
}

/// Flat Dirac operator `γ(e₁)∂₁ + γ(e₂)∂₂` on a field with `stride` spinors per site.
pub fn dirac_flat_strided(s: &[Spinor], stride: usize, grid: &Grid) -> Vec<Spinor> {
    let d0 = grid.diff_strided(s, stride, 0);
    let d1 = grid.diff_strided(s, stride, 1);
    d0.into_iter().zip(d1).map(|(a, b)| gamma(0, a) + gamma(1, b)).collect()
}

/// Flat Dirac operator on a spinor field.
pub fn dirac_flat(s: &[Spinor], grid: &Grid) -> Vec<Spinor> {
    dirac_flat_strided(s, 1, grid)
}

/// The untwisted operator `γ⁺(e₁)∂₁ + γ⁺(e₂)∂₂` on `Σ`-valued fields.
pub fn dirac_untwisted(s: &[[f64; 2]], grid: &Grid) -> Vec<[f64; 2]> {
    let c0: Vec<f64> = s.iter().map(|v| v[0]).collect();
    let c1: Vec<f64> = s.iter().map(|v| v[1]).collect();
    let (a0, a1) = (grid.diff(&c0, 0), grid.diff(&c1, 0));
    let (b0, b1) = (grid.diff(&c0, 1), grid.diff(&c1, 1));
    (0..s.len())
        .map(|i| {
            let x = gamma_plus([1.0, 0.0], [a0[i], a1[i]]);
            let y = gamma_plus([0.0, 1.0], [b0[i], b1[i]]);
            [x[0] + y[0], x[1] + y[1]]
        })
        .collect()
}

/// `D_g s = e^{-2u} D_flat(e^u s)` on a field with `stride` spinors per site.
pub fn dirac_conformal_strided(
    s: &[Spinor],
    stride: usize,
    u: &ConformalMetric,
    grid: &Grid,
) -> Vec<Spinor> {
    if u.is_flat() {
        return dirac_flat_strided(s, stride, grid);
    }
    let eu = u.exp(1.0);
    let lifted: Vec<Spinor> = s.iter().enumerate().map(|(i, v)| *v * eu[i / stride]).collect();
    let mut out = dirac_flat_strided(&lifted, stride, grid);
    for (i, v) in out.iter_mut().enumerate() {
        let e = eu[i / stride];
        *v = *v * (1.0 / (e * e));
    }
    out
}

/// Dirac operator of `g = e^{2u}δ` on a spinor field.
pub fn dirac_conformal(s: &[Spinor], u: &ConformalMetric, grid: &Grid) -> Vec<Spinor> {
    dirac_conformal_strided(s, 1, u, grid)
}

/// Tangent frame derivatives `X_α = e^{-u} P_T ∂_α φ`, `K` values per site each.
pub(crate) fn tangent_derivatives(
    phi: &MapField,
    frames: &[LocalFrame],
    u: &ConformalMetric,
    grid: &Grid,
) -> [Vec<f64>; 2] {
    let k = phi.k();
    let emu = u.exp(-1.0);
    let mut out = [phi.derivative(grid, 0), phi.derivative(grid, 1)];
    for x in out.iter_mut() {
        for (site, fr) in frames.iter().enumerate() {
            let v = &mut x[site * k..(site + 1) * k];
            fr.tangent_project_in_place(v);
            for c in v.iter_mut() {
                *c *= emu[site];
            }
        }
    }
    out
}

pub(crate) fn twisted_dirac_with(
    psi: &VectorSpinorField,
    frames: &[LocalFrame],
    x: &[Vec<f64>; 2],
    u: &ConformalMetric,
    grid: &Grid,
) -> VectorSpinorField {
    let k = psi.k();
    let mut out = dirac_conformal_strided(psi.data(), k, u, grid);
    for (site, fr) in frames.iter().enumerate() {
        let ps = psi.at(site);
        let o = &mut out[site * k..(site + 1) * k];
        // Subtract 𝒜 = -Σ_{l,b,d} γ(X^d)ψ^b J_l^{bd} ν_l, which is purely normal.
        for l in 0..fr.codim {
            let j = fr.jac(l);
            let mut c = Spinor::ZERO;
            for d in 0..k {
                let xd = [x[0][site * k + d], x[1][site * k + d]];
                if xd == [0.0, 0.0] {
                    continue;
                }
                let mut acc = Spinor::ZERO;
                for b in 0..k {
                    acc += ps[b] * j[b * k + d];
                }
                c += clifford_mul(xd, acc);
            }
            for (s, n) in o.iter_mut().zip(fr.normal(l)) {
                *s += c * *n;
            }
        }
        project_spinors(o, fr);
    }
    VectorSpinorField { k, data: out }
}

/// Dirac operator on spinors along `φ`: tangent part of the componentwise `D_g ψ`.
pub fn twisted_dirac(
    psi: &VectorSpinorField,
    phi: &MapField,
    u: &ConformalMetric,
    m: &TargetManifold,
    grid: &Grid,
) -> Result<VectorSpinorField> {
    let frames = phi.frames(grid, m)?;
    psi.check_tangent(&frames)?;
    let x = tangent_derivatives(phi, &frames, u, grid);
    Ok(twisted_dirac_with(psi, &frames, &x, u, grid))
}

/// Removes the normal components of `ψ` along `φ`.
pub fn tangency_project(
    psi: &VectorSpinorField,
    phi: &MapField,
    m: &TargetManifold,
) -> VectorSpinorField {
    let k = psi.k();
    let mut out = psi.clone();
    for site in 0..psi.sites() {
        let fr = m.frame_unchecked(phi.point(site));
        project_spinors(&mut out.data[site * k..(site + 1) * k], &fr);
    }
    out
}

pub fn field_q_project(chi: &GravitinoField) -> GravitinoField {
    GravitinoField { data: chi.data.iter().map(q_project).collect() }
}

pub fn field_p_project(chi: &GravitinoField) -> GravitinoField {
    GravitinoField { data: chi.data.iter().map(p_project).collect() }
}

/// Weighted pairing `Σ e^{3u}⟨ψ, ξ⟩ h₁h₂` of vector-spinor fields.
pub fn spinor_pairing(
    a: &VectorSpinorField,
    b: &VectorSpinorField,
    u: &ConformalMetric,
    grid: &Grid,
) -> f64 {
    let e3 = u.exp(3.0);
    let mut sum = 0.0;
    for site in 0..a.sites() {
        let mut s = 0.0;
        for (x, y) in a.at(site).iter().zip(b.at(site)) {
            s += x.dot(y);
        }
        sum += e3[site] * s;
    }
    sum * grid.cell_area()
}
