//! The discrete action and the curvature contractions `SR(ψ)`, `S∇R(ψ)`.
//!
//! With `w = h₁h₂`, `M^{ab} = ⟨ψ^a, ψ^b⟩` and site quadrature:
//!
//! ```text
//! I   =  Σ |∂_α φ|² w
//! II  =  Σ e^{3u} ⟨ψ, Dψ⟩ w
//! III =  2 Σ e^{2u} ⟨e_α·e_β·χ^α, ψ^b⟩ ∂_β φ^b w
//! IV  = -Σ e^{4u} ⟨χ, Qχ⟩ |ψ|² w
//! V   = -(1/6) Σ e^{4u} R(ψ) w
//! ```
//!
//! `R(ψ)`, `SR(ψ)` and `S∇R(ψ)` here use the flat spinor metric; under `g` they
//! pick up `e^{2u}`, `e^{u}` and `e^{2u}` respectively.

use crate::clifford::{gamma, q_norm_sq, Spinor, SpinorTangent};
use crate::error::{Error, Result};
use crate::fields::{
    tangent_derivatives, twisted_dirac_with, ConformalMetric, GravitinoField, MapField,
    VectorSpinorField,
};
use crate::geometry::{Grid, LocalFrame, TargetManifold};
use serde::{Deserialize, Serialize};

/// The five summands of the action and their total.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ActionBreakdown {
    #[serde(rename = "I_dirichlet")]
    pub dirichlet: f64,
    #[serde(rename = "II_dirac")]
    pub dirac: f64,
    #[serde(rename = "III_gravitino")]
    pub gravitino: f64,
    #[serde(rename = "IV_qchi")]
    pub qchi: f64,
    #[serde(rename = "V_curvature")]
    pub curvature: f64,
    pub total: f64,
}

impl ActionBreakdown {
    pub fn new(dirichlet: f64, dirac: f64, gravitino: f64, qchi: f64, curvature: f64) -> Self {
        let total = dirichlet + dirac + gravitino + qchi + curvature;
        ActionBreakdown { dirichlet, dirac, gravitino, qchi, curvature, total }
    }

    pub fn terms(&self) -> [f64; 5] {
        [self.dirichlet, self.dirac, self.gravitino, self.qchi, self.curvature]
    }
}

/// Gram matrix `M^{ab} = ⟨ψ^a, ψ^b⟩`.
pub(crate) fn gram(psi: &[Spinor]) -> Vec<f64> {
    let k = psi.len();
    let mut m = vec![0.0; k * k];
    for a in 0..k {
        for b in a..k {
            let v = psi[a].dot(&psi[b]);
            m[a * k + b] = v;
            m[b * k + a] = v;
        }
    }
    m
}

fn mat_mul(a: &[f64], b: &[f64], k: usize) -> Vec<f64> {
    let mut out = vec![0.0; k * k];
    for i in 0..k {
        for l in 0..k {
            let v = a[i * k + l];
            if v == 0.0 {
                continue;
            }
            for j in 0..k {
                out[i * k + j] += v * b[l * k + j];
            }
        }
    }
    out
}

fn frob(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `R(ψ) = Σ_l [⟨S_l, M⟩² - tr(S_l M S_l M)]` at one site.
pub fn curvature_contraction(psi: &[Spinor], fr: &LocalFrame) -> f64 {
    let k = fr.k;
    let m = gram(psi);
    let mut r = 0.0;
    for l in 0..fr.codim {
        let s = fr.shape(l);
        let sm = mat_mul(s, &m, k);
        let c = frob(s, &m);
        let mut tr = 0.0;
        for i in 0..k {
            for j in 0..k {
                tr += sm[i * k + j] * sm[j * k + i];
            }
        }
        r += c * c - tr;
    }
    r
}

/// `SR(ψ)` at one site, so that `Σ_a ⟨SR^a, ψ^a⟩ = R(ψ)`.
pub(crate) fn sr_site(psi: &[Spinor], fr: &LocalFrame) -> Vec<Spinor> {
    let k = fr.k;
    let m = gram(psi);
    let mut coef = vec![0.0; k * k];
    for l in 0..fr.codim {
        let s = fr.shape(l);
        let c = frob(s, &m);
        let sms = mat_mul(&mat_mul(s, &m, k), s, k);
        for i in 0..k * k {
            coef[i] += c * s[i] - sms[i];
        }
    }
    (0..k)
        .map(|d| {
            let mut acc = Spinor::ZERO;
            for b in 0..k {
                acc += psi[b] * coef[d * k + b];
            }
            acc
        })
        .collect()
}

/// `S∇R(ψ)^a = (∇_{P e_a} R)(ψ)` at one site, given the `∇A` tensor.
pub(crate) fn snr_site(psi: &[Spinor], fr: &LocalFrame, nabla: &[f64]) -> Vec<f64> {
    let k = fr.k;
    let m = gram(psi);
    // A_{ik} = -Σ_l S_l^{ik} ν_l
    let mut amat = vec![0.0; k * k * k];
    for l in 0..fr.codim {
        let s = fr.shape(l);
        let nu = fr.normal(l);
        for ik in 0..k * k {
            for n in 0..k {
                amat[ik * k + n] -= s[ik] * nu[n];
            }
        }
    }
    let mut abar = vec![0.0; k];
    for ik in 0..k * k {
        for n in 0..k {
            abar[n] += amat[ik * k + n] * m[ik];
        }
    }
    let mut out = vec![0.0; k];
    for (a, o) in out.iter_mut().enumerate() {
        let b = &nabla[a * k * k * k..(a + 1) * k * k * k];
        let mut bm = vec![0.0; k];
        for ik in 0..k * k {
            for n in 0..k {
                bm[n] += b[ik * k + n] * m[ik];
            }
        }
        let first: f64 = bm.iter().zip(&abar).map(|(x, y)| x * y).sum();
        let mut second = 0.0;
        for i in 0..k {
            for kk in 0..k {
                let mik = m[i * k + kk];
                if mik == 0.0 {
                    continue;
                }
                for j in 0..k {
                    for l in 0..k {
                        let mjl = m[j * k + l];
                        if mjl == 0.0 {
                            continue;
                        }
                        let bkj = &b[(kk * k + j) * k..(kk * k + j + 1) * k];
                        let ali = &amat[(l * k + i) * k..(l * k + i + 1) * k];
                        let d: f64 = bkj.iter().zip(ali).map(|(x, y)| x * y).sum();
                        second += d * mik * mjl;
                    }
                }
            }
        }
        *o = 2.0 * (first - second);
    }
    out
}

/// Validated inputs with per-site frames computed once.
pub(crate) struct Prepared {
    pub frames: Vec<LocalFrame>,
    pub x: [Vec<f64>; 2],
}

pub(crate) fn prepare(
    phi: &MapField,
    psi: &VectorSpinorField,
    chi: Option<&GravitinoField>,
    u: &ConformalMetric,
    m: &TargetManifold,
    grid: &Grid,
) -> Result<Prepared> {
    let frames = phi.frames(grid, m)?;
    psi.check_tangent(&frames)?;
    if u.sites() != grid.len() {
        return Err(Error::DimensionMismatch(format!(
            "conformal factor has {} sites, grid has {}",
            u.sites(),
            grid.len()
        )));
    }
    if let Some(chi) = chi {
        if chi.sites() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "gravitino has {} sites, grid has {}",
                chi.sites(),
                grid.len()
            )));
        }
    }
    let x = tangent_derivatives(phi, &frames, u, grid);
    Ok(Prepared { frames, x })
}

/// `Σ |∂_α φ|² h₁h₂`; independent of the conformal factor.
pub fn term_dirichlet(phi: &MapField, grid: &Grid) -> f64 {
    let d0 = phi.derivative(grid, 0);
    let d1 = phi.derivative(grid, 1);
    let k = phi.k();
    let mut sum = 0.0;
    for site in 0..phi.sites() {
        let mut s = 0.0;
        for c in site * k..(site + 1) * k {
            s += d0[c] * d0[c] + d1[c] * d1[c];
        }
        sum += s;
    }
    sum * grid.cell_area()
}

fn dirac_with(
    psi: &VectorSpinorField,
    prep: &Prepared,
    u: &ConformalMetric,
    grid: &Grid,
) -> f64 {
    if psi.is_zero() {
        return 0.0;
    }
    let d = twisted_dirac_with(psi, &prep.frames, &prep.x, u, grid);
    let e3 = u.exp(3.0);
    let mut sum = 0.0;
    for site in 0..psi.sites() {
        let mut s = 0.0;
        for (a, b) in psi.at(site).iter().zip(d.at(site)) {
            s += a.dot(b);
        }
        sum += e3[site] * s;
    }
    sum * grid.cell_area()
}

pub fn term_dirac(
    psi: &VectorSpinorField,
    phi: &MapField,
    u: &ConformalMetric,
    m: &TargetManifold,
    grid: &Grid,
) -> Result<f64> {
    let prep = prepare(phi, psi, None, u, m, grid)?;
    Ok(dirac_with(psi, &prep, u, grid))
}

/// `Σ_α e_α·e_β·χ^α` for each `β`.
pub(crate) fn gamma_gamma_chi(chi: &SpinorTangent) -> [Spinor; 2] {
    let mut out = [Spinor::ZERO; 2];
    for (beta, o) in out.iter_mut().enumerate() {
        for alpha in 0..2 {
            *o += gamma(alpha, gamma(beta, chi.0[alpha]));
        }
    }
    out
}

pub fn term_gravitino(
    phi: &MapField,
    psi: &VectorSpinorField,
    chi: &GravitinoField,
    u: &ConformalMetric,
    grid: &Grid,
) -> f64 {
    if chi.is_zero() || psi.is_zero() {
        return 0.0;
    }
    let k = phi.k();
    let d = [phi.derivative(grid, 0), phi.derivative(grid, 1)];
    let e2 = u.exp(2.0);
    let mut sum = 0.0;
    for site in 0..phi.sites() {
        let gg = gamma_gamma_chi(&chi.data()[site]);
        let ps = psi.at(site);
        let mut s = 0.0;
        for (beta, g) in gg.iter().enumerate() {
            for b in 0..k {
                s += g.dot(&ps[b]) * d[beta][site * k + b];
            }
        }
        sum += e2[site] * 2.0 * s;
    }
    sum * grid.cell_area()
}

pub fn term_qchi(chi: &GravitinoField, psi: &VectorSpinorField, u: &ConformalMetric, grid: &Grid) -> f64 {
    if chi.is_zero() || psi.is_zero() {
        return 0.0;
    }
    let e4 = u.exp(4.0);
    let mut sum = 0.0;
    for site in 0..psi.sites() {
        let q = q_norm_sq(&chi.data()[site]);
        let p: f64 = psi.at(site).iter().map(|s| s.norm_sq()).sum();
        sum += e4[site] * q * p;
    }
    -sum * grid.cell_area()
}

fn curvature_with(psi: &VectorSpinorField, prep: &Prepared, u: &ConformalMetric, grid: &Grid) -> f64 {
    if psi.is_zero() {
        return 0.0;
    }
    let e4 = u.exp(4.0);
    let mut sum = 0.0;
    for (site, fr) in prep.frames.iter().enumerate() {
        sum += e4[site] * curvature_contraction(psi.at(site), fr);
    }
    -sum * grid.cell_area() / 6.0
}

pub fn term_curvature(
    psi: &VectorSpinorField,
    phi: &MapField,
    u: &ConformalMetric,
    m: &TargetManifold,
    grid: &Grid,
) -> Result<f64> {
    let prep = prepare(phi, psi, None, u, m, grid)?;
    Ok(curvature_with(psi, &prep, u, grid))
}

/// `SR(ψ)` in the flat spinor metric.
pub fn sr_of(
    psi: &VectorSpinorField,
    phi: &MapField,
    m: &TargetManifold,
    grid: &Grid,
) -> Result<VectorSpinorField> {
    let frames = phi.frames(grid, m)?;
    psi.check_tangent(&frames)?;
    let data = frames.iter().enumerate().flat_map(|(s, fr)| sr_site(psi.at(s), fr)).collect();
    VectorSpinorField::new(psi.k(), data)
}

/// `S∇R(ψ)` in the flat spinor metric, `K` values per site.
pub fn snr_of(
    psi: &VectorSpinorField,
    phi: &MapField,
    m: &TargetManifold,
    grid: &Grid,
) -> Result<Vec<f64>> {
    let frames = phi.frames(grid, m)?;
    psi.check_tangent(&frames)?;
    Ok(snr_with(psi, &frames, m))
}

pub(crate) fn snr_with(psi: &VectorSpinorField, frames: &[LocalFrame], m: &TargetManifold) -> Vec<f64> {
    let k = psi.k();
    let mut out = vec![0.0; psi.sites() * k];
    if m.has_parallel_second_fundamental_form() || psi.is_zero() {
        return out;
    }
    for (site, fr) in frames.iter().enumerate() {
        let ps = psi.at(site);
        if ps.iter().all(|s| *s == Spinor::ZERO) {
            continue;
        }
        let nabla = m.nabla_tensor_unchecked(&fr.point);
        out[site * k..(site + 1) * k].copy_from_slice(&snr_site(ps, fr, &nabla));
    }
    out
}

/// All five terms.
pub fn total_action(
    phi: &MapField,
    psi: &VectorSpinorField,
    u: &ConformalMetric,
    chi: &GravitinoField,
    m: &TargetManifold,
    grid: &Grid,
) -> Result<ActionBreakdown> {
    let prep = prepare(phi, psi, Some(chi), u, m, grid)?;
    Ok(ActionBreakdown::new(
        term_dirichlet(phi, grid),
        dirac_with(psi, &prep, u, grid),
        term_gravitino(phi, psi, chi, u, grid),
        term_qchi(chi, psi, u, grid),
        curvature_with(psi, &prep, u, grid),
    ))
}
