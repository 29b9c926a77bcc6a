//! Euler–Lagrange residuals in extrinsic form.
//!
//! With `X_α = P_T(e_α φ)`, `G_α^{cb} = ⟨ψ^c, e_α·ψ^b⟩_g`,
//! `V^{a,β} = Σ_α ⟨e_α·e_β·χ^α, ψ^a⟩_g`, `J_l = ∂ν_l` and `S_l` its tangent block:
//!
//! ```text
//! r_φ = Δ_g φ + Σ_{α,l} (X_αᵀ J_l X_α) ν_l - Σ_{α,l} S_l G_α S_l X_α
//!       + (1/12) S∇R(ψ) + div_g V + Σ_{α,l} (V_αᵀ J_l X_α) ν_l
//! r_ψ = P_T[ Dψ - |Qχ|²_g ψ - (1/3) SR(ψ) + (e_β φ)·e_α·e_β·χ^α ]
//! ```
//!
//! The discrete action gradient satisfies `∂A/∂ψ = 2 e^{3u} h₁h₂ r_ψ` exactly and
//! `∂A/∂φ = -2 e^{2u} h₁h₂ P_T r_φ` up to `O(h²)`.

use crate::action::{gamma_gamma_chi, prepare, snr_with, sr_site, total_action, Prepared};
use crate::clifford::{gamma, q_norm_sq, Spinor};
use crate::error::Result;
use crate::fields::{
    dirac_conformal_strided, normal_component, project_spinors, twisted_dirac_with, ConformalMetric, GravitinoField, MapField,
    VectorSpinorField,
};
use crate::geometry::{bilinear, mat_vec, Grid, LocalFrame, TargetManifold};
use serde::{Deserialize, Serialize};

/// `V^{a,β}` with the metric weight of `g`; `K` two-vectors per site.
pub fn v_fields(
    chi: &GravitinoField,
    psi: &VectorSpinorField,
    u: &ConformalMetric,
) -> Vec<[f64; 2]> {
    let k = psi.k();
    let eu = u.exp(1.0);
    let mut out = vec![[0.0; 2]; psi.sites() * k];
    for site in 0..psi.sites() {
        let gg = gamma_gamma_chi(&chi.data()[site]);
        for (a, s) in psi.at(site).iter().enumerate() {
            out[site * k + a] = [eu[site] * gg[0].dot(s), eu[site] * gg[1].dot(s)];
        }
    }
    out
}

/// `G_α^{cb} = e^u ⟨ψ^c, e_α·ψ^b⟩`, antisymmetric in `(c, b)`.
fn spinor_gram_gamma(psi: &[Spinor], alpha: usize, eu: f64) -> Vec<f64> {
    let k = psi.len();
    let gpsi: Vec<Spinor> = psi.iter().map(|s| gamma(alpha, *s)).collect();
    let mut g = vec![0.0; k * k];
    for c in 0..k {
        for b in 0..k {
            g[c * k + b] = eu * psi[c].dot(&gpsi[b]);
        }
    }
    g
}

/// Shared pieces of the map equation.
struct MapParts {
    lap: Vec<f64>,
    div_v: Vec<f64>,
    snr: Vec<f64>,
    v: Vec<[f64; 2]>,
}

fn map_parts(
    phi: &MapField,
    psi: &VectorSpinorField,
    chi: &GravitinoField,
    u: &ConformalMetric,
    m: &TargetManifold,
    grid: &Grid,
    prep: &Prepared,
) -> MapParts {
    let k = phi.k();
    let e2m = u.exp(-2.0);
    let eu = u.exp(1.0);
    let mut lap = grid.wide_laplacian_strided(phi.data(), k);
    for (i, v) in lap.iter_mut().enumerate() {
        *v *= e2m[i / k];
    }
    let v = v_fields(chi, psi, u);
    let mut div_v = vec![0.0; phi.sites() * k];
    for beta in 0..2 {
        let w: Vec<f64> = v.iter().enumerate().map(|(i, x)| eu[i / k] * x[beta]).collect();
        let d = grid.diff_strided(&w, k, beta);
        for (o, x) in div_v.iter_mut().zip(d) {
            *o += x;
        }
    }
    for (i, x) in div_v.iter_mut().enumerate() {
        *x *= e2m[i / k];
    }
    let e2 = u.exp(2.0);
    let mut snr = snr_with(psi, &prep.frames, m);
    for (i, x) in snr.iter_mut().enumerate() {
        *x *= e2[i / k] / 12.0;
    }
    MapParts { lap, div_v, snr, v }
}

fn v_alpha(v: &[[f64; 2]], site: usize, k: usize, alpha: usize) -> Vec<f64> {
    (0..k).map(|b| v[site * k + b][alpha]).collect()
}

fn x_alpha(x: &[Vec<f64>; 2], site: usize, k: usize, alpha: usize) -> &[f64] {
    &x[alpha][site * k..(site + 1) * k]
}

fn residual_phi_with(
    phi: &MapField,
    psi: &VectorSpinorField,
    chi: &GravitinoField,
    u: &ConformalMetric,
    m: &TargetManifold,
    grid: &Grid,
    prep: &Prepared,
) -> Vec<f64> {
    let k = phi.k();
    let parts = map_parts(phi, psi, chi, u, m, grid, prep);
    let eu = u.exp(1.0);
    let mut out = vec![0.0; phi.sites() * k];
    for (site, fr) in prep.frames.iter().enumerate() {
        let mut r: Vec<f64> = (0..k)
            .map(|a| {
                let i = site * k + a;
                parts.lap[i] + parts.snr[i] + parts.div_v[i]
            })
            .collect();
        let ps = psi.at(site);
        let has_psi = ps.iter().any(|s| *s != Spinor::ZERO);
        for alpha in 0..2 {
            let xa = x_alpha(&prep.x, site, k, alpha);
            let va = v_alpha(&parts.v, site, k, alpha);
            let g = if has_psi { Some(spinor_gram_gamma(ps, alpha, eu[site])) } else { None };
            for l in 0..fr.codim {
                let j = fr.jac(l);
                let c = bilinear(j, xa, xa, k) + bilinear(j, &va, xa, k);
                for (o, n) in r.iter_mut().zip(fr.normal(l)) {
                    *o += c * n;
                }
                if let Some(g) = &g {
                    let s = fr.shape(l);
                    let t = mat_vec(s, &mat_vec(g, &mat_vec(s, xa, k), k), k);
                    for (o, x) in r.iter_mut().zip(t) {
                        *o -= x;
                    }
                }
            }
        }
        out[site * k..(site + 1) * k].copy_from_slice(&r);
    }
    out
}

/// Map-equation residual (ambient, not tangent-projected), `K` values per site.
pub fn residual_phi(
    phi: &MapField,
    psi: &VectorSpinorField,
    chi: &GravitinoField,
    u: &ConformalMetric,
    m: &TargetManifold,
    grid: &Grid,
) -> Result<Vec<f64>> {
    let prep = prepare(phi, psi, Some(chi), u, m, grid)?;
    Ok(residual_phi_with(phi, psi, chi, u, m, grid, &prep))
}

/// Exact gradient form of the map residual: `∂A/∂φ = -2 e^{2u} h₁h₂ P_T r`.
///
/// Differs from [`residual_phi`] in two places. The spinor coupling is taken
/// from the discrete normal part `N_l = ν_l·Dψ` of the componentwise Dirac
/// operator, `+e^u Σ_{l,b} J_l^{ba} ⟨ψ^b, N_l⟩`, instead of its continuum
/// value through `∇φ`. And the term `Σ_{β,l} (ν_l·e_β φ) J_lᵀ V_β`, which
/// vanishes in the continuum, is kept. Both differences are `O(h²)`.
pub fn residual_phi_discrete(
    phi: &MapField,
    psi: &VectorSpinorField,
    chi: &GravitinoField,
    u: &ConformalMetric,
    m: &TargetManifold,
    grid: &Grid,
) -> Result<Vec<f64>> {
    let prep = prepare(phi, psi, Some(chi), u, m, grid)?;
    let k = phi.k();
    let parts = map_parts(phi, psi, chi, u, m, grid, &prep);
    let eu = u.exp(1.0);
    let dpsi = dirac_conformal_strided(psi.data(), k, u, grid);
    let d = [phi.derivative(grid, 0), phi.derivative(grid, 1)];
    let mut out = vec![0.0; phi.sites() * k];
    for (site, fr) in prep.frames.iter().enumerate() {
        let r = &mut out[site * k..(site + 1) * k];
        for a in 0..k {
            let i = site * k + a;
            r[a] = parts.lap[i] + parts.snr[i] + parts.div_v[i];
        }
        let ps = psi.at(site);
        let dp = &dpsi[site * k..(site + 1) * k];
        for l in 0..fr.codim {
            let j = fr.jac(l);
            let nu = fr.normal(l);
            let n_l = normal_component(dp, nu);
            let pn: Vec<f64> = ps.iter().map(|s| eu[site] * s.dot(&n_l)).collect();
            for alpha in 0..2 {
                let xa = x_alpha(&prep.x, site, k, alpha);
                let va = v_alpha(&parts.v, site, k, alpha);
                let c = bilinear(j, xa, xa, k) + bilinear(j, &va, xa, k);
                let nd: f64 = (0..k).map(|b| nu[b] * d[alpha][site * k + b]).sum::<f64>() / eu[site];
                for a in 0..k {
                    let jtv: f64 = (0..k).map(|c| j[c * k + a] * va[c]).sum();
                    r[a] += c * nu[a] + nd * jtv;
                }
            }
            for a in 0..k {
                r[a] += (0..k).map(|b| j[b * k + a] * pn[b]).sum::<f64>();
            }
        }
    }
    Ok(out)
}

fn residual_psi_with(
    phi: &MapField,
    psi: &VectorSpinorField,
    chi: &GravitinoField,
    u: &ConformalMetric,
    grid: &Grid,
    prep: &Prepared,
) -> VectorSpinorField {
    let k = phi.k();
    let mut out = twisted_dirac_with(psi, &prep.frames, &prep.x, u, grid);
    let eu = u.exp(1.0);
    let d = [phi.derivative(grid, 0), phi.derivative(grid, 1)];
    for (site, fr) in prep.frames.iter().enumerate() {
        let ch = &chi.data()[site];
        let ps = psi.at(site);
        let q = eu[site] * q_norm_sq(ch);
        let sr = sr_site(ps, fr);
        let gg = gamma_gamma_chi(ch);
        let o = &mut out.data_mut()[site * k..(site + 1) * k];
        for a in 0..k {
            o[a] -= ps[a] * q;
            o[a] -= sr[a] * (eu[site] / 3.0);
            let c = gg[0] * d[0][site * k + a] + gg[1] * d[1][site * k + a];
            o[a] += c * (1.0 / eu[site]);
        }
        project_spinors(o, fr);
    }
    out
}

/// Spinor-equation residual, tangent along `φ`.
pub fn residual_psi(
    phi: &MapField,
    psi: &VectorSpinorField,
    chi: &GravitinoField,
    u: &ConformalMetric,
    m: &TargetManifold,
    grid: &Grid,
) -> Result<VectorSpinorField> {
    let prep = prepare(phi, psi, Some(chi), u, m, grid)?;
    Ok(residual_psi_with(phi, psi, chi, u, grid, &prep))
}

/// `(L², L^∞)` norms of the residuals under the metric `g`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResidualNorms {
    pub phi_l2: f64,
    pub phi_linf: f64,
    pub psi_l2: f64,
    pub psi_linf: f64,
    pub l2: f64,
    pub linf: f64,
}

/// Both residuals; `r_phi` is tangent-projected.
#[derive(Clone, Debug)]
pub struct ElResidual {
    pub r_phi: Vec<f64>,
    pub r_psi: VectorSpinorField,
    pub norms: ResidualNorms,
}

impl ElResidual {
    pub fn compute(
        phi: &MapField,
        psi: &VectorSpinorField,
        chi: &GravitinoField,
        u: &ConformalMetric,
        m: &TargetManifold,
        grid: &Grid,
    ) -> Result<ElResidual> {
        let prep = prepare(phi, psi, Some(chi), u, m, grid)?;
        let k = phi.k();
        let mut r_phi = residual_phi_with(phi, psi, chi, u, m, grid, &prep);
        for (site, fr) in prep.frames.iter().enumerate() {
            fr.tangent_project_in_place(&mut r_phi[site * k..(site + 1) * k]);
        }
        let r_psi = residual_psi_with(phi, psi, chi, u, grid, &prep);
        let norms = residual_norms(&r_phi, &r_psi, u, grid);
        if !(norms.l2.is_finite() && norms.linf.is_finite()) {
            return Err(crate::Error::NonFinite("Euler-Lagrange residual".into()));
        }
        Ok(ElResidual { r_phi, r_psi, norms })
    }
}

/// Norms with weights `e^{2u} h₁h₂` for the map and `e^{3u} h₁h₂` for spinors.
pub fn residual_norms(
    r_phi: &[f64],
    r_psi: &VectorSpinorField,
    u: &ConformalMetric,
    grid: &Grid,
) -> ResidualNorms {
    let k = r_psi.k();
    let w = grid.cell_area();
    let (e2, e3) = (u.exp(2.0), u.exp(3.0));
    let mut n = ResidualNorms::default();
    let (mut sp, mut ss) = (0.0, 0.0);
    for site in 0..r_psi.sites() {
        let a: f64 = r_phi[site * k..(site + 1) * k].iter().map(|x| x * x).sum();
        let b: f64 = r_psi.at(site).iter().map(|s| s.norm_sq()).sum();
        sp += e2[site] * a * w;
        ss += e3[site] * b * w;
        n.phi_linf = n.phi_linf.max(a.sqrt());
        n.psi_linf = n.psi_linf.max(b.sqrt());
    }
    n.phi_l2 = sp.sqrt();
    n.psi_l2 = ss.sqrt();
    n.l2 = (sp + ss).sqrt();
    n.linf = n.phi_linf.max(n.psi_linf);
    n
}

/// Antisymmetric coefficient matrices of the map equation, `K×K` per site and direction.
#[derive(Clone, Debug)]
pub struct AntisymPotentials {
    pub k: usize,
    pub omega: Vec<f64>,
    pub f: Vec<f64>,
    pub t: Vec<f64>,
}

impl AntisymPotentials {
    fn offset(&self, site: usize, alpha: usize) -> std::ops::Range<usize> {
        let kk = self.k * self.k;
        let start = (site * 2 + alpha) * kk;
        start..start + kk
    }

    pub fn omega_at(&self, site: usize, alpha: usize) -> &[f64] {
        &self.omega[self.offset(site, alpha)]
    }

    pub fn f_at(&self, site: usize, alpha: usize) -> &[f64] {
        &self.f[self.offset(site, alpha)]
    }

    pub fn t_at(&self, site: usize, alpha: usize) -> &[f64] {
        &self.t[self.offset(site, alpha)]
    }

    /// Largest `|M + Mᵀ|` entry over all three families.
    pub fn antisymmetry_defect(&self) -> f64 {
        let k = self.k;
        let mut worst: f64 = 0.0;
        for m in [&self.omega, &self.f, &self.t] {
            for block in m.chunks(k * k) {
                for a in 0..k {
                    for b in 0..k {
                        worst = worst.max((block[a * k + b] + block[b * k + a]).abs());
                    }
                }
            }
        }
        worst
    }
}

fn omega_block(fr: &LocalFrame, xa: &[f64]) -> Vec<f64> {
    let k = fr.k;
    let mut w = vec![0.0; k * k];
    for l in 0..fr.codim {
        let jx = mat_vec(fr.jac(l), xa, k);
        let nu = fr.normal(l);
        for a in 0..k {
            for b in 0..k {
                w[a * k + b] += jx[a] * nu[b] - jx[b] * nu[a];
            }
        }
    }
    w
}

fn t_block(fr: &LocalFrame, va: &[f64]) -> Vec<f64> {
    let k = fr.k;
    let mut t = vec![0.0; k * k];
    for l in 0..fr.codim {
        let j = fr.jac(l);
        let jtv: Vec<f64> = (0..k).map(|b| (0..k).map(|c| j[c * k + b] * va[c]).sum()).collect();
        let nu = fr.normal(l);
        for a in 0..k {
            for b in 0..k {
                t[a * k + b] -= jtv[b] * nu[a] - jtv[a] * nu[b];
            }
        }
    }
    t
}

fn f_block(fr: &LocalFrame, g: &[f64]) -> Vec<f64> {
    let k = fr.k;
    let mut f = vec![0.0; k * k];
    for l in 0..fr.codim {
        let s = fr.shape(l);
        // S G S
        let mut sg = vec![0.0; k * k];
        for a in 0..k {
            for c in 0..k {
                sg[a * k + c] = (0..k).map(|e| s[a * k + e] * g[e * k + c]).sum();
            }
        }
        for a in 0..k {
            for b in 0..k {
                f[a * k + b] += (0..k).map(|c| sg[a * k + c] * s[c * k + b]).sum::<f64>();
            }
        }
    }
    f
}

/// `ω`, `F`, `T` with `Δ_g φ - Σ_α (ω+F+T)_α X_α + (1/12)S∇R + div_g V = r_φ`.
pub fn potentials(
    phi: &MapField,
    psi: &VectorSpinorField,
    chi: &GravitinoField,
    u: &ConformalMetric,
    m: &TargetManifold,
    grid: &Grid,
) -> Result<AntisymPotentials> {
    let prep = prepare(phi, psi, Some(chi), u, m, grid)?;
    let k = phi.k();
    let v = v_fields(chi, psi, u);
    let eu = u.exp(1.0);
    let n = phi.sites() * 2 * k * k;
    let mut pot = AntisymPotentials { k, omega: vec![0.0; n], f: vec![0.0; n], t: vec![0.0; n] };
    for (site, fr) in prep.frames.iter().enumerate() {
        for alpha in 0..2 {
            let r = pot.offset(site, alpha);
            let xa = x_alpha(&prep.x, site, k, alpha);
            pot.omega[r.clone()].copy_from_slice(&omega_block(fr, xa));
            let g = spinor_gram_gamma(psi.at(site), alpha, eu[site]);
            pot.f[r.clone()].copy_from_slice(&f_block(fr, &g));
            pot.t[r].copy_from_slice(&t_block(fr, &v_alpha(&v, site, k, alpha)));
        }
    }
    Ok(pot)
}

/// Re-assembles the map equation from the antisymmetric potentials.
pub fn assemble_map_equation(
    pot: &AntisymPotentials,
    phi: &MapField,
    psi: &VectorSpinorField,
    chi: &GravitinoField,
    u: &ConformalMetric,
    m: &TargetManifold,
    grid: &Grid,
) -> Result<Vec<f64>> {
    let prep = prepare(phi, psi, Some(chi), u, m, grid)?;
    let k = phi.k();
    let parts = map_parts(phi, psi, chi, u, m, grid, &prep);
    let mut out = vec![0.0; phi.sites() * k];
    for site in 0..phi.sites() {
        for a in 0..k {
            let i = site * k + a;
            out[i] = parts.lap[i] + parts.snr[i] + parts.div_v[i];
        }
        for alpha in 0..2 {
            let xa = x_alpha(&prep.x, site, k, alpha);
            let (w, f, t) =
                (pot.omega_at(site, alpha), pot.f_at(site, alpha), pot.t_at(site, alpha));
            for a in 0..k {
                let mut s = 0.0;
                for b in 0..k {
                    s += (w[a * k + b] + f[a * k + b] + t[a * k + b]) * xa[b];
                }
                out[site * k + a] -= s;
            }
        }
    }
    Ok(out)
}

/// Central finite-difference gradient of the total action.
///
/// The map is perturbed along an orthonormal tangent basis at each site as
/// `project(φ ± εt)`, re-projecting `ψ` onto the new tangent space; spinors are
/// perturbed along tangent directions in each of the four spinor slots.
/// Returns ambient gradients (`K` reals and `K` spinors per site).
pub fn action_gradient_fd(
    phi: &MapField,
    psi: &VectorSpinorField,
    u: &ConformalMetric,
    chi: &GravitinoField,
    m: &TargetManifold,
    grid: &Grid,
    step: f64,
) -> Result<(Vec<f64>, Vec<Spinor>)> {
    let k = phi.k();
    let action = |p: &MapField, s: &VectorSpinorField| -> Result<f64> {
        Ok(total_action(p, s, u, chi, m, grid)?.total)
    };
    action(phi, psi)?;
    let mut g_phi = vec![0.0; phi.sites() * k];
    let mut g_psi = vec![Spinor::ZERO; phi.sites() * k];
    let mut p = phi.clone();
    let mut s = psi.clone();
    for site in 0..phi.sites() {
        let p0 = phi.point(site).to_vec();
        let s0 = psi.at(site).to_vec();
        let basis = m.tangent_basis(&p0);

        let eps = step * crate::geometry::norm(&p0).max(1.0);
        for t in &basis {
            let mut val = [0.0; 2];
            for (idx, sign) in [1.0, -1.0].iter().enumerate() {
                let q: Vec<f64> = p0.iter().zip(t).map(|(a, b)| a + sign * eps * b).collect();
                let q = m.project(&q);
                let fr = m.frame_unchecked(&q);
                p.point_mut(site).copy_from_slice(&q);
                let sp = s.at_mut(site);
                sp.copy_from_slice(&s0);
                project_spinors(sp, &fr);
                val[idx] = action(&p, &s)?;
            }
            let d = (val[0] - val[1]) / (2.0 * eps);
            for a in 0..k {
                g_phi[site * k + a] += d * t[a];
            }
        }
        p.point_mut(site).copy_from_slice(&p0);
        s.at_mut(site).copy_from_slice(&s0);

        let size = s0.iter().map(|x| x.norm_sq()).sum::<f64>().sqrt();
        let eps = step * size.max(1.0);
        for t in &basis {
            for slot in 0..4 {
                let mut val = [0.0; 2];
                for (idx, sign) in [1.0, -1.0].iter().enumerate() {
                    let sp = s.at_mut(site);
                    sp.copy_from_slice(&s0);
                    for a in 0..k {
                        sp[a].0[slot] += sign * eps * t[a];
                    }
                    val[idx] = action(&p, &s)?;
                }
                let d = (val[0] - val[1]) / (2.0 * eps);
                for a in 0..k {
                    g_psi[site * k + a].0[slot] += d * t[a];
                }
            }
        }
        s.at_mut(site).copy_from_slice(&s0);
    }
    Ok((g_phi, g_psi))
}

/// Converts action gradients to residual scale: `-g_φ/(2e^{2u}w)` and `g_ψ/(2e^{3u}w)`.
pub fn gradient_to_residual_scale(
    g_phi: &[f64],
    g_psi: &[Spinor],
    k: usize,
    u: &ConformalMetric,
    grid: &Grid,
) -> (Vec<f64>, Vec<Spinor>) {
    let w = grid.cell_area();
    let (e2, e3) = (u.exp(2.0), u.exp(3.0));
    let rp = g_phi.iter().enumerate().map(|(i, g)| -g / (2.0 * e2[i / k] * w)).collect();
    let rs = g_psi.iter().enumerate().map(|(i, g)| *g * (1.0 / (2.0 * e3[i / k] * w))).collect();
    (rp, rs)
}
