//! Embedded target manifolds `N ⊂ ℝᴷ` and their extrinsic curvature data.
//!
//! Everything is expressed through the normal frame `ν_l` and its ambient
//! derivative `J_l^{ba} = ∂ν_l^b/∂u^a`. With `S_l` the symmetrized tangent
//! block of `J_l`:
//!
//! ```text
//! A(X, Y)  = -Σ_l (Xᵀ S_l Y) ν_l
//! P(ξ; X)  = -Σ_l (ξ·ν_l) S_l X
//! R(X,Y)Z  = P(A(Y,Z); X) - P(A(X,Z); Y)
//! ```

use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// User-supplied description of a closed embedded submanifold.
///
/// `normal_frame` must be defined and smooth on a tubular neighbourhood of `N`,
/// because derivatives of the frame are taken by central differences off `N`.
pub trait Embedding: Send + Sync + fmt::Debug {
    fn ambient_dim(&self) -> usize;
    fn codim(&self) -> usize;
    /// Nearest-point retraction onto `N`.
    fn project(&self, p: &[f64]) -> Vec<f64>;
    /// Orthonormal normal frame, `codim` rows of length `K`, row-major.
    fn normal_frame(&self, p: &[f64]) -> Vec<f64>;
}

/// Ellipsoid `Σ x_i²/a_i² = 1`, a built-in example of an [`Embedding`].
#[derive(Clone, Debug)]
pub struct Ellipsoid {
    axes: Vec<f64>,
}

impl Ellipsoid {
    pub fn new(axes: Vec<f64>) -> Result<Ellipsoid> {
        if axes.len() < 2 || axes.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::InvalidParameter(
                "ellipsoid axes must be at least two positive numbers".into(),
            ));
        }
        Ok(Ellipsoid { axes })
    }

    pub fn axes(&self) -> &[f64] {
        &self.axes
    }
}

impl Embedding for Ellipsoid {
    fn ambient_dim(&self) -> usize {
        self.axes.len()
    }

    fn codim(&self) -> usize {
        1
    }

    fn project(&self, p: &[f64]) -> Vec<f64> {
        // y_i = p_i a_i² / (a_i² + t) with t the root of g(t) = Σ y_i²/a_i² - 1.
        let a2: Vec<f64> = self.axes.iter().map(|a| a * a).collect();
        let g = |t: f64| -> (f64, f64) {
            let mut v = -1.0;
            let mut dv = 0.0;
            for (x, aa) in p.iter().zip(&a2) {
                let d = aa + t;
                let q = x * x * aa / (d * d);
                v += q;
                dv -= 2.0 * q / d;
            }
            (v, dv)
        };
        let amin = a2.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut lo = -amin;
        let mut hi = 1.0;
        while g(hi).0 > 0.0 {
            hi *= 2.0;
        }
        let mut t = 0.0_f64.clamp(lo, hi);
        for _ in 0..200 {
            let (v, dv) = g(t);
            if v > 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let mut next = t - v / dv;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= 1e-16 * (1.0 + t.abs()) {
                t = next;
                break;
            }
            t = next;
        }
        p.iter().zip(&a2).map(|(x, aa)| x * aa / (aa + t)).collect()
    }

    fn normal_frame(&self, p: &[f64]) -> Vec<f64> {
        let g: Vec<f64> = p.iter().zip(&self.axes).map(|(x, a)| x / (a * a)).collect();
        let n = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        g.into_iter().map(|v| v / n).collect()
    }
}

#[derive(Clone, Debug)]
enum Kind {
    Sphere { radius: f64 },
    Embedded { emb: Arc<dyn Embedding>, step: f64, nabla_step: f64 },
}

/// Target manifold descriptor: analytic round sphere or finite-difference mode.
#[derive(Clone, Debug)]
pub struct TargetManifold {
    k: usize,
    codim: usize,
    kind: Kind,
}

/// Relative step for derivatives of the normal frame.
pub const FRAME_STEP: f64 = 1e-5;
/// Relative step for the covariant derivative of the second fundamental form.
pub const NABLA_STEP: f64 = 1e-3;

impl TargetManifold {
    /// Round sphere `S^{K-1}` of the given radius in `ℝᴷ`.
    pub fn sphere(k: usize, radius: f64) -> Result<TargetManifold> {
        if k < 2 || !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sphere needs K >= 2 and positive radius, got K={k}, r={radius}"
            )));
        }
        Ok(TargetManifold { k, codim: 1, kind: Kind::Sphere { radius } })
    }

    /// Unit sphere `S^{K-1}`.
    pub fn unit_sphere(k: usize) -> TargetManifold {
        TargetManifold::sphere(k, 1.0).expect("valid sphere")
    }

    /// Finite-difference mode around a user-supplied embedding.
    pub fn embedded(emb: Arc<dyn Embedding>) -> Result<TargetManifold> {
        TargetManifold::embedded_with_steps(emb, FRAME_STEP, NABLA_STEP)
    }

    pub fn embedded_with_steps(
        emb: Arc<dyn Embedding>,
        step: f64,
        nabla_step: f64,
    ) -> Result<TargetManifold> {
        let (k, codim) = (emb.ambient_dim(), emb.codim());
        if codim == 0 || codim >= k {
            return Err(Error::InvalidParameter(format!("codimension {codim} in R^{k}")));
        }
        if !(step > 0.0 && nabla_step > 0.0) {
            return Err(Error::InvalidParameter("steps must be positive".into()));
        }
        Ok(TargetManifold { k, codim, kind: Kind::Embedded { emb, step, nabla_step } })
    }

    pub fn ambient_dim(&self) -> usize {
        self.k
    }

    pub fn codim(&self) -> usize {
        self.codim
    }

    pub fn dim(&self) -> usize {
        self.k - self.codim
    }

    pub fn is_analytic(&self) -> bool {
        matches!(self.kind, Kind::Sphere { .. })
    }

    /// True when `∇A` vanishes identically (round spheres).
    pub fn has_parallel_second_fundamental_form(&self) -> bool {
        self.is_analytic()
    }

    pub fn project(&self, p: &[f64]) -> Vec<f64> {
        match &self.kind {
            Kind::Sphere { radius } => {
                let n = norm(p);
                p.iter().map(|x| x * radius / n).collect()
            }
            Kind::Embedded { emb, .. } => emb.project(p),
        }
    }

    /// Distance from `p` to its projection.
    pub fn distance(&self, p: &[f64]) -> f64 {
        let q = self.project(p);
        p.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    /// On-manifold test `|p - project(p)| ≤ 1e-9 (1 + |p|)`.
    pub fn check_on_manifold(&self, p: &[f64], site: usize) -> Result<()> {
        if p.len() != self.k {
            return Err(Error::DimensionMismatch(format!(
                "point has {} components, target lives in R^{}",
                p.len(),
                self.k
            )));
        }
        let d = self.distance(p);
        if !d.is_finite() || d > 1e-9 * (1.0 + norm(p)) {
            return Err(Error::OffManifold { site, distance: d });
        }
        Ok(())
    }

    fn raw_normals(&self, p: &[f64]) -> Vec<f64> {
        match &self.kind {
            Kind::Sphere { .. } => {
                let n = norm(p);
                p.iter().map(|x| x / n).collect()
            }
            Kind::Embedded { emb, .. } => emb.normal_frame(p),
        }
    }

    /// Orthonormal normal frame at `p`, `codim × K` row-major.
    pub fn normal_frame(&self, p: &[f64]) -> Vec<f64> {
        self.raw_normals(p)
    }

    /// `J_l^{ba} = ∂ν_l^b/∂u^a`, stored at `l·K² + b·K + a`.
    pub fn normal_frame_derivative(&self, p: &[f64]) -> Vec<f64> {
        let k = self.k;
        match &self.kind {
            Kind::Sphere { .. } => {
                let r = norm(p);
                let nu: Vec<f64> = p.iter().map(|x| x / r).collect();
                let mut j = vec![0.0; k * k];
                for b in 0..k {
                    for a in 0..k {
                        let d = if a == b { 1.0 } else { 0.0 };
                        j[b * k + a] = (d - nu[a] * nu[b]) / r;
                    }
                }
                j
            }
            Kind::Embedded { step, .. } => {
                let c = self.codim;
                let delta = step * norm(p).max(1.0);
                let mut j = vec![0.0; c * k * k];
                let mut q = p.to_vec();
                for a in 0..k {
                    q[a] = p[a] + delta;
                    let fp = self.raw_normals(&q);
                    q[a] = p[a] - delta;
                    let fm = self.raw_normals(&q);
                    q[a] = p[a];
                    for l in 0..c {
                        for b in 0..k {
                            j[l * k * k + b * k + a] =
                                (fp[l * k + b] - fm[l * k + b]) / (2.0 * delta);
                        }
                    }
                }
                j
            }
        }
    }

    /// All extrinsic data at a point, without an on-manifold check.
    pub fn frame_unchecked(&self, p: &[f64]) -> LocalFrame {
        let (k, c) = (self.k, self.codim);
        let normals = self.normal_frame(p);
        let jac = self.normal_frame_derivative(p);
        let mut tangent = vec![0.0; k * k];
        for a in 0..k {
            for b in 0..k {
                let mut v = if a == b { 1.0 } else { 0.0 };
                for l in 0..c {
                    v -= normals[l * k + a] * normals[l * k + b];
                }
                tangent[a * k + b] = v;
            }
        }
        let mut shape = vec![0.0; c * k * k];
        let mut tmp = vec![0.0; k * k];
        for l in 0..c {
            let jl = &jac[l * k * k..(l + 1) * k * k];
            // tmp = P J_l P
            for a in 0..k {
                for b in 0..k {
                    let mut v = 0.0;
                    for x in 0..k {
                        for y in 0..k {
                            v += tangent[a * k + x] * jl[x * k + y] * tangent[y * k + b];
                        }
                    }
                    tmp[a * k + b] = v;
                }
            }
            for a in 0..k {
                for b in 0..k {
                    shape[l * k * k + a * k + b] = 0.5 * (tmp[a * k + b] + tmp[b * k + a]);
                }
            }
        }
        LocalFrame { k, codim: c, point: p.to_vec(), normals, jac, shape, tangent }
    }

    /// All extrinsic data at `p ∈ N`.
    pub fn frame(&self, p: &[f64]) -> Result<LocalFrame> {
        self.check_on_manifold(p, 0)?;
        Ok(self.frame_unchecked(p))
    }

    pub fn tangent_project(&self, p: &[f64], w: &[f64]) -> Vec<f64> {
        let nu = self.normal_frame(p);
        let mut out = w.to_vec();
        for l in 0..self.codim {
            let n = &nu[l * self.k..(l + 1) * self.k];
            let c = dot(n, w);
            for (o, x) in out.iter_mut().zip(n) {
                *o -= c * x;
            }
        }
        out
    }

    pub fn second_fund_form(&self, p: &[f64], x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        Ok(self.frame(p)?.second_fund_form(x, y))
    }

    pub fn shape_operator(&self, p: &[f64], xi: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        Ok(self.frame(p)?.shape_operator(xi, z))
    }

    pub fn curvature_operator(&self, p: &[f64], x: &[f64], y: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        Ok(self.frame(p)?.curvature(x, y, z))
    }

    /// `(∇_Z A)(X, Y)`.
    pub fn nabla_a(&self, p: &[f64], x: &[f64], y: &[f64], z: &[f64]) -> Result<Vec<f64>> {
        self.check_on_manifold(p, 0)?;
        let k = self.k;
        let t = self.nabla_tensor_unchecked(p);
        let mut out = vec![0.0; k];
        for a in 0..k {
            for i in 0..k {
                for j in 0..k {
                    let w = z[a] * x[i] * y[j];
                    if w == 0.0 {
                        continue;
                    }
                    let b = &t[((a * k + i) * k + j) * k..((a * k + i) * k + j + 1) * k];
                    for (o, v) in out.iter_mut().zip(b) {
                        *o += w * v;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `B[a][i][j][n] = ((∇_{P e_a} A)(P e_i, P e_j))^n`, flattened, length `K⁴`.
    ///
    /// Zero for round spheres. In finite-difference mode
    /// `(∇_Z A)(X,Y) = P_⊥[Â(q₊) - Â(q₋)]/(2t)` with `q± = project(p ± tZ)` and
    /// `Â(q)(X,Y) = A_q(P_q X, P_q Y)`.
    pub fn nabla_tensor_unchecked(&self, p: &[f64]) -> Vec<f64> {
        let k = self.k;
        let mut out = vec![0.0; k * k * k * k];
        let nabla_step = match &self.kind {
            Kind::Sphere { .. } => return out,
            Kind::Embedded { nabla_step, .. } => *nabla_step,
        };
        let here = self.frame_unchecked(p);
        let t = nabla_step * norm(p).max(1.0);
        let a_hat = |q: &[f64]| -> Vec<f64> {
            let f = self.frame_unchecked(q);
            let mut m = vec![0.0; k * k * k];
            for i in 0..k {
                for j in 0..k {
                    for l in 0..f.codim {
                        let s = f.shape(l)[i * k + j];
                        for n in 0..k {
                            m[(i * k + j) * k + n] -= s * f.normal(l)[n];
                        }
                    }
                }
            }
            m
        };
        for a in 0..k {
            let z: Vec<f64> = (0..k).map(|b| here.tangent[b * k + a]).collect();
            let qp: Vec<f64> = self.project(&p.iter().zip(&z).map(|(x, v)| x + t * v).collect::<Vec<_>>());
            let qm: Vec<f64> = self.project(&p.iter().zip(&z).map(|(x, v)| x - t * v).collect::<Vec<_>>());
            let (ap, am) = (a_hat(&qp), a_hat(&qm));
            for i in 0..k {
                for j in 0..k {
                    let base = (i * k + j) * k;
                    let diff: Vec<f64> =
                        (0..k).map(|n| (ap[base + n] - am[base + n]) / (2.0 * t)).collect();
                    let normal = here.normal_project(&diff);
                    out[((a * k + i) * k + j) * k..((a * k + i) * k + j + 1) * k]
                        .copy_from_slice(&normal);
                }
            }
        }
        out
    }

    /// Orthonormal basis of `T_pN` (`dim` vectors of length `K`).
    pub fn tangent_basis(&self, p: &[f64]) -> Vec<Vec<f64>> {
        self.frame_unchecked(p).tangent_basis()
    }
}

/// Extrinsic data of `N` at one point.
#[derive(Clone, Debug)]
pub struct LocalFrame {
    pub k: usize,
    pub codim: usize,
    pub point: Vec<f64>,
    /// `codim × K`, row `l` is `ν_l`.
    pub normals: Vec<f64>,
    /// `J_l^{ba}` at `l·K² + b·K + a`.
    pub jac: Vec<f64>,
    /// `S_l = sym(P J_l P)`, `codim × K × K`.
    pub shape: Vec<f64>,
    /// Tangent projector `P = I - Σ ν_l ν_lᵀ`.
    pub tangent: Vec<f64>,
}

impl LocalFrame {
    pub fn normal(&self, l: usize) -> &[f64] {
        &self.normals[l * self.k..(l + 1) * self.k]
    }

    pub fn jac(&self, l: usize) -> &[f64] {
        &self.jac[l * self.k * self.k..(l + 1) * self.k * self.k]
    }

    pub fn shape(&self, l: usize) -> &[f64] {
        &self.shape[l * self.k * self.k..(l + 1) * self.k * self.k]
    }

    pub fn tangent_project(&self, w: &[f64]) -> Vec<f64> {
        let mut out = w.to_vec();
        self.tangent_project_in_place(&mut out);
        out
    }

    pub fn tangent_project_in_place(&self, w: &mut [f64]) {
        for l in 0..self.codim {
            let n = self.normal(l);
            let c = dot(n, w);
            for (o, x) in w.iter_mut().zip(n) {
                *o -= c * x;
            }
        }
    }

    pub fn normal_project(&self, w: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.k];
        for l in 0..self.codim {
            let n = self.normal(l);
            let c = dot(n, w);
            for (o, x) in out.iter_mut().zip(n) {
                *o += c * x;
            }
        }
        out
    }

    pub fn second_fund_form(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let k = self.k;
        let mut out = vec![0.0; k];
        for l in 0..self.codim {
            let s = bilinear(self.shape(l), x, y, k);
            for (o, n) in out.iter_mut().zip(self.normal(l)) {
                *o -= s * n;
            }
        }
        out
    }

    pub fn shape_operator(&self, xi: &[f64], z: &[f64]) -> Vec<f64> {
        let k = self.k;
        let mut out = vec![0.0; k];
        for l in 0..self.codim {
            let c = dot(xi, self.normal(l));
            let sz = mat_vec(self.shape(l), z, k);
            for (o, v) in out.iter_mut().zip(sz) {
                *o -= c * v;
            }
        }
        out
    }

    pub fn curvature(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let a = self.shape_operator(&self.second_fund_form(y, z), x);
        let b = self.shape_operator(&self.second_fund_form(x, z), y);
        a.into_iter().zip(b).map(|(p, q)| p - q).collect()
    }

    pub fn tangent_basis(&self) -> Vec<Vec<f64>> {
        let k = self.k;
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for a in 0..k {
            if basis.len() == k - self.codim {
                break;
            }
            let mut v: Vec<f64> = (0..k).map(|b| self.tangent[b * k + a]).collect();
            for _ in 0..2 {
                for e in &basis {
                    let c = dot(e, &v);
                    for (x, y) in v.iter_mut().zip(e) {
                        *x -= c * y;
                    }
                }
            }
            let n = norm(&v);
            if n > 1e-6 {
                basis.push(v.into_iter().map(|x| x / n).collect());
            }
        }
        basis
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn mat_vec(m: &[f64], v: &[f64], k: usize) -> Vec<f64> {
    (0..k).map(|a| dot(&m[a * k..(a + 1) * k], v)).collect()
}

pub(crate) fn bilinear(m: &[f64], x: &[f64], y: &[f64], k: usize) -> f64 {
    let mut s = 0.0;
    for a in 0..k {
        if x[a] == 0.0 {
            continue;
        }
        s += x[a] * dot(&m[a * k..(a + 1) * k], y);
    }
    s
}
