//! Fiber algebra of the real spinor module `S = Σ ⊕ Σ` over `Cl(0,2)`.
//!
//! A [`Spinor`] stores `(s⁰₁, s⁰₂, s¹₁, s¹₂)`. On `Σ ≅ ℝ²` the frame vectors act by
//!
//! ```text
//! γ⁺(e₁) = [[1, 0], [0, -1]]     γ⁺(e₂) = [[0, 1], [1, 0]]
//! ```
//!
//! and on `S` by the odd block matrix `γ(X) = [[0, -γ⁺(X)], [γ⁺(X), 0]]`, so
//! that `γ(X)² = -|X|²`. The complex structure of `Σ` is
//! `J_Σ = γ⁺(e₁)γ⁺(e₂) = [[0, 1], [-1, 0]]`.

use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

/// One fiber element of `S`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Spinor(pub [f64; 4]);

/// Coefficients of a tangent vector in the orthonormal frame `{e₁, e₂}`.
pub type TangentVector2 = [f64; 2];

/// One fiber of `S ⊗ TM`: the pair `(χ¹, χ²)` in `χ = χ^α ⊗ e_α`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpinorTangent(pub [Spinor; 2]);

/// Selects one of the three quaternionic structures on `S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quaternion {
    I,
    J,
    K,
}

impl Spinor {
    pub const ZERO: Spinor = Spinor([0.0; 4]);

    /// The `k`-th standard basis spinor.
    pub fn basis(k: usize) -> Spinor {
        let mut c = [0.0; 4];
        c[k] = 1.0;
        Spinor(c)
    }

    pub fn dot(&self, other: &Spinor) -> f64 {
        spinor_inner(self, other)
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl Add for Spinor {
    type Output = Spinor;
    fn add(self, o: Spinor) -> Spinor {
        let (a, b) = (self.0, o.0);
        Spinor([a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]])
    }
}

impl Sub for Spinor {
    type Output = Spinor;
    fn sub(self, o: Spinor) -> Spinor {
        let (a, b) = (self.0, o.0);
        Spinor([a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]])
    }
}

impl Neg for Spinor {
    type Output = Spinor;
    fn neg(self) -> Spinor {
        let a = self.0;
        Spinor([-a[0], -a[1], -a[2], -a[3]])
    }
}

impl Mul<f64> for Spinor {
    type Output = Spinor;
    fn mul(self, t: f64) -> Spinor {
        let a = self.0;
        Spinor([a[0] * t, a[1] * t, a[2] * t, a[3] * t])
    }
}

impl AddAssign for Spinor {
    fn add_assign(&mut self, o: Spinor) {
        *self = *self + o;
    }
}

impl SubAssign for Spinor {
    fn sub_assign(&mut self, o: Spinor) {
        *self = *self - o;
    }
}

impl SpinorTangent {
    pub const ZERO: SpinorTangent = SpinorTangent([Spinor::ZERO; 2]);

    pub fn dot(&self, other: &SpinorTangent) -> f64 {
        self.0[0].dot(&other.0[0]) + self.0[1].dot(&other.0[1])
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn is_finite(&self) -> bool {
        self.0[0].is_finite() && self.0[1].is_finite()
    }
}

impl Add for SpinorTangent {
    type Output = SpinorTangent;
    fn add(self, o: SpinorTangent) -> SpinorTangent {
        SpinorTangent([self.0[0] + o.0[0], self.0[1] + o.0[1]])
    }
}

impl Sub for SpinorTangent {
    type Output = SpinorTangent;
    fn sub(self, o: SpinorTangent) -> SpinorTangent {
        SpinorTangent([self.0[0] - o.0[0], self.0[1] - o.0[1]])
    }
}

impl Neg for SpinorTangent {
    type Output = SpinorTangent;
    fn neg(self) -> SpinorTangent {
        SpinorTangent([-self.0[0], -self.0[1]])
    }
}

impl Mul<f64> for SpinorTangent {
    type Output = SpinorTangent;
    fn mul(self, t: f64) -> SpinorTangent {
        SpinorTangent([self.0[0] * t, self.0[1] * t])
    }
}

/// `γ⁺(v)` acting on `Σ`.
#[inline]
pub fn gamma_plus(v: TangentVector2, a: [f64; 2]) -> [f64; 2] {
    [v[0] * a[0] + v[1] * a[1], v[1] * a[0] - v[0] * a[1]]
}

/// `J_Σ`, left multiplication by the volume element on `Σ`.
#[inline]
pub fn j_sigma(a: [f64; 2]) -> [f64; 2] {
    [a[1], -a[0]]
}

/// Clifford multiplication `γ(v)s`.
#[inline]
pub fn clifford_mul(v: TangentVector2, s: Spinor) -> Spinor {
    let c = s.0;
    let lo = gamma_plus(v, [c[2], c[3]]);
    let hi = gamma_plus(v, [c[0], c[1]]);
    Spinor([-lo[0], -lo[1], hi[0], hi[1]])
}

/// `γ(e_α)s` for `α ∈ {0, 1}`.
#[inline]
pub fn gamma(alpha: usize, s: Spinor) -> Spinor {
    let mut v = [0.0; 2];
    v[alpha] = 1.0;
    clifford_mul(v, s)
}

/// The Euclidean inner product `g_S`.
#[inline]
pub fn spinor_inner(s: &Spinor, t: &Spinor) -> f64 {
    let (a, b) = (s.0, t.0);
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// Multiplication by the volume element `ω = e₁·e₂`.
pub fn volume_mul(s: Spinor) -> Spinor {
    gamma(0, gamma(1, s))
}

pub fn quaternionic_structure(which: Quaternion, s: Spinor) -> Spinor {
    let c = s.0;
    let (s0, s1) = ([c[0], c[1]], [c[2], c[3]]);
    let (a, b) = match which {
        Quaternion::I => ([-s1[0], -s1[1]], s0),
        Quaternion::J => {
            let t = j_sigma(s1);
            (j_sigma(s0), [-t[0], -t[1]])
        }
        Quaternion::K => (j_sigma(s1), j_sigma(s0)),
    };
    Spinor([a[0], a[1], b[0], b[1]])
}

/// `γ(χ) = e₁·χ¹ + e₂·χ²`.
pub fn gamma_contract(chi: &SpinorTangent) -> Spinor {
    gamma(0, chi.0[0]) + gamma(1, chi.0[1])
}

/// The right inverse `σ(s) = -½ e_β·s ⊗ e_β` of [`gamma_contract`].
pub fn sigma_lift(s: Spinor) -> SpinorTangent {
    SpinorTangent([gamma(0, s) * -0.5, gamma(1, s) * -0.5])
}

/// `(Qχ)^β = -½ Σ_α e_α·e_β·χ^α`, the projection onto `ker γ`.
pub fn q_project(chi: &SpinorTangent) -> SpinorTangent {
    let mut out = SpinorTangent::ZERO;
    for beta in 0..2 {
        let mut acc = Spinor::ZERO;
        for alpha in 0..2 {
            acc += gamma(alpha, gamma(beta, chi.0[alpha]));
        }
        out.0[beta] = acc * -0.5;
    }
    out
}

/// `(Pχ)^β = -½ Σ_α e_β·e_α·χ^α = σ(γ(χ))^β`.
pub fn p_project(chi: &SpinorTangent) -> SpinorTangent {
    let mut out = SpinorTangent::ZERO;
    for beta in 0..2 {
        let mut acc = Spinor::ZERO;
        for alpha in 0..2 {
            acc += gamma(beta, gamma(alpha, chi.0[alpha]));
        }
        out.0[beta] = acc * -0.5;
    }
    out
}

/// `|Qχ|² = ⟨χ, Qχ⟩`.
pub fn q_norm_sq(chi: &SpinorTangent) -> f64 {
    chi.dot(&q_project(chi))
}
