use crate::clifford::Spinor;
use crate::error::{Error, Result};
use std::ops::{Add, Mul, Sub};

/// Values that the difference stencils can act on.
pub trait Stencil: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
}

impl Stencil for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl Stencil for Spinor {
    fn zero() -> Self {
        Spinor::ZERO
    }
}

/// Periodic grid on the torus `[0,1)²`. Site `(i1, i2)` sits at `(i1 h1, i2 h2)`
/// and has linear index `i1 * n2 + i2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    n1: usize,
    n2: usize,
}

impl Grid {
    pub fn new(n1: usize, n2: usize) -> Result<Grid> {
        if n1 < 4 || n2 < 4 {
            return Err(Error::GridTooSmall { n1, n2 });
        }
        Ok(Grid { n1, n2 })
    }

    pub fn square(n: usize) -> Result<Grid> {
        Grid::new(n, n)
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn h1(&self) -> f64 {
        1.0 / self.n1 as f64
    }

    pub fn h2(&self) -> f64 {
        1.0 / self.n2 as f64
    }

    /// Spacing along axis `alpha`.
    pub fn h(&self, alpha: usize) -> f64 {
        if alpha == 0 {
            self.h1()
        } else {
            self.h2()
        }
    }

    /// Cell area `h1 h2`.
    pub fn cell_area(&self) -> f64 {
        self.h1() * self.h2()
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, i1: usize, i2: usize) -> usize {
        (i1 % self.n1) * self.n2 + (i2 % self.n2)
    }

    pub fn coords(&self, site: usize) -> (usize, usize) {
        (site / self.n2, site % self.n2)
    }

    /// Physical position of a site.
    pub fn position(&self, site: usize) -> [f64; 2] {
        let (i1, i2) = self.coords(site);
        [i1 as f64 * self.h1(), i2 as f64 * self.h2()]
    }

    /// Periodic neighbour of `site` shifted by `+1` (`forward`) or `-1` along `alpha`.
    pub fn neighbor(&self, site: usize, alpha: usize, forward: bool) -> usize {
        let (i1, i2) = self.coords(site);
        match (alpha, forward) {
            (0, true) => self.index(i1 + 1, i2),
            (0, false) => self.index(i1 + self.n1 - 1, i2),
            (_, true) => self.index(i1, i2 + 1),
            (_, false) => self.index(i1, i2 + self.n2 - 1),
        }
    }

    /// Samples `f(x, y)` at every site.
    pub fn sample<T>(&self, f: impl Fn(f64, f64) -> T) -> Vec<T> {
        (0..self.len())
            .map(|s| {
                let [x, y] = self.position(s);
                f(x, y)
            })
            .collect()
    }

    /// Centered difference along `alpha` of a field with `stride` values per site.
    pub fn diff_strided<T: Stencil>(&self, f: &[T], stride: usize, alpha: usize) -> Vec<T> {
        debug_assert_eq!(f.len(), self.len() * stride);
        let scale = 0.5 / self.h(alpha);
        let mut out = vec![T::zero(); f.len()];
        for site in 0..self.len() {
            let p = self.neighbor(site, alpha, true) * stride;
            let m = self.neighbor(site, alpha, false) * stride;
            for c in 0..stride {
                out[site * stride + c] = (f[p + c] - f[m + c]) * scale;
            }
        }
        out
    }

    /// Centered difference of a scalar-per-site field.
    pub fn diff<T: Stencil>(&self, f: &[T], alpha: usize) -> Vec<T> {
        self.diff_strided(f, 1, alpha)
    }

    /// Centered gradient.
    pub fn grad(&self, f: &[f64]) -> Vec<[f64; 2]> {
        let d0 = self.diff(f, 0);
        let d1 = self.diff(f, 1);
        d0.into_iter().zip(d1).map(|(a, b)| [a, b]).collect()
    }

    /// Centered divergence, the negative adjoint of [`Grid::grad`].
    pub fn div(&self, v: &[[f64; 2]]) -> Vec<f64> {
        let v0: Vec<f64> = v.iter().map(|w| w[0]).collect();
        let v1: Vec<f64> = v.iter().map(|w| w[1]).collect();
        let d0 = self.diff(&v0, 0);
        let d1 = self.diff(&v1, 1);
        d0.into_iter().zip(d1).map(|(a, b)| a + b).collect()
    }

    /// Five-point Laplacian.
    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        let (a1, a2) = (1.0 / (self.h1() * self.h1()), 1.0 / (self.h2() * self.h2()));
        (0..self.len())
            .map(|s| {
                let c = f[s];
                a1 * (f[self.neighbor(s, 0, true)] + f[self.neighbor(s, 0, false)] - 2.0 * c)
                    + a2 * (f[self.neighbor(s, 1, true)] + f[self.neighbor(s, 1, false)] - 2.0 * c)
            })
            .collect()
    }

    /// Wide Laplacian `div ∘ grad` of a field with `stride` values per site.
    pub fn wide_laplacian_strided(&self, f: &[f64], stride: usize) -> Vec<f64> {
        let mut out = vec![0.0; f.len()];
        for alpha in 0..2 {
            let d = self.diff_strided(f, stride, alpha);
            let dd = self.diff_strided(&d, stride, alpha);
            for (o, v) in out.iter_mut().zip(dd) {
                *o += v;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rejects_small_grids() {
        assert!(matches!(Grid::new(3, 8), Err(Error::GridTooSmall { .. })));
    }

    #[test]
    fn grad_of_sine_matches_stencil_closed_form() {
        let g = Grid::new(16, 8).unwrap();
        let f = g.sample(|x, _| (2.0 * PI * x).sin());
        let gr = g.grad(&f);
        let h = g.h1();
        for s in 0..g.len() {
            let [x, _] = g.position(s);
            let expect = (2.0 * PI * h).sin() / h * (2.0 * PI * x).cos();
            assert!((gr[s][0] - expect).abs() < 1e-12);
            assert!(gr[s][1].abs() < 1e-12);
        }
    }

    #[test]
    fn laplacian_of_cosine_is_stencil_eigenvalue() {
        let g = Grid::square(20).unwrap();
        let f = g.sample(|x, _| (2.0 * PI * x).cos());
        let l = g.laplacian(&f);
        let h = g.h1();
        let lam = -(2.0 / (h * h)) * (1.0 - (2.0 * PI * h).cos());
        for s in 0..g.len() {
            assert!((l[s] - lam * f[s]).abs() < 1e-9);
        }
    }

    #[test]
    fn div_grad_is_wide_laplacian() {
        let g = Grid::new(8, 12).unwrap();
        let f = g.sample(|x, y| (2.0 * PI * x).sin() * (4.0 * PI * y).cos() + x * 0.0);
        let a = g.div(&g.grad(&f));
        let b = g.wide_laplacian_strided(&f, 1);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}
