#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;
use rand::Rng;
use std::f64::consts::TAU;
use std::sync::Arc;
use susy_sigma::geometry::*;
use susy_sigma::sampling::rng;
use susy_sigma::Error;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn random_point(m: &TargetManifold, r: &mut impl Rng) -> Vec<f64> {
    let p: Vec<f64> = (0..m.ambient_dim()).map(|_| r.gen_range(-1.0..1.0)).collect();
    m.project(&p)
}

fn random_tangent(m: &TargetManifold, p: &[f64], r: &mut impl Rng) -> Vec<f64> {
    let w: Vec<f64> = (0..m.ambient_dim()).map(|_| r.gen_range(-1.0..1.0)).collect();
    m.tangent_project(p, &w)
}

fn ellipsoid() -> TargetManifold {
    TargetManifold::embedded(Arc::new(Ellipsoid::new(vec![1.0, 1.5, 0.7]).unwrap())).unwrap()
}

#[test]
fn grid_needs_four_sites_per_direction() {
    assert!(matches!(Grid::new(3, 8), Err(Error::GridTooSmall { .. })));
    assert!(Grid::new(4, 4).is_ok());
}

#[test]
fn grad_of_sine_is_the_exact_stencil_value() {
    let g = Grid::new(16, 8).unwrap();
    let f = g.sample(|x, _| (TAU * x).sin());
    let d = g.grad(&f);
    let h = g.h1();
    for s in 0..g.len() {
        let [x, _] = g.position(s);
        let exact = ((TAU * (x + h)).sin() - (TAU * (x - h)).sin()) / (2.0 * h);
        assert!((d[s][0] - exact).abs() < 1e-12);
        assert!((d[s][0] - (TAU * h).sin() / h * (TAU * x).cos()).abs() < 1e-12);
        assert!(d[s][1].abs() < 1e-12);
    }
}

#[test]
fn stencils_annihilate_constants() {
    let g = Grid::square(8).unwrap();
    let c = vec![2.5; g.len()];
    assert!(g.grad(&c).iter().all(|v| v[0] == 0.0 && v[1] == 0.0));
    assert!(g.div(&vec![[1.0, -3.0]; g.len()]).iter().all(|v| *v == 0.0));
    assert!(g.laplacian(&c).iter().all(|v| *v == 0.0));
}

#[test]
fn laplacian_cosine_eigenvalue() {
    let g = Grid::square(12).unwrap();
    let f = g.sample(|x, _| (TAU * x).cos());
    let l = g.laplacian(&f);
    let h = g.h1();
    let lam = -(2.0 / (h * h)) * (1.0 - (TAU * h).cos());
    for (a, b) in l.iter().zip(&f) {
        assert!((a - lam * b).abs() < 1e-10);
    }
}

#[test]
fn div_grad_is_the_wide_laplacian() {
    let g = Grid::new(8, 10).unwrap();
    let mut r = rng(1);
    let f: Vec<f64> = (0..g.len()).map(|_| r.gen_range(-1.0..1.0)).collect();
    let a = g.div(&g.grad(&f));
    let b = g.wide_laplacian_strided(&f, 1);
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-10);
    }
}

proptest! {
    #[test]
    fn summation_by_parts(seed in 0u64..1000, n1 in 4usize..12, n2 in 4usize..12) {
        let g = Grid::new(n1, n2).unwrap();
        let mut r = rng(seed);
        let f: Vec<f64> = (0..g.len()).map(|_| r.gen_range(-1.0..1.0)).collect();
        let v: Vec<[f64; 2]> = (0..g.len()).map(|_| [r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)]).collect();
        let gf = g.grad(&f);
        let dv = g.div(&v);
        let lhs: f64 = gf.iter().zip(&v).map(|(a, b)| a[0] * b[0] + a[1] * b[1]).sum();
        let rhs: f64 = f.iter().zip(&dv).map(|(a, b)| a * b).sum();
        prop_assert!((lhs + rhs).abs() < 1e-9);
        prop_assert!(dv.iter().sum::<f64>().abs() < 1e-9);
        prop_assert!(g.laplacian(&f).iter().sum::<f64>().abs() < 1e-8);
    }

    #[test]
    fn sphere_frame_invariants(seed in 0u64..1000, k in 2usize..6) {
        let m = TargetManifold::unit_sphere(k);
        let mut r = rng(seed);
        let p = random_point(&m, &mut r);
        prop_assert!(dist(&m.project(&p), &p) < 1e-14);
        let nu = m.normal_frame(&p);
        prop_assert!((dot(&nu, &nu) - 1.0).abs() < 1e-12);
        let w: Vec<f64> = (0..k).map(|_| r.gen_range(-1.0..1.0)).collect();
        let t = m.tangent_project(&p, &w);
        prop_assert!(dist(&m.tangent_project(&p, &t), &t) < 1e-14);
        prop_assert!(dot(&t, &nu).abs() < 1e-14);
        let w2: Vec<f64> = (0..k).map(|_| r.gen_range(-1.0..1.0)).collect();
        prop_assert!((dot(&m.tangent_project(&p, &w2), &w) - dot(&w2, &t)).abs() < 1e-14);
    }

    #[test]
    fn ellipsoid_frame_invariants(seed in 0u64..200) {
        let m = ellipsoid();
        let mut r = rng(seed);
        let p = random_point(&m, &mut r);
        prop_assert!(m.distance(&p) < 1e-12);
        prop_assert!(dist(&m.project(&p), &p) < 1e-12);
        let nu = m.normal_frame(&p);
        prop_assert!((dot(&nu, &nu) - 1.0).abs() < 1e-12);
        let x = random_tangent(&m, &p, &mut r);
        let y = random_tangent(&m, &p, &mut r);
        let z = random_tangent(&m, &p, &mut r);
        let axy = m.second_fund_form(&p, &x, &y).unwrap();
        let ayx = m.second_fund_form(&p, &y, &x).unwrap();
        prop_assert!(dist(&axy, &ayx) < 1e-12);
        let xi: Vec<f64> = nu.iter().map(|v| 0.7 * v).collect();
        let px = m.shape_operator(&p, &xi, &x).unwrap();
        prop_assert!((dot(&xi, &axy) - dot(&px, &y)).abs() < 1e-10);
        let b1 = m.curvature_operator(&p, &x, &y, &z).unwrap();
        let b2 = m.curvature_operator(&p, &y, &z, &x).unwrap();
        let b3 = m.curvature_operator(&p, &z, &x, &y).unwrap();
        let bianchi: Vec<f64> = (0..3).map(|i| b1[i] + b2[i] + b3[i]).collect();
        prop_assert!(dot(&bianchi, &bianchi).sqrt() < 1e-10);
        let rxx = m.curvature_operator(&p, &x, &x, &z).unwrap();
        prop_assert!(dot(&rxx, &rxx).sqrt() < 1e-12);
        let nxy = m.nabla_a(&p, &x, &y, &z).unwrap();
        let nyx = m.nabla_a(&p, &y, &x, &z).unwrap();
        prop_assert!(dist(&nxy, &nyx) < 1e-8);
    }
}

#[test]
fn sphere_extrinsic_closed_forms() {
    let m = TargetManifold::unit_sphere(3);
    let mut r = rng(2);
    for _ in 0..100 {
        let p = random_point(&m, &mut r);
        let x = random_tangent(&m, &p, &mut r);
        let y = random_tangent(&m, &p, &mut r);
        let z = random_tangent(&m, &p, &mut r);
        let a = m.second_fund_form(&p, &x, &y).unwrap();
        let expect: Vec<f64> = p.iter().map(|v| -dot(&x, &y) * v).collect();
        assert!(dist(&a, &expect) < 1e-12);
        assert!(dist(&m.second_fund_form(&p, &x, &[0.0; 3]).unwrap(), &[0.0; 3]) == 0.0);
        let sz = m.shape_operator(&p, &p, &z).unwrap();
        assert!(dist(&sz, &z.iter().map(|v| -v).collect::<Vec<_>>()) < 1e-12);
        assert_eq!(m.shape_operator(&p, &[0.0; 3], &z).unwrap(), vec![0.0; 3]);
        assert!(m.nabla_a(&p, &x, &y, &z).unwrap().iter().all(|v| *v == 0.0));
    }
}

/// Independent brute-force oracle: `R(X,Y)Z = ⟨Y,Z⟩X - ⟨X,Z⟩Y` on the unit sphere.
#[test]
fn gauss_equation_on_the_sphere() {
    let m = TargetManifold::unit_sphere(3);
    let mut r = rng(3);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let p = random_point(&m, &mut r);
        let x = random_tangent(&m, &p, &mut r);
        let y = random_tangent(&m, &p, &mut r);
        let z = random_tangent(&m, &p, &mut r);
        let got = m.curvature_operator(&p, &x, &y, &z).unwrap();
        let want: Vec<f64> = (0..3).map(|i| dot(&y, &z) * x[i] - dot(&x, &z) * y[i]).collect();
        worst = worst.max(dist(&got, &want));
    }
    assert!(worst < 1e-10, "worst Gauss defect {worst:e}");
}

#[test]
fn sphere_of_radius_two_has_quarter_curvature() {
    let m = TargetManifold::sphere(3, 2.0).unwrap();
    let mut r = rng(4);
    let p = random_point(&m, &mut r);
    let x = random_tangent(&m, &p, &mut r);
    let y = random_tangent(&m, &p, &mut r);
    let got = m.curvature_operator(&p, &x, &y, &y).unwrap();
    let want: Vec<f64> = (0..3).map(|i| 0.25 * (dot(&y, &y) * x[i] - dot(&x, &y) * y[i])).collect();
    assert!(dist(&got, &want) < 1e-12);
}

/// Two-step Richardson comparison: the finite-difference `∇A` converges at
/// second order, so successive differences under step halving shrink by about 4.
#[test]
fn ellipsoid_nabla_a_converges_under_step_halving() {
    let emb = Arc::new(Ellipsoid::new(vec![1.0, 1.5, 0.7]).unwrap());
    let at = |t: f64| TargetManifold::embedded_with_steps(emb.clone(), FRAME_STEP, t).unwrap();
    let (m1, m2, m3) = (at(NABLA_STEP), at(NABLA_STEP / 2.0), at(NABLA_STEP / 4.0));
    let mut r = rng(5);
    for _ in 0..20 {
        let p = random_point(&m1, &mut r);
        let x = random_tangent(&m1, &p, &mut r);
        let y = random_tangent(&m1, &p, &mut r);
        let z = random_tangent(&m1, &p, &mut r);
        let a = m1.nabla_a(&p, &x, &y, &z).unwrap();
        let b = m2.nabla_a(&p, &x, &y, &z).unwrap();
        let c = m3.nabla_a(&p, &x, &y, &z).unwrap();
        let scale = dot(&c, &c).sqrt().max(1.0);
        let (d1, d2) = (dist(&a, &b), dist(&b, &c));
        assert!(d1 / scale < 1e-4, "{d1:e}");
        assert!(d2 < d1 / 3.0 || d2 / scale < 1e-8, "ratio {}", d1 / d2);
        let t = m1.tangent_project(&p, &a);
        assert!(dot(&t, &t).sqrt() < 1e-12 * scale, "nabla A must be normal");
    }
}

#[test]
fn off_manifold_points_are_rejected() {
    let m = TargetManifold::unit_sphere(3);
    let p = [1.1, 0.0, 0.0];
    assert!(matches!(m.check_on_manifold(&p, 7), Err(Error::OffManifold { site: 7, .. })));
    assert!(m.second_fund_form(&p, &[0.0, 1.0, 0.0], &[0.0, 1.0, 0.0]).is_err());
    assert!(ellipsoid().curvature_operator(&p, &[0.0; 3], &[0.0; 3], &[0.0; 3]).is_err());
}
