use proptest::prelude::*;
use rand::Rng;
use std::f64::consts::PI;
use susy_sigma::analysis::*;
use susy_sigma::sampling::rng;
use susy_sigma::Error;

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
    (f(a) + f(b) + inner) * h / 3.0
}

#[test]
fn full_exponent_is_the_lp_norm() {
    let g = DiscGrid::new(64).unwrap();
    let f = g.sample(|x, y| (3.0 * x).sin() + x * y);
    for p in [1.0, 2.0, 3.5] {
        let params = MorreyParams::new(p, 2.0).unwrap();
        let m = morrey_norm(&g, &f, params, &dyadic_radii(2.0, 5)).unwrap();
        let l = lp_norm(&g, &f, p);
        assert!((m - l).abs() <= 1e-12 * l, "{m} {l}");
    }
}

#[test]
fn constants_in_the_lp_limit_and_at_zero_exponent() {
    let g = DiscGrid::new(128).unwrap();
    let c = -1.5_f64;
    let f = vec![c; g.len()];
    // Balls of radius just above 1 centred at the origin already cover the disc.
    let m = morrey_norm(&g, &f, MorreyParams::new(4.0, 2.0).unwrap(), &[1.01]).unwrap();
    assert!((m - c.abs() * g.area().powf(0.25)).abs() < 1e-12);
    assert!((m - c.abs() * PI.powf(0.25)).abs() < 1e-3 * m);
    // At λ = 0 a constant gives |c| times the unit-ball area to the 1/p, attained by
    // any ball inside the disc.
    let z = morrey_norm(&g, &f, MorreyParams::new(2.0, 0.0).unwrap(), &dyadic_radii(0.5, 4)).unwrap();
    assert!((z - c.abs() * PI.sqrt()).abs() < 2e-2 * z, "{z}");
}

#[test]
fn parameters_are_validated() {
    assert!(MorreyParams::new(0.5, 1.0).is_err());
    assert!(MorreyParams::new(2.0, 2.5).is_err());
    assert!(MorreyParams::new(2.0, -0.1).is_err());
    assert!(matches!(DiscGrid::new(2), Err(Error::InvalidParameter(_))));
    let g = DiscGrid::new(8).unwrap();
    let p = MorreyParams::new(2.0, 1.0).unwrap();
    assert!(morrey_norm(&g, &[1.0; 3], p, &[0.5]).is_err());
    assert!(morrey_norm(&g, &vec![1.0; g.len()], p, &[0.0]).is_err());
    assert!(matches!(decay_profile(&g, &vec![1.0; g.len()], [0.0; 2], 2.0, 1.0, &[]), Err(Error::EmptyRadii)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    /// `r^{λ₂-2} ≤ 2^{λ₂-λ₁} r^{λ₁-2}` for `r ≤ 2` gives the inclusion
    /// `‖f‖_{p,λ₂} ≤ 2^{(λ₂-λ₁)/p} ‖f‖_{p,λ₁}`.
    #[test]
    fn inclusion_ordering(seed in 0u64..10_000, l1 in 0.0..2.0f64, dl in 0.0..1.0f64, p in 1.0..4.0f64) {
        let g = DiscGrid::new(16).unwrap();
        let mut r = rng(seed);
        let f: Vec<f64> = (0..g.len()).map(|_| r.gen_range(-2.0..2.0)).collect();
        let l2 = (l1 + dl).min(2.0);
        let radii = dyadic_radii(2.0, 4);
        let a = morrey_norm(&g, &f, MorreyParams::new(p, l1).unwrap(), &radii).unwrap();
        let b = morrey_norm(&g, &f, MorreyParams::new(p, l2).unwrap(), &radii).unwrap();
        prop_assert!(b <= 2f64.powf((l2 - l1) / p) * a * (1.0 + 1e-12));
        let s = r.gen_range(0.1..3.0);
        let fs: Vec<f64> = f.iter().map(|v| s * v).collect();
        let c = morrey_norm(&g, &fs, MorreyParams::new(p, l1).unwrap(), &radii).unwrap();
        prop_assert!((c - s * a).abs() <= 1e-12 * c);
    }
}

#[test]
fn riesz_of_a_single_cell_is_the_point_kernel() {
    let g = DiscGrid::new(32).unwrap();
    let src = g.points().iter().position(|p| p[0] == 0.0 && p[1] == 0.0).unwrap();
    let mut f = vec![0.0; g.len()];
    f[src] = 1.0;
    let i1 = riesz_i1(&g, &f);
    let h = g.h();
    for (x, v) in g.points().iter().zip(&i1) {
        let d = x[0].hypot(x[1]);
        if d >= 10.0 * h {
            assert!((v - h * h / d).abs() <= 1e-2 * h * h / d);
        }
    }
    assert!((i1[src] - 4.0 * h * (1.0 + 2f64.sqrt()).ln()).abs() < 1e-15);
}

#[test]
fn riesz_is_linear_and_positive() {
    let g = DiscGrid::new(16).unwrap();
    let mut r = rng(9);
    let a: Vec<f64> = (0..g.len()).map(|_| r.gen_range(0.0..1.0)).collect();
    let b: Vec<f64> = (0..g.len()).map(|_| r.gen_range(-1.0..1.0)).collect();
    let ia = riesz_i1(&g, &a);
    let ib = riesz_i1(&g, &b);
    let comb: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 2.0 * x - 0.5 * y).collect();
    for ((c, x), y) in riesz_i1(&g, &comb).iter().zip(&ia).zip(&ib) {
        assert!((c - (2.0 * x - 0.5 * y)).abs() < 1e-12);
    }
    assert!(ia.iter().all(|v| *v > 0.0));
    assert!(riesz_i1(&g, &vec![0.0; g.len()]).iter().all(|v| *v == 0.0));
}

#[test]
fn riesz_of_a_gaussian_converges_at_the_centre() {
    let w = 0.3;
    // ∫_{|y|<1} e^{-|y|²/w²} / |y| dy = 2π ∫_0^1 e^{-r²/w²} dr.
    let exact = 2.0 * PI * simpson(|r| (-(r * r) / (w * w)).exp(), 0.0, 1.0, 2000);
    let errs: Vec<f64> = [32, 64]
        .iter()
        .map(|n| {
            let g = DiscGrid::new(*n).unwrap();
            let f = g.sample(|x, y| (-(x * x + y * y) / (w * w)).exp());
            let c = g.points().iter().position(|p| p[0] == 0.0 && p[1] == 0.0).unwrap();
            (riesz_i1(&g, &f)[c] - exact).abs() / exact
        })
        .collect();
    assert!(errs[1] < errs[0] && errs[1] < 1e-2, "{errs:?}");
}

#[test]
fn decay_profiles() {
    let g = DiscGrid::new(128).unwrap();
    let radii = dyadic_radii(0.5, 3);
    let flat = decay_profile(&g, &vec![2.0; g.len()], [0.0; 2], 2.0, 1.0, &radii).unwrap();
    for (r, v) in &flat {
        let want = 2.0 * PI.sqrt() * r.sqrt();
        assert!((v - want).abs() < 5e-2 * want, "{r} {v} {want}");
    }
    // |x|^{-1/2} lies in M^{2,1}: its profile at λ = 1 stays bounded.
    let sing = g.sample(|x, y| {
        let d = x.hypot(y);
        if d == 0.0 { 0.0 } else { d.powf(-0.5) }
    });
    let prof = decay_profile(&g, &sing, [0.0; 2], 2.0, 1.0, &dyadic_radii(0.5, 5)).unwrap();
    let (lo, hi) = prof.iter().fold((f64::MAX, 0.0_f64), |(a, b), (_, v)| (a.min(*v), b.max(*v)));
    assert!(hi / lo < 1.5, "{prof:?}");
    assert!(decay_profile(&g, &vec![0.0; g.len()], [0.2, 0.1], 3.0, 0.5, &radii).unwrap().iter().all(|(_, v)| *v == 0.0));
}
