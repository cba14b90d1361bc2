use std::f64::consts::PI;

use approx::assert_relative_eq;
use nonscatter::geometry::Domain;
use nonscatter::grid::{cell_fraction, Grid2, RealField};
use nonscatter::scatter::{
    far_field, lippmann_schwinger_solve, optical_theorem_defect, scattered_at, PlaneWave,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ellipse_potential(n: usize) -> RealField {
    let d = Domain::ellipse([0.2, -0.1], 0.8, 0.5).unwrap();
    let g = Grid2::centered([0.0, 0.0], 1.2, n).unwrap();
    cell_fraction(&d, &g, 8).map(|f| 0.7 * f)
}

#[test]
fn scattered_field_approaches_far_field_asymptotics() {
    let (lambda, q) = (1.5, ellipse_potential(64));
    let pw = PlaneWave::new(lambda, 0.3);
    let (uq, _) = lippmann_schwinger_solve(&q, lambda, &pw).unwrap();
    let ff = far_field(&q, &uq, lambda, 64).unwrap();
    let r = 2000.0;
    for k in [0, 11, 40] {
        let t = ff.angles[k];
        let us = scattered_at(&q, &uq, lambda, [r * t.cos(), r * t.sin()]).unwrap();
        let asym = Complex64::from_polar(1.0 / r.sqrt(), lambda * r) * ff.values[k];
        assert!((us - asym).norm() <= 2e-3 * asym.norm(), "direction {k}: {us} vs {asym}");
    }
}

#[test]
fn optical_theorem_holds_for_real_potential() {
    let (lambda, q) = (1.0, ellipse_potential(64));
    let (uq, _) = lippmann_schwinger_solve(&q, lambda, &PlaneWave::new(lambda, 0.0)).unwrap();
    let ff = far_field(&q, &uq, lambda, 256).unwrap();
    assert!(optical_theorem_defect(&ff, 0.0) < 1e-2);
}

#[test]
fn far_field_reciprocity() {
    // u∞(x̂; d) = u∞(−d; −x̂)
    let (lambda, q) = (2.0, ellipse_potential(48));
    let k = 64;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..3 {
        let (a, b) = (rng.random_range(0..k), rng.random_range(0..k));
        let ang = |i: usize| 2.0 * PI * i as f64 / k as f64;
        let (u1, _) = lippmann_schwinger_solve(&q, lambda, &PlaneWave::new(lambda, ang(a))).unwrap();
        let (u2, _) = lippmann_schwinger_solve(&q, lambda, &PlaneWave::new(lambda, ang((b + k / 2) % k))).unwrap();
        let f1 = far_field(&q, &u1, lambda, k).unwrap().values[b];
        let f2 = far_field(&q, &u2, lambda, k).unwrap().values[(a + k / 2) % k];
        assert_relative_eq!(f1.re, f2.re, epsilon = 1e-6 * f1.norm());
        assert_relative_eq!(f1.im, f2.im, epsilon = 1e-6 * f1.norm());
    }
}
