//! The 6x6 determinant density on the lift against the 3x3 density on the
//! surface. With the column order `(F_u, F_v, T, F, q, p)` and our metric
//! the two differ by the constant sign `-1`.

use liefront::classify::{density_det3, density_det6};
use liefront::jets::Jet2;
use liefront::legendre::{compute_normal, lift};
use liefront::models;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest coefficient deviation of `det6 + det3` through degree 3,
/// relative to the largest coefficient of `det3`.
fn deviation(s: &liefront::surface_dsl::SurfaceExpr, u: f64, v: f64) -> f64 {
    // the computed normal and the lift derivative each cost one order
    let j = s.eval_jet(u, v, 5).unwrap();
    let t = compute_normal(&j.f).unwrap();
    let d3 = density_det3(&j.f, &t).unwrap();
    let d6 = density_det6(&lift(&j.f, &t, (u, v)).unwrap()).unwrap();
    assert!(d3.order() >= 3 && d6.order() >= 3);
    let sum: Jet2 = &d6.truncate(3) + &d3.truncate(3);
    let scale = d3.max_abs_in_degrees(0, 3).max(f64::MIN_POSITIVE);
    sum.max_abs_in_degrees(0, 3) / scale
}

#[test]
fn hundred_surfaces_ten_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let s = models::random_surface(&mut rng);
        for _ in 0..10 {
            let (u, v) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let d = deviation(&s, u, v);
            assert!(d <= 1e-9, "{:?} at ({u}, {v}): {d:e}", s.components);
            worst = worst.max(d);
        }
    }
    eprintln!("worst relative deviation {worst:.2e}");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]
    #[test]
    fn identity_holds_for_any_seed(seed in any::<u64>(), u in -1.0f64..1.0, v in -1.0f64..1.0) {
        let s = models::random_surface(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(deviation(&s, u, v) <= 1e-9);
    }
}
