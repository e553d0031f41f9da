//! Classifications do not depend on the choice of density, null field,
//! curvature sphere lifts, or on Moebius transformations applied after
//! steering.

use liefront::classify::{criteria_lie, criteria_rank1, density_det3, null_field, singular_index, Tolerances};
use liefront::curvature::sphere_from_curvature;
use liefront::jets::{coeff_len, Jet2};
use liefront::legendre::{apply_mat, scale6};
use liefront::sampling;
use liefront::transform::random_stabilizer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `exp` of a random polynomial jet: a positive smooth function.
fn positive_jet(rng: &mut impl Rng, order: usize) -> Jet2 {
    let c = (0..coeff_len(order)).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Jet2::from_coeffs(order, c).exp()
}

/// A random nonvanishing scalar jet of random sign.
fn nonvanishing_jet(rng: &mut impl Rng, order: usize) -> Jet2 {
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    positive_jet(rng, order) * sign
}

#[test]
fn density_and_null_field_rescaling() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..100 {
        let inst = sampling::random_instance(&mut rng);
        let front = inst.problem().front_at(inst.point.0, inst.point.1, 7).unwrap();
        let lambda = density_det3(&front.f, &front.t).unwrap();
        let x = null_field(&front.f).unwrap();
        let (base, _) = criteria_rank1(&lambda, &x, &tol).unwrap();
        for _ in 0..5 {
            let g = positive_jet(&mut rng, lambda.order());
            let h = nonvanishing_jet(&mut rng, x[0].order());
            let scaled = &lambda * &g;
            let xs = [&x[0] * &h, &x[1] * &h];
            let (c, m) = criteria_rank1(&scaled, &xs, &tol).unwrap();
            assert_eq!(c, base, "{:?} at {:?}: {m:?}", inst.surface.components, inst.point);
        }
    }
}

#[test]
fn curvature_sphere_lift_rescaling() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let inst = sampling::random_instance(&mut rng);
        let (lift, pd) = (&inst.geometry.lift, &inst.geometry.pd);
        let i = singular_index(lift, pd, &inst.matrix, &tol).unwrap();
        let sigmas = [1, 2].map(|k| apply_mat(&inst.matrix, &sphere_from_curvature(lift, pd.kappa(k))));
        let x = pd.dir(i).unwrap();
        let (base, _) = criteria_lie(&sigmas[i - 1], &sigmas[2 - i], x, &tol).unwrap();
        let order = sigmas[0][0].order();
        for _ in 0..5 {
            let s1 = scale6(&sigmas[i - 1], &nonvanishing_jet(&mut rng, order));
            let s2 = scale6(&sigmas[2 - i], &nonvanishing_jet(&mut rng, order));
            let h = nonvanishing_jet(&mut rng, x[0].order());
            let xs = [&x[0] * &h, &x[1] * &h];
            let (c, m) = criteria_lie(&s1, &s2, &xs, &tol).unwrap();
            assert_eq!(c, base, "{:?} at {:?}: {m:?}", inst.surface.components, inst.point);
        }
    }
}

#[test]
fn stabilizer_compositions_keep_the_class() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..30 {
        let inst = sampling::random_instance(&mut rng);
        let (u, v) = inst.point;
        let base = inst.problem().classify_at(u, v).unwrap().class;
        let mut b = liefront::minkowski::Mat6::identity();
        for _ in 0..10 {
            b = random_stabilizer(&mut rng) * b;
            let mut p = inst.problem();
            p.matrix = Some(b * inst.matrix);
            let r = p.classify_at(u, v).unwrap();
            assert_eq!(r.class, base, "{:?} at {:?}: {:?}", inst.surface.components, inst.point, r.margins);
        }
    }
}
