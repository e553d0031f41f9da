//! Euclidean Legendre lift of a surface with unit normal, and projection of
//! a (transformed) isotropic plane back to Euclidean data.
//!
//! ```text
//! F = ((1 + <f,f>)/2, (1 - <f,f>)/2, f, 0)      point sphere of f
//! T = (<f,t>, -<f,t>, t, 1)                     tangent plane of (f, t)
//! ```
//!
//! `(F, p) = 0`, `(F, q) = -1`, `(T, p) = -1`, `(T, q) = 0`.

use crate::error::{Error, Result};
use crate::jets::Jet2;
use crate::linalg::singular_values_2col;
use crate::minkowski::{Mat6, Vec6, P, Q, SIGNS};

pub type JetVec3 = [Jet2; 3];
pub type JetVec6 = [Jet2; 6];

/// Tolerance on `|t| = 1` and `<df, t> = 0` accepted by [`lift`].
pub const LIFT_TOL: f64 = 1e-8;
/// Relative cutoff on `|det B|` below which projection is refused.
pub const PROJECTION_TOL: f64 = 1e-10;
/// Relative cutoff on `|f_u x f_v|` below which no normal is computed.
pub const RANK_TOL: f64 = 1e-8;

pub fn dot_jet3(a: &JetVec3, b: &JetVec3) -> Jet2 {
    &(&(&a[0] * &b[0]) + &(&a[1] * &b[1])) + &(&a[2] * &b[2])
}

pub fn cross_jet3(a: &JetVec3, b: &JetVec3) -> JetVec3 {
    [&(&a[1] * &b[2]) - &(&a[2] * &b[1]), &(&a[2] * &b[0]) - &(&a[0] * &b[2]), &(&a[0] * &b[1]) - &(&a[1] * &b[0])]
}

pub fn du3(a: &JetVec3) -> Result<JetVec3> {
    Ok([a[0].du()?, a[1].du()?, a[2].du()?])
}

pub fn dv3(a: &JetVec3) -> Result<JetVec3> {
    Ok([a[0].dv()?, a[1].dv()?, a[2].dv()?])
}

pub fn value3(a: &JetVec3) -> [f64; 3] {
    [a[0].value(), a[1].value(), a[2].value()]
}

/// `d^(i+j) a / du^i dv^j` at the base point.
pub fn partial3(a: &JetVec3, i: usize, j: usize) -> [f64; 3] {
    [a[0].partial(i, j), a[1].partial(i, j), a[2].partial(i, j)]
}

/// `(a, b)` as a jet.
pub fn inner_jet(a: &JetVec6, b: &JetVec6) -> Jet2 {
    let mut acc = &(&a[0] * &b[0]) * SIGNS[0];
    for k in 1..6 {
        acc += &(&(&a[k] * &b[k]) * SIGNS[k]);
    }
    acc
}

/// `(a, c)` for a constant vector `c`.
pub fn inner_jet_const(a: &JetVec6, c: &Vec6) -> Jet2 {
    let mut acc = &a[0] * (SIGNS[0] * c[0]);
    for k in 1..6 {
        acc += &(&a[k] * (SIGNS[k] * c[k]));
    }
    acc
}

pub fn apply_mat(m: &Mat6, x: &JetVec6) -> JetVec6 {
    std::array::from_fn(|i| {
        let mut acc = &x[0] * m.0[i][0];
        for j in 1..6 {
            acc += &(&x[j] * m.0[i][j]);
        }
        acc
    })
}

pub fn scale6(x: &JetVec6, g: &Jet2) -> JetVec6 {
    std::array::from_fn(|k| &x[k] * g)
}

pub fn add6(a: &JetVec6, b: &JetVec6) -> JetVec6 {
    std::array::from_fn(|k| &a[k] + &b[k])
}

pub fn value6(x: &JetVec6) -> Vec6 {
    Vec6(std::array::from_fn(|k| x[k].value()))
}

pub fn partial6(x: &JetVec6, i: usize, j: usize) -> Vec6 {
    Vec6(std::array::from_fn(|k| x[k].partial(i, j)))
}

pub fn du6(x: &JetVec6) -> Result<JetVec6> {
    let v: Vec<Jet2> = x.iter().map(|c| c.du()).collect::<Result<_>>()?;
    Ok(v.try_into().expect("six components"))
}

pub fn dv6(x: &JetVec6) -> Result<JetVec6> {
    let v: Vec<Jet2> = x.iter().map(|c| c.dv()).collect::<Result<_>>()?;
    Ok(v.try_into().expect("six components"))
}

pub fn const6(v: &Vec6, order: usize) -> JetVec6 {
    std::array::from_fn(|k| Jet2::constant(v[k], order))
}

/// Jets of the point sphere `F` and tangent plane `T` of a surface.
#[derive(Clone, Debug)]
pub struct LiftPair {
    pub point_sphere: JetVec6,
    pub tangent_plane: JetVec6,
    pub base: (f64, f64),
}

impl LiftPair {
    pub fn order(&self) -> usize {
        self.point_sphere[0].order().min(self.tangent_plane[0].order())
    }
}

fn df_scale(f: &JetVec3) -> f64 {
    1.0 + (0..3).map(|k| f[k].partial(1, 0).abs().max(f[k].partial(0, 1).abs())).fold(0.0, f64::max)
}

/// Builds `(F, T)` from jets of `f` and its unit normal `t`.
pub fn lift(f: &JetVec3, t: &JetVec3, base: (f64, f64)) -> Result<LiftPair> {
    let tn = dot_jet3(t, t).value().sqrt();
    if (tn - 1.0).abs() > LIFT_TOL {
        return Err(Error::NotUnitNormal(tn));
    }
    let tv = value3(t);
    let scale = df_scale(f);
    for (a, b) in [(1, 0), (0, 1)] {
        let d = partial3(f, a, b);
        let r = d[0] * tv[0] + d[1] * tv[1] + d[2] * tv[2];
        if r.abs() > LIFT_TOL * scale {
            return Err(Error::NotIsotropic(r));
        }
    }
    let ff = dot_jet3(f, f);
    let ft = dot_jet3(f, t);
    let order = ff.order().min(ft.order());
    let one = Jet2::constant(1.0, order);
    let half = |j: Jet2| &j * 0.5;
    let point_sphere = [
        half(&one + &ff),
        half(&one - &ff),
        f[0].truncate(order),
        f[1].truncate(order),
        f[2].truncate(order),
        Jet2::zero(order),
    ];
    let tangent_plane = [ft.clone(), -&ft, t[0].truncate(order), t[1].truncate(order), t[2].truncate(order), one];
    Ok(LiftPair { point_sphere, tangent_plane, base })
}

/// `normalize(f_u x f_v)`; the returned jets have one order less than `f`.
pub fn compute_normal(f: &JetVec3) -> Result<JetVec3> {
    let fu = du3(f)?;
    let fv = dv3(f)?;
    let n = cross_jet3(&fu, &fv);
    let n2 = dot_jet3(&n, &n);
    let scale = dot_jet3(&fu, &fu).value() + dot_jet3(&fv, &fv).value();
    if n2.value().sqrt() <= RANK_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::RankDeficient);
    }
    let inv = n2.powf(-0.5).map_err(|_| Error::RankDeficient)?;
    Ok([&n[0] * &inv, &n[1] * &inv, &n[2] * &inv])
}

/// Lifts a surface, using the supplied normal when present.
pub fn lift_surface(f: &JetVec3, normal: Option<&JetVec3>, base: (f64, f64)) -> Result<LiftPair> {
    match normal {
        Some(t) => lift(f, t, base),
        None => lift(f, &compute_normal(f)?, base),
    }
}

/// Euclidean data recovered from an isotropic plane `span{sigma1, sigma2}`.
#[derive(Clone, Debug)]
pub struct ProjectionResult {
    pub fhat: JetVec3,
    pub that: JetVec3,
    pub point_sphere: JetVec6,
    pub tangent_plane: JetVec6,
    pub det_b: f64,
}

/// `F^ = a s1 + b s2`, `T^ = c s1 + d s2` normalized against `p`, `q`.
pub fn project(sigma1: &JetVec6, sigma2: &JetVec6) -> Result<ProjectionResult> {
    let p1 = inner_jet_const(sigma1, &P);
    let p2 = inner_jet_const(sigma2, &P);
    let q1 = inner_jet_const(sigma1, &Q);
    let q2 = inner_jet_const(sigma2, &Q);
    let det = &(&p1 * &q2) - &(&p2 * &q1);
    let norm = [&p1, &p2, &q1, &q2].iter().map(|j| j.value() * j.value()).sum::<f64>().sqrt();
    if det.value().abs() < PROJECTION_TOL * norm || det.value() == 0.0 {
        return Err(Error::ProjectionSingular { det: det.value(), norm });
    }
    let inv = det.recip()?;
    let a = &p2 * &inv;
    let b = -&(&p1 * &inv);
    let c = -&(&q2 * &inv);
    let d = &q1 * &inv;
    let point_sphere = add6(&scale6(sigma1, &a), &scale6(sigma2, &b));
    let tangent_plane = add6(&scale6(sigma1, &c), &scale6(sigma2, &d));
    let fhat = [point_sphere[2].clone(), point_sphere[3].clone(), point_sphere[4].clone()];
    let that = [tangent_plane[2].clone(), tangent_plane[3].clone(), tangent_plane[4].clone()];
    Ok(ProjectionResult { fhat, that, point_sphere, tangent_plane, det_b: det.value() })
}

/// Smallest singular value of `X -> (d_X F, d_X T)`; positive iff the
/// Legendre lift is immersed at the base point.
pub fn immersion_margin(l: &LiftPair) -> f64 {
    let col = |a, b| -> Vec<f64> {
        let mut v = partial6(&l.point_sphere, a, b).0.to_vec();
        v.extend_from_slice(&partial6(&l.tangent_plane, a, b).0);
        v
    };
    singular_values_2col(&col(1, 0), &col(0, 1)).1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::inner;
    use crate::surface_dsl::SurfaceExpr;

    fn const3(v: [f64; 3], order: usize) -> JetVec3 {
        v.map(|c| Jet2::constant(c, order))
    }

    fn assert_vec(a: Vec6, b: [f64; 6], tol: f64) {
        assert!((a - Vec6(b)).max_abs() <= tol, "{a:?} vs {b:?}");
    }

    #[test]
    fn lift_constant_examples() {
        let l = lift(&const3([0.0; 3], 2), &const3([0.0, 0.0, 1.0], 2), (0.0, 0.0)).unwrap();
        assert_vec(value6(&l.point_sphere), [0.5, 0.5, 0.0, 0.0, 0.0, 0.0], 0.0);
        assert_vec(value6(&l.tangent_plane), [0.0, 0.0, 0.0, 0.0, 1.0, 1.0], 0.0);
        let l = lift(&const3([1.0, 0.0, 0.0], 2), &const3([1.0, 0.0, 0.0], 2), (0.0, 0.0)).unwrap();
        assert_vec(value6(&l.point_sphere), [1.0, 0.0, 1.0, 0.0, 0.0, 0.0], 0.0);
        assert_vec(value6(&l.tangent_plane), [1.0, -1.0, 1.0, 0.0, 0.0, 1.0], 0.0);
    }

    #[test]
    fn lift_of_parabolic_cylinder() {
        let s = SurfaceExpr::from_strs(["u", "u^2", "v"], None).unwrap();
        let j = s.eval_jet(0.0, 0.0, 5).unwrap();
        let t = compute_normal(&j.f).unwrap();
        assert_eq!(value3(&t), [0.0, -1.0, 0.0]);
        let l = lift(&j.f, &t, (0.0, 0.0)).unwrap();
        assert_vec(value6(&l.point_sphere), [0.5, 0.5, 0.0, 0.0, 0.0, 0.0], 1e-15);
        assert_vec(value6(&l.tangent_plane), [0.0, 0.0, 0.0, -1.0, 0.0, 1.0], 1e-15);
    }

    #[test]
    fn lift_rejects_bad_normals() {
        let s = SurfaceExpr::from_strs(["u", "v", "0"], None).unwrap();
        let j = s.eval_jet(0.0, 0.0, 3).unwrap();
        assert!(matches!(lift(&j.f, &const3([0.0, 0.0, 2.0], 3), (0.0, 0.0)), Err(Error::NotUnitNormal(_))));
        assert!(matches!(lift(&j.f, &const3([1.0, 0.0, 0.0], 3), (0.0, 0.0)), Err(Error::NotIsotropic(_))));
    }

    #[test]
    fn plane_normal() {
        let s = SurfaceExpr::from_strs(["u", "v", "0"], None).unwrap();
        let j = s.eval_jet(0.3, 0.1, 3).unwrap();
        assert_eq!(value3(&compute_normal(&j.f).unwrap()), [0.0, 0.0, 1.0]);
    }

    #[test]
    fn cuspidal_edge_needs_supplied_normal() {
        let s =
            SurfaceExpr::from_strs(["u", "v^2", "v^3"], Some(["0", "-3*v/sqrt(9*v^2+4)", "2/sqrt(9*v^2+4)"])).unwrap();
        let j = s.eval_jet(0.0, 0.0, 5).unwrap();
        assert_eq!(compute_normal(&j.f).unwrap_err(), Error::RankDeficient);
        let l = lift_surface(&j.f, j.normal.as_ref(), (0.0, 0.0)).unwrap();
        let f_v = partial6(&l.point_sphere, 0, 1);
        assert!(inner(&f_v, &value6(&l.tangent_plane)).abs() < 1e-15);
    }

    #[test]
    fn lift_identities_hold_as_jets() {
        let s = SurfaceExpr::from_strs(["u + v^2/3", "sin(v) + u*v", "exp(u/2)"], None).unwrap();
        let j = s.eval_jet(0.2, -0.4, 6).unwrap();
        let l = lift_surface(&j.f, None, (0.2, -0.4)).unwrap();
        let (ff, tt) = (&l.point_sphere, &l.tangent_plane);
        let small = |x: Jet2, target: f64| {
            let x = x.add_scalar(-target);
            x.coeffs().iter().all(|c| c.abs() <= 1e-10)
        };
        assert!(small(inner_jet(ff, ff), 0.0));
        assert!(small(inner_jet(tt, tt), 0.0));
        assert!(small(inner_jet(ff, tt), 0.0));
        assert!(small(inner_jet_const(ff, &P), 0.0));
        assert!(small(inner_jet_const(ff, &Q), -1.0));
        assert!(small(inner_jet_const(tt, &P), -1.0));
        assert!(small(inner_jet_const(tt, &Q), 0.0));
        assert!(small(inner_jet(&du6(ff).unwrap(), tt), 0.0));
        assert!(small(inner_jet(&dv6(ff).unwrap(), tt), 0.0));
        assert!(immersion_margin(&l) > 0.1);
    }

    #[test]
    fn projection_round_trip_and_swap() {
        let s = SurfaceExpr::from_strs(["u", "v", "u*v + v^3"], None).unwrap();
        let j = s.eval_jet(0.1, 0.2, 5).unwrap();
        let t = compute_normal(&j.f).unwrap();
        let l = lift(&j.f, &t, (0.1, 0.2)).unwrap();
        for (a, b) in [(&l.point_sphere, &l.tangent_plane), (&l.tangent_plane, &l.point_sphere)] {
            let pr = project(a, b).unwrap();
            for k in 0..3 {
                let d = &pr.fhat[k] - &j.f[k];
                assert!(d.coeffs().iter().all(|c| c.abs() < 1e-12));
                let d = &pr.that[k] - &t[k];
                assert!(d.coeffs().iter().all(|c| c.abs() < 1e-12));
            }
        }
    }

    #[test]
    fn projection_singular_is_reported() {
        let s = SurfaceExpr::from_strs(["u", "v", "0"], None).unwrap();
        let j = s.eval_jet(0.0, 0.0, 3).unwrap();
        let l = lift_surface(&j.f, None, (0.0, 0.0)).unwrap();
        let r = project(&l.point_sphere, &l.point_sphere);
        assert!(matches!(r, Err(Error::ProjectionSingular { .. })));
    }

    mod properties {
        use super::*;
        use crate::models::random_surface;
        use proptest::prelude::*;
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;

        fn max_dev(x: &Jet2, target: f64) -> f64 {
            x.add_scalar(-target).coeffs().iter().fold(0.0, |m, c| m.max(c.abs()))
        }

        proptest! {
            #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]
            /// The lift is null, isotropic and normalised against p and q,
            /// and projecting it returns the surface and its normal.
            #[test]
            fn lift_and_projection(seed in any::<u64>(), u in -1.0f64..1.0, v in -1.0f64..1.0) {
                let s = random_surface(&mut ChaCha8Rng::seed_from_u64(seed));
                let j = s.eval_jet(u, v, 5).unwrap();
                let t = compute_normal(&j.f).unwrap();
                let l = lift(&j.f, &t, (u, v)).unwrap();
                let (ff, tt) = (&l.point_sphere, &l.tangent_plane);
                let tol = 1e-9 * (1.0 + j.f.iter().map(|c| c.max_abs_in_degrees(0, 4)).fold(0.0, f64::max)).powi(2);
                prop_assert!(max_dev(&inner_jet(ff, ff), 0.0) <= tol);
                prop_assert!(max_dev(&inner_jet(tt, tt), 0.0) <= tol);
                prop_assert!(max_dev(&inner_jet(ff, tt), 0.0) <= tol);
                prop_assert!(max_dev(&inner_jet_const(ff, &Q), -1.0) <= tol);
                prop_assert!(max_dev(&inner_jet_const(tt, &P), -1.0) <= tol);
                prop_assert!(max_dev(&inner_jet(&du6(ff).unwrap(), tt), 0.0) <= tol);
                prop_assert!(max_dev(&inner_jet(&dv6(ff).unwrap(), tt), 0.0) <= tol);
                let pr = project(ff, tt).unwrap();
                for k in 0..3 {
                    prop_assert!(max_dev(&(&pr.fhat[k] - &j.f[k].truncate(pr.fhat[k].order())), 0.0) <= tol);
                    prop_assert!(max_dev(&(&pr.that[k] - &t[k].truncate(pr.that[k].order())), 0.0) <= tol);
                }
            }
        }
    }
}
