//! Functions proportional to the signed area density of a front.

use serde::{Deserialize, Serialize};

use crate::curvature::{sphere_from_curvature, PrincipalData};
use crate::error::{Error, Result};
use crate::jets::Jet2;
use crate::legendre::{apply_mat, cross_jet3, dot_jet3, du3, du6, dv3, dv6, inner_jet_const, JetVec3, LiftPair};
use crate::minkowski::{Mat6, P, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DensitySource {
    /// `det(f_u, f_v, t)`.
    Det3,
    /// `det(F_u, F_v, T, F, q, p)`; equals `-Det3` identically.
    Det6,
    /// `(A sigma1, p)(A sigma2, p)`.
    LiftProduct,
}

#[derive(Clone, Debug)]
pub struct DensityJet {
    pub lambda: Jet2,
    pub source: DensitySource,
}

pub fn density_det3(f: &JetVec3, t: &JetVec3) -> Result<Jet2> {
    let n = cross_jet3(&du3(f)?, &dv3(f)?);
    Ok(dot_jet3(&n, t))
}

/// Determinant of a square matrix of jets by cofactor expansion along the
/// first column.
fn det_jets(m: &[Vec<Jet2>]) -> Jet2 {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let order = m[0][0].order();
    let mut acc = Jet2::zero(order);
    for r in 0..n {
        if m[r][0].coeffs().iter().all(|c| *c == 0.0) {
            continue;
        }
        let minor: Vec<Vec<Jet2>> = (0..n).filter(|&i| i != r).map(|i| m[i][1..].to_vec()).collect();
        let term = &m[r][0] * &det_jets(&minor);
        if r % 2 == 0 {
            acc += &term;
        } else {
            acc = &acc - &term;
        }
    }
    acc
}

pub fn density_det6(lift: &LiftPair) -> Result<Jet2> {
    let fu = du6(&lift.point_sphere)?;
    let fv = dv6(&lift.point_sphere)?;
    let order = fu[0].order();
    let cols = [
        fu.to_vec(),
        fv.to_vec(),
        lift.tangent_plane.iter().map(|j| j.truncate(order)).collect(),
        lift.point_sphere.iter().map(|j| j.truncate(order)).collect(),
        Q.0.iter().map(|&c| Jet2::constant(c, order)).collect(),
        P.0.iter().map(|&c| Jet2::constant(c, order)).collect::<Vec<_>>(),
    ];
    let rows: Vec<Vec<Jet2>> = (0..6).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    Ok(det_jets(&rows))
}

/// `(A sigma1, p)(A sigma2, p)` for the curvature spheres of a
/// non-umbilic surface.
pub fn density_lift_product(lift: &LiftPair, pd: &PrincipalData, a: &Mat6) -> Result<Jet2> {
    if pd.umbilic {
        return Err(Error::Umbilic);
    }
    let s1 = apply_mat(a, &sphere_from_curvature(lift, &pd.kappa1));
    let s2 = apply_mat(a, &sphere_from_curvature(lift, &pd.kappa2));
    Ok(&inner_jet_const(&s1, &P) * &inner_jet_const(&s2, &P))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::principal_data;
    use crate::legendre::{compute_normal, lift};
    use crate::surface_dsl::SurfaceExpr;

    #[test]
    fn plane_density_is_one() {
        let s = SurfaceExpr::from_strs(["u", "v", "0"], Some(["0", "0", "1"])).unwrap();
        let j = s.eval_jet(0.3, -0.2, 4).unwrap();
        let l = density_det3(&j.f, j.normal.as_ref().unwrap()).unwrap();
        assert_eq!(l.value(), 1.0);
        assert!(l.max_abs_in_degrees(1, 3) == 0.0);
    }

    #[test]
    fn cuspidal_edge_density() {
        let s =
            SurfaceExpr::from_strs(["u", "v^2", "v^3"], Some(["0", "-3*v/sqrt(9*v^2+4)", "2/sqrt(9*v^2+4)"])).unwrap();
        for v0 in [0.0, 0.4, -0.7] {
            let j = s.eval_jet(0.1, v0, 5).unwrap();
            let l = density_det3(&j.f, j.normal.as_ref().unwrap()).unwrap();
            let exact = |v: f64| v * (4.0 + 9.0 * v * v) / (9.0 * v * v + 4.0).sqrt();
            assert!((l.value() - exact(v0)).abs() < 1e-14);
            let h = 1e-5;
            let fd = (exact(v0 + h) - exact(v0 - h)) / (2.0 * h);
            assert!((l.partial(0, 1) - fd).abs() < 1e-8);
        }
        let j = s.eval_jet(0.0, 0.0, 5).unwrap();
        let l = density_det3(&j.f, j.normal.as_ref().unwrap()).unwrap();
        assert_eq!(l.partial(0, 1), 2.0);
    }

    #[test]
    fn det6_is_minus_det3() {
        let s = SurfaceExpr::from_strs(["u + v^2/3", "sin(v) + u*v", "exp(u/2) - v^2"], None).unwrap();
        let j = s.eval_jet(0.2, 0.1, 6).unwrap();
        let t = compute_normal(&j.f).unwrap();
        let l = lift(&j.f, &t, (0.2, 0.1)).unwrap();
        let d3 = density_det3(&j.f, &t).unwrap();
        let d6 = density_det6(&l).unwrap();
        for (a, b) in d6.coeffs().iter().zip(d3.coeffs()) {
            assert!((a + b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn lift_product_is_one_without_transformation() {
        // (T + k F, p) = -1 for both spheres when A is the identity
        let s = SurfaceExpr::from_strs(["u", "v", "u^2 + 2*v^2"], None).unwrap();
        let j = s.eval_jet(0.1, 0.1, 5).unwrap();
        let t = compute_normal(&j.f).unwrap();
        let l = lift(&j.f, &t, (0.1, 0.1)).unwrap();
        let pd = principal_data(&j.f, &t).unwrap();
        let lp = density_lift_product(&l, &pd, &Mat6::identity()).unwrap();
        assert!((lp.value() - 1.0).abs() < 1e-14);
    }
}
