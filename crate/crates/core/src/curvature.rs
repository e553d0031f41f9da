//! Principal curvatures and directions as jets, curvature-sphere lifts
//! `T + kappa F`, and the cubic form at umbilics.
//!
//! Sign convention: `d_X t + kappa d_X f = 0` along a principal direction
//! `X`, so `kappa` are the eigenvalues of `I^{-1} II` with
//! `II_ij = <f_ij, t>`.

use crate::error::{Error, Result};
use crate::jets::Jet2;
use crate::legendre::{add6, dot_jet3, du3, dv3, partial3, partial6, scale6, value6, JetVec3, JetVec6, LiftPair};
use crate::minkowski::{inner, Vec6, P, Q};

/// Relative cutoff on `|kappa1 - kappa2|` for umbilic points.
pub const UMBILIC_TOL: f64 = 1e-8;
/// Relative cutoff on `EG - F^2` below which `f` is not immersed.
pub const IMMERSION_TOL: f64 = 1e-12;

/// A vector field in coordinates, `X = x[0] d/du + x[1] d/dv`.
pub type Field = [Jet2; 2];

#[derive(Clone, Debug)]
pub struct PrincipalData {
    /// Larger principal curvature at the base point.
    pub kappa1: Jet2,
    pub kappa2: Jet2,
    /// Unit principal fields, absent at umbilics.
    pub dir1: Option<Field>,
    pub dir2: Option<Field>,
    pub umbilic: bool,
    /// `|kappa1 - kappa2|` at the base point.
    pub umbilic_margin: f64,
    /// `(E, F, G)`.
    pub first_form: [Jet2; 3],
}

impl PrincipalData {
    /// Curvature with index `i` in `{1, 2}`.
    pub fn kappa(&self, i: usize) -> &Jet2 {
        if i == 1 {
            &self.kappa1
        } else {
            &self.kappa2
        }
    }

    pub fn dir(&self, i: usize) -> Result<&Field> {
        let d = if i == 1 { &self.dir1 } else { &self.dir2 };
        d.as_ref().ok_or(Error::UmbilicDirectionUndefined)
    }
}

fn first_and_second_forms(f: &JetVec3, t: &JetVec3) -> Result<([Jet2; 3], [Jet2; 3])> {
    let fu = du3(f)?;
    let fv = dv3(f)?;
    let fuu = du3(&fu)?;
    let fuv = dv3(&fu)?;
    let fvv = dv3(&fv)?;
    let first = [dot_jet3(&fu, &fu), dot_jet3(&fu, &fv), dot_jet3(&fv, &fv)];
    let second = [dot_jet3(&fuu, t), dot_jet3(&fuv, t), dot_jet3(&fvv, t)];
    Ok((first, second))
}

/// Eigenvector of `w` for eigenvalue `k`, from whichever closed form is
/// better conditioned at the base point.
fn eigenvector(w: &[[Jet2; 2]; 2], k: &Jet2) -> Field {
    let a = [w[0][1].clone(), k - &w[0][0]];
    let b = [k - &w[1][1], w[1][0].clone()];
    let size = |x: &Field| x[0].value().hypot(x[1].value());
    if size(&a) >= size(&b) {
        a
    } else {
        b
    }
}

/// Scales `x` to unit length in the metric `(E, F, G)` and fixes its sign
/// so the larger coordinate component is positive at the base point.
pub fn normalize_field(x: &Field, first: &[Jet2; 3]) -> Result<Field> {
    let [e, f, g] = first;
    let n2 = &(&(e * &(&x[0] * &x[0])) + &(&(f * &(&x[0] * &x[1])) * 2.0)) + &(g * &(&x[1] * &x[1]));
    let inv = n2.powf(-0.5).map_err(|_| Error::NotImmersed)?;
    let sign = if x[0].value().abs() >= x[1].value().abs() { x[0].value().signum() } else { x[1].value().signum() };
    let inv = &inv * sign;
    Ok([&x[0] * &inv, &x[1] * &inv])
}

/// Principal curvatures and fields of `f` with unit normal `t`.
pub fn principal_data(f: &JetVec3, t: &JetVec3) -> Result<PrincipalData> {
    let (first, second) = first_and_second_forms(f, t)?;
    let [e, ff, g] = &first;
    let [l, m, n] = &second;
    let det = &(e * g) - &(ff * ff);
    let scale = e.value() * g.value();
    if det.value() <= IMMERSION_TOL * scale.max(f64::MIN_POSITIVE) || det.value() <= 0.0 {
        return Err(Error::NotImmersed);
    }
    let inv = det.recip()?;
    // W = I^{-1} II
    let w = [
        [&(&(g * l) - &(ff * m)) * &inv, &(&(g * m) - &(ff * n)) * &inv],
        [&(&(e * m) - &(ff * l)) * &inv, &(&(e * n) - &(ff * m)) * &inv],
    ];
    let half_tr = &(&w[0][0] + &w[1][1]) * 0.5;
    let half_diff = &(&w[0][0] - &w[1][1]) * 0.5;
    let disc = &(&half_diff * &half_diff) + &(&w[0][1] * &w[1][0]);
    let root_val = disc.value().max(0.0).sqrt();
    let k1v = half_tr.value() + root_val;
    let k2v = half_tr.value() - root_val;
    let margin = 2.0 * root_val;
    let umbilic = margin <= UMBILIC_TOL * (1.0 + k1v.abs() + k2v.abs());
    if umbilic {
        return Ok(PrincipalData {
            kappa1: half_tr.clone(),
            kappa2: half_tr,
            dir1: None,
            dir2: None,
            umbilic,
            umbilic_margin: margin,
            first_form: first,
        });
    }
    let root = disc.sqrt()?;
    let kappa1 = &half_tr + &root;
    let kappa2 = &half_tr - &root;
    let dir1 = normalize_field(&eigenvector(&w, &kappa1), &first)?;
    let dir2 = normalize_field(&eigenvector(&w, &kappa2), &first)?;
    Ok(PrincipalData {
        kappa1,
        kappa2,
        dir1: Some(dir1),
        dir2: Some(dir2),
        umbilic,
        umbilic_margin: margin,
        first_form: first,
    })
}

/// Value of `d_X y` at the base point for a constant-at-base direction.
pub fn directional_at_base6(y: &JetVec6, x: [f64; 2]) -> Vec6 {
    partial6(y, 1, 0) * x[0] + partial6(y, 0, 1) * x[1]
}

/// `max |d_X t + kappa d_X f|` at the base point.
pub fn rodrigues_residual(f: &JetVec3, t: &JetVec3, kappa: f64, x: [f64; 2]) -> f64 {
    let fu = partial3(f, 1, 0);
    let fv = partial3(f, 0, 1);
    let tu = partial3(t, 1, 0);
    let tv = partial3(t, 0, 1);
    (0..3).map(|k| (x[0] * tu[k] + x[1] * tv[k] + kappa * (x[0] * fu[k] + x[1] * fv[k])).abs()).fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct CurvatureSphereLift {
    pub sigma: JetVec6,
    pub index: usize,
}

/// `sigma = T + kappa F` with the given curvature jet.
pub fn sphere_from_curvature(lift: &LiftPair, kappa: &Jet2) -> JetVec6 {
    add6(&lift.tangent_plane, &scale6(&lift.point_sphere, kappa))
}

pub fn curvature_sphere_lift(lift: &LiftPair, pd: &PrincipalData, index: usize) -> Result<CurvatureSphereLift> {
    if pd.umbilic {
        return Err(Error::UmbilicAmbiguity);
    }
    Ok(CurvatureSphereLift { sigma: sphere_from_curvature(lift, pd.kappa(index)), index })
}

/// Part of `v` outside `span{F, T}` at the base point.
pub fn residual_outside_ft(v: &Vec6, lift: &LiftPair) -> Vec6 {
    let f = value6(&lift.point_sphere);
    let t = value6(&lift.tangent_plane);
    // (F, q) = -1, (T, q) = 0, (F, p) = 0, (T, p) = -1
    let a = -inner(v, &Q);
    let b = -inner(v, &P);
    *v - f * a - t * b
}

/// Third-order coefficients `(c_XXX, c_XXY, c_XYY, c_YYY)` in the basis
/// `X = d/du`, `Y = d/dv`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CubicForm {
    pub c: [f64; 4],
}

impl CubicForm {
    /// Symmetric trilinear value on coordinate vectors `a`, `b`, `c`.
    pub fn eval(&self, a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
        let mut s = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    s += self.c[i + j + k] * a[i] * b[j] * c[k];
                }
            }
        }
        s
    }

    /// Coefficients against the basis `e_k = m[k][0] d/du + m[k][1] d/dv`.
    pub fn in_basis(&self, m: [[f64; 2]; 2]) -> CubicForm {
        let (x, y) = (m[0], m[1]);
        CubicForm { c: [self.eval(x, x, x), self.eval(x, x, y), self.eval(x, y, y), self.eval(y, y, y)] }
    }

    pub fn scaled(&self, s: f64) -> CubicForm {
        CubicForm { c: self.c.map(|x| x * s) }
    }
}

pub fn cubic_discriminant(c: &CubicForm) -> f64 {
    let [c1, c2, c3, c4] = c.c;
    (c1 * c3 - c2 * c2) * (c4 * c2 - c3 * c3) - (c1 * c4 - c2 * c3).powi(2)
}

/// `C(X, Y, Z) = (d_X d_Y d_Z sigma_tilde, sigma(x))` with coordinate
/// directions.
pub fn cubic_form_of(sigma_at_x: &Vec6, sigma_tilde: &JetVec6) -> CubicForm {
    CubicForm { c: [(3, 0), (2, 1), (1, 2), (0, 3)].map(|(a, b)| inner(&partial6(sigma_tilde, a, b), sigma_at_x)) }
}

/// Cubic form at an umbilic for the pair `(T + kappa F, F)`, kappa frozen
/// at its base value.
pub fn cubic_form(lift: &LiftPair, pd: &PrincipalData) -> Result<CubicForm> {
    if !pd.umbilic {
        return Err(Error::NotUmbilic(pd.umbilic_margin));
    }
    let k = pd.kappa1.value();
    let sigma = value6(&lift.tangent_plane) + value6(&lift.point_sphere) * k;
    Ok(cubic_form_of(&sigma, &lift.point_sphere))
}
