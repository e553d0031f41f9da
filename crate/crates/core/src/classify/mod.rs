//! Classification of front singularities.
//!
//! Two independent routes are provided. The direct route works on the
//! projected surface `(f, t)` through its area density `lambda` and a null
//! vector field. The Lie-geometric route works on the transformed
//! curvature sphere `A sigma1` of the original surface and its pairing with
//! `p`. Both return the same [`SingularityClass`] on every front where the
//! hypotheses hold, which the test suites check at scale.
//!
//! Every "is zero" decision compares against `zero * scale`, where the
//! scale is the largest derivative magnitude of the quantity involved.

pub mod density;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::curvature::{cubic_discriminant, cubic_form, sphere_from_curvature, Field, PrincipalData};
use crate::error::{Error, Result};
use crate::jets::{directional_derivative, Jet2};
use crate::legendre::{apply_mat, dot_jet3, du3, dv3, partial3, partial6, value6, JetVec3, JetVec6, LiftPair};
use crate::linalg::{singular_values_2col, solve2};
use crate::minkowski::{inner, Mat6, Vec6, P, Q};
use crate::transform::{apply, pairing_hessian};

pub use density::{density_det3, density_det6, density_lift_product, DensityJet, DensitySource};

pub type Margins = BTreeMap<String, f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SingularityClass {
    Regular,
    CuspidalEdge,
    Swallowtail,
    CuspidalLips,
    CuspidalBeaks,
    CuspidalButterfly,
    Type2Degenerate,
    Type3Degenerate,
    D4Plus,
    D4Minus,
    Unresolved,
}

impl SingularityClass {
    pub const ALL: [SingularityClass; 11] = [
        Self::Regular,
        Self::CuspidalEdge,
        Self::Swallowtail,
        Self::CuspidalLips,
        Self::CuspidalBeaks,
        Self::CuspidalButterfly,
        Self::Type2Degenerate,
        Self::Type3Degenerate,
        Self::D4Plus,
        Self::D4Minus,
        Self::Unresolved,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Regular => "Regular",
            Self::CuspidalEdge => "CuspidalEdge",
            Self::Swallowtail => "Swallowtail",
            Self::CuspidalLips => "CuspidalLips",
            Self::CuspidalBeaks => "CuspidalBeaks",
            Self::CuspidalButterfly => "CuspidalButterfly",
            Self::Type2Degenerate => "Type2Degenerate",
            Self::Type3Degenerate => "Type3Degenerate",
            Self::D4Plus => "D4Plus",
            Self::D4Minus => "D4Minus",
            Self::Unresolved => "Unresolved",
        }
    }

    /// Type bucket of a rank-one class.
    pub fn bucket(self) -> Option<SurfaceType> {
        match self {
            Self::CuspidalEdge => Some(SurfaceType::Type1),
            Self::Swallowtail | Self::CuspidalLips | Self::CuspidalBeaks | Self::Type2Degenerate => {
                Some(SurfaceType::Type2)
            }
            Self::CuspidalButterfly | Self::Type3Degenerate => Some(SurfaceType::Type3),
            _ => None,
        }
    }
}

impl fmt::Display for SingularityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SingularityClass {
    type Err = String;

    /// Case-insensitive, ignoring `-` and `_`; `lips`, `beaks`,
    /// `butterfly` and `edge` are accepted as short forms.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let key: String = s.chars().filter(|c| *c != '-' && *c != '_').flat_map(char::to_lowercase).collect();
        let short = match key.as_str() {
            "edge" => Some(Self::CuspidalEdge),
            "lips" => Some(Self::CuspidalLips),
            "beaks" => Some(Self::CuspidalBeaks),
            "butterfly" => Some(Self::CuspidalButterfly),
            _ => None,
        };
        short
            .or_else(|| Self::ALL.into_iter().find(|c| c.name().to_lowercase() == key))
            .ok_or_else(|| format!("unknown singularity class `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SurfaceType {
    Type1,
    Type2,
    Type3,
    HigherType,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Direct,
    LieGeometric,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UmbilicClass {
    Elliptic,
    Hyperbolic,
    D4Plus,
    D4Minus,
    Unresolved,
}

/// Cutoffs for the numeric zero tests.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative cutoff for criterion values.
    pub zero: f64,
    /// Lower bound for every derivative scale.
    pub scale_floor: f64,
    /// Relative cutoff on singular values of `df`.
    pub rank: f64,
    /// Relative cutoff on the smallest singular value of `(df, dt)`.
    pub front: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { zero: 1e-7, scale_floor: 1e-6, rank: 1e-7, front: 1e-7 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub point: (f64, f64),
    pub rank: u8,
    pub class: SingularityClass,
    pub margins: Margins,
    pub method: Method,
}

/// Jets of a front `(f, t)` at a base point.
#[derive(Clone, Debug)]
pub struct FrontJets {
    pub f: JetVec3,
    pub t: JetVec3,
    pub base: (f64, f64),
}

fn put(m: &mut Margins, key: &str, value: f64) {
    m.insert(key.to_string(), value);
}

/// Largest derivative of orders 1 to 3, bounded below by the floor.
pub fn derivative_scale(g: &Jet2, tol: &Tolerances) -> f64 {
    g.max_abs_partial(1, 3).max(tol.scale_floor)
}

/// Singular values of `df` at the base point and the cutoff below which
/// they count as zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankInfo {
    pub rank: u8,
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub cut: f64,
}

impl RankInfo {
    /// Cutoff on `|lambda|` matching the rank cutoff: with a unit normal,
    /// `|det(f_u, f_v, t)| = sigma_max * sigma_min`.
    pub fn lambda_cut(&self) -> f64 {
        self.cut * self.sigma_max.max(self.cut)
    }
}

pub fn rank_info(f: &JetVec3, tol: &Tolerances) -> RankInfo {
    let fu = partial3(f, 1, 0);
    let fv = partial3(f, 0, 1);
    let (sigma_max, sigma_min) = singular_values_2col(&fu, &fv);
    let scale = (0..3).map(|k| f[k].max_abs_partial(1, 2)).fold(tol.scale_floor, f64::max);
    let cut = tol.rank * scale;
    let rank = (sigma_max > cut) as u8 + (sigma_min > cut) as u8;
    RankInfo { rank, sigma_max, sigma_min, cut }
}

/// Rank of `df` at the base point, with the two singular values.
pub fn rank_of(f: &JetVec3, tol: &Tolerances) -> (u8, f64, f64) {
    let r = rank_info(f, tol);
    (r.rank, r.sigma_max, r.sigma_min)
}

/// Smallest singular value of `X -> (d_X f, d_X t)` relative to its scale.
pub fn front_margin(front: &FrontJets, tol: &Tolerances) -> f64 {
    let col = |a, b| -> Vec<f64> {
        let mut v = partial3(&front.f, a, b).to_vec();
        v.extend_from_slice(&partial3(&front.t, a, b));
        v
    };
    let (cu, cv) = (col(1, 0), col(0, 1));
    let scale = cu.iter().chain(cv.iter()).fold(tol.scale_floor, |m, x| m.max(x.abs()));
    singular_values_2col(&cu, &cv).1 / scale
}

/// Unit kernel field of `df`: the eigenvector of the first fundamental form
/// for its smaller eigenvalue, as jets.
pub fn null_field(f: &JetVec3) -> Result<Field> {
    let fu = du3(f)?;
    let fv = dv3(f)?;
    let e = dot_jet3(&fu, &fu);
    let ff = dot_jet3(&fu, &fv);
    let g = dot_jet3(&fv, &fv);
    let half_sum = &(&e + &g) * 0.5;
    let half_diff = &(&e - &g) * 0.5;
    let r = (&(&half_diff * &half_diff) + &(&ff * &ff)).sqrt().map_err(|_| Error::NotRank1(0))?;
    let mu = &half_sum - &r;
    let a = [ff.clone(), &mu - &e];
    let b = [&mu - &g, ff];
    let size = |x: &Field| x[0].value().hypot(x[1].value());
    let x = if size(&a) >= size(&b) { a } else { b };
    let n2 = &(&x[0] * &x[0]) + &(&x[1] * &x[1]);
    let inv = n2.powf(-0.5).map_err(|_| Error::NotRank1(0))?;
    let sign = if x[0].value().abs() >= x[1].value().abs() { x[0].value().signum() } else { x[1].value().signum() };
    let inv = &inv * sign;
    Ok([&x[0] * &inv, &x[1] * &inv])
}

fn det_hess(h: [f64; 3]) -> f64 {
    h[0] * h[2] - h[1] * h[1]
}

/// Rank-one criteria on a density `lambda` and null field `x`.
///
/// Derivatives along `x` are taken lazily, so a cuspidal edge needs only
/// one order beyond the Hessian.
pub fn criteria_rank1(lambda: &Jet2, x: &Field, tol: &Tolerances) -> Result<(SingularityClass, Margins)> {
    use SingularityClass::*;
    let s = derivative_scale(lambda, tol);
    let thr = tol.zero * s;
    let thr_h = tol.zero * s * s;
    let mut m = Margins::new();
    let grad = lambda.partial(1, 0).hypot(lambda.partial(0, 1));
    let dh = det_hess([lambda.partial(2, 0), lambda.partial(1, 1), lambda.partial(0, 2)]);
    put(&mut m, "lambda", lambda.value());
    put(&mut m, "dlambda_norm", grad);
    put(&mut m, "detHess", dh);
    put(&mut m, "threshold", thr);
    put(&mut m, "threshold_hess", thr_h);
    let d1 = directional_derivative(lambda, x)?;
    put(&mut m, "dXlambda", d1.value());
    if d1.value().abs() > thr {
        return Ok((CuspidalEdge, m));
    }
    let d2 = directional_derivative(&d1, x)?;
    put(&mut m, "dXdXlambda", d2.value());
    if d2.value().abs() > thr {
        let class = if grad > thr {
            Swallowtail
        } else if dh < -thr_h {
            CuspidalBeaks
        } else if dh > thr_h {
            CuspidalLips
        } else {
            Type2Degenerate
        };
        return Ok((class, m));
    }
    let d3 = directional_derivative(&d2, x)?;
    put(&mut m, "dXdXdXlambda", d3.value());
    if d3.value().abs() > thr {
        return Ok((if grad > thr { CuspidalButterfly } else { Type3Degenerate }, m));
    }
    Ok((Unresolved, m))
}

/// Rank-zero criterion: the sign of `det Hess lambda`.
pub fn criteria_rank0(lambda: &Jet2, tol: &Tolerances) -> (SingularityClass, Margins) {
    let s = derivative_scale(lambda, tol);
    let thr_h = tol.zero * s * s;
    let dh = det_hess([lambda.partial(2, 0), lambda.partial(1, 1), lambda.partial(0, 2)]);
    let mut m = Margins::new();
    put(&mut m, "lambda", lambda.value());
    put(&mut m, "detHess", dh);
    put(&mut m, "threshold_hess", thr_h);
    let class = if dh < -thr_h {
        SingularityClass::D4Plus
    } else if dh > thr_h {
        SingularityClass::D4Minus
    } else {
        SingularityClass::Unresolved
    };
    (class, m)
}

struct DirectSetup {
    lambda: Jet2,
    singular: bool,
    rank: u8,
    margins: Margins,
}

fn direct_setup(front: &FrontJets, tol: &Tolerances) -> Result<DirectSetup> {
    let lambda = density_det3(&front.f, &front.t)?;
    let ri = rank_info(&front.f, tol);
    let mut margins = Margins::new();
    put(&mut margins, "sigma_max", ri.sigma_max);
    put(&mut margins, "sigma_min", ri.sigma_min);
    put(&mut margins, "lambda", lambda.value());
    put(&mut margins, "singular_threshold", ri.lambda_cut());
    let singular = lambda.value().abs() <= ri.lambda_cut();
    Ok(DirectSetup { lambda, singular, rank: ri.rank, margins })
}

fn check_front(front: &FrontJets, tol: &Tolerances, margins: &mut Margins) -> Result<()> {
    let fm = front_margin(front, tol);
    put(margins, "front_margin", fm);
    if fm <= tol.front {
        return Err(Error::NotFront);
    }
    Ok(())
}

fn report(
    front: &FrontJets,
    rank: u8,
    class: SingularityClass,
    margins: Margins,
    method: Method,
) -> ClassificationReport {
    ClassificationReport { point: front.base, rank, class, margins, method }
}

/// Classifies a singular point where `df` has rank one.
pub fn classify_rank1(front: &FrontJets, tol: &Tolerances) -> Result<ClassificationReport> {
    let mut st = direct_setup(front, tol)?;
    if !st.singular {
        return Err(Error::NotSingular(st.lambda.value()));
    }
    if st.rank != 1 {
        return Err(Error::NotRank1(st.rank));
    }
    check_front(front, tol, &mut st.margins)?;
    let x = null_field(&front.f)?;
    let (class, m) = criteria_rank1(&st.lambda, &x, tol)?;
    st.margins.extend(m);
    Ok(report(front, 1, class, st.margins, Method::Direct))
}

/// Classifies a singular point where `df` vanishes.
pub fn classify_rank0(front: &FrontJets, tol: &Tolerances) -> Result<ClassificationReport> {
    let mut st = direct_setup(front, tol)?;
    if st.rank != 0 {
        return Err(Error::NotRank0(st.rank));
    }
    check_front(front, tol, &mut st.margins)?;
    let (class, m) = criteria_rank0(&st.lambda, tol);
    st.margins.extend(m);
    Ok(report(front, 0, class, st.margins, Method::Direct))
}

/// Direct route at any point: `Regular` off the singular set, otherwise
/// dispatch on the rank of `df`.
pub fn classify_direct(front: &FrontJets, tol: &Tolerances) -> Result<ClassificationReport> {
    let st = direct_setup(front, tol)?;
    if !st.singular {
        return Ok(report(front, st.rank, SingularityClass::Regular, st.margins, Method::Direct));
    }
    match st.rank {
        1 => classify_rank1(front, tol),
        0 => classify_rank0(front, tol),
        _ => {
            // lambda below threshold while df has full rank: t is not the
            // normal to working precision
            let mut m = st.margins;
            put(&mut m, "rank_conflict", 1.0);
            Ok(report(front, 2, SingularityClass::Unresolved, m, Method::Direct))
        }
    }
}

fn directional6(y: &JetVec6, x: &Field) -> Result<JetVec6> {
    let mut out: Vec<Jet2> = Vec::with_capacity(6);
    for c in y {
        out.push(directional_derivative(c, x)?);
    }
    Ok(out.try_into().expect("six components"))
}

fn const_scaled(y: &JetVec6, s: f64) -> JetVec6 {
    std::array::from_fn(|k| y[k].scale(s))
}

/// Lie-geometric criteria on a transformed curvature sphere `sigma` with
/// `(sigma(x), p) = 0`, the other sphere `sigma_tilde` of the same contact
/// element, and the principal field `x` belonging to `sigma`.
///
/// Membership `v in s1(x)` is decided by writing
/// `v = a sigma + b sigma_tilde + r` with `(r, p) = (r, q) = 0` and testing
/// `b` and `|r|` against the scale of the derivatives of `sigma`.
pub fn criteria_lie(
    sigma: &JetVec6,
    sigma_tilde: &JetVec6,
    x: &Field,
    tol: &Tolerances,
) -> Result<(SingularityClass, Margins)> {
    use SingularityClass::*;
    let n0 = value6(sigma).euclid_norm();
    let nt = value6(sigma_tilde).euclid_norm();
    if n0 == 0.0 || nt == 0.0 {
        return Err(Error::ZeroVector);
    }
    let sig = const_scaled(sigma, 1.0 / n0);
    let sig_t = const_scaled(sigma_tilde, 1.0 / nt);
    let s0 = value6(&sig);
    let st0 = value6(&sig_t);
    let pairing = inner(&s0, &P);
    if pairing.abs() > tol.zero {
        return Err(Error::NotSingularHere(pairing));
    }
    let frame = [[pairing, inner(&st0, &P)], [inner(&s0, &Q), inner(&st0, &Q)]];
    let scale = (1..=3)
        .flat_map(|d| (0..=d).map(move |b| (d - b, b)))
        .map(|(a, b)| partial6(&sig, a, b).euclid_norm())
        .fold(tol.scale_floor, f64::max);
    let mut m = Margins::new();
    put(&mut m, "sigma_p", pairing);
    put(&mut m, "sigma_scale", scale);
    let decompose = |v: &Vec6| -> Result<(f64, f64, f64)> {
        let ab = solve2(frame, [inner(v, &P), inner(v, &Q)]).ok_or(Error::ProjectionSingular {
            det: frame[0][0] * frame[1][1] - frame[0][1] * frame[1][0],
            norm: 1.0,
        })?;
        let r = *v - s0 * ab[0] - st0 * ab[1];
        Ok((ab[0], ab[1], r.euclid_norm()))
    };
    let grad = inner(&partial6(&sig, 1, 0), &P).hypot(inner(&partial6(&sig, 0, 1), &P));
    let dh = det_hess(pairing_hessian(&sig, &P));
    put(&mut m, "dsigma_p_norm", grad);
    put(&mut m, "detHess_sigma_p", dh);
    let thr = tol.zero * scale;
    put(&mut m, "threshold", thr);
    put(&mut m, "threshold_hess", tol.zero * scale * scale);
    let mut d = sig.clone();
    for k in 1..=3 {
        d = directional6(&d, x)?;
        let v = value6(&d);
        let (a, b, r) = decompose(&v)?;
        put(&mut m, &format!("alpha{k}"), a);
        put(&mut m, &format!("beta{k}"), b);
        put(&mut m, &format!("complement{k}"), r);
        let cut = tol.zero * v.euclid_norm().max(scale);
        if b.abs() <= cut && r <= cut {
            continue;
        }
        let perp = grad <= thr;
        let class = match k {
            1 => CuspidalEdge,
            2 if !perp => Swallowtail,
            2 if dh > tol.zero * scale * scale => CuspidalLips,
            2 if dh < -tol.zero * scale * scale => CuspidalBeaks,
            2 => Type2Degenerate,
            _ if !perp => CuspidalButterfly,
            _ => Type3Degenerate,
        };
        return Ok((class, m));
    }
    Ok((Unresolved, m))
}

/// Index `i` in `{1, 2}` of the transformed curvature sphere orthogonal
/// to `p`, if any.
pub fn singular_index(lift: &LiftPair, pd: &PrincipalData, a: &Mat6, tol: &Tolerances) -> Option<usize> {
    let pair = |i: usize| {
        let s = a.apply(&(value6(&lift.tangent_plane) + value6(&lift.point_sphere) * pd.kappa(i).value()));
        inner(&s, &P).abs() / s.euclid_norm()
    };
    let (p1, p2) = (pair(1), pair(2));
    let (i, best) = if p1 <= p2 { (1, p1) } else { (2, p2) };
    (best <= tol.zero).then_some(i)
}

/// Lie-geometric classification of the front obtained from `lift` by `a`.
pub fn classify_lie(lift: &LiftPair, pd: &PrincipalData, a: &Mat6, tol: &Tolerances) -> Result<ClassificationReport> {
    if pd.umbilic {
        return Err(Error::Umbilic);
    }
    let sigmas = [1, 2].map(|i| apply_mat(a, &sphere_from_curvature(lift, pd.kappa(i))));
    let i = match singular_index(lift, pd, a, tol) {
        Some(i) => i,
        None => {
            let s = value6(&sigmas[0]);
            return Err(Error::NotSingularHere(inner(&s, &P) / s.euclid_norm()));
        }
    };
    let x = pd.dir(i)?;
    let (class, mut m) = criteria_lie(&sigmas[i - 1], &sigmas[2 - i], x, tol)?;
    put(&mut m, "sphere_index", i as f64);
    Ok(ClassificationReport { point: lift.base, rank: 1, class, margins: m, method: Method::LieGeometric })
}

/// Type of the original surface at a non-umbilic point for the principal
/// curvature with index `i`.
pub fn type_from_surface(pd: &PrincipalData, i: usize, tol: &Tolerances) -> Result<(SurfaceType, Margins)> {
    if pd.umbilic {
        return Err(Error::Umbilic);
    }
    let kappa = pd.kappa(i);
    let x = pd.dir(i)?;
    let s = kappa.value().abs().max(derivative_scale(kappa, tol));
    let thr = tol.zero * s;
    let mut m = Margins::new();
    put(&mut m, "kappa", kappa.value());
    put(&mut m, "threshold", thr);
    let mut d = kappa.clone();
    let names = ["dXkappa", "dXdXkappa", "dXdXdXkappa"];
    let types = [SurfaceType::Type1, SurfaceType::Type2, SurfaceType::Type3];
    for k in 0..3 {
        d = directional_derivative(&d, x)?;
        put(&mut m, names[k], d.value());
        if d.value().abs() > thr {
            return Ok((types[k], m));
        }
    }
    Ok((SurfaceType::HigherType, m))
}

/// Umbilic classification from the cubic form of the original surface and
/// the rank of the projection of `A` applied to it.
pub fn classify_umbilic(
    lift: &LiftPair,
    pd: &PrincipalData,
    a: Option<&Mat6>,
    tol: &Tolerances,
) -> Result<(UmbilicClass, Margins)> {
    let cubic = cubic_form(lift, pd)?;
    let disc = cubic_discriminant(&cubic);
    let cmax = cubic.c.iter().fold(tol.scale_floor, |m, c| m.max(c.abs()));
    let thr = tol.zero * cmax.powi(4);
    let f = match a {
        Some(a) => apply(a, lift)?.fhat,
        None => std::array::from_fn(|k| lift.point_sphere[k + 2].clone()),
    };
    let (rank, smax, smin) = rank_of(&f, tol);
    let mut m = Margins::new();
    put(&mut m, "discriminant", disc);
    put(&mut m, "threshold", thr);
    put(&mut m, "sigma_max", smax);
    put(&mut m, "sigma_min", smin);
    for (k, c) in cubic.c.iter().enumerate() {
        put(&mut m, &format!("cubic{k}"), *c);
    }
    let sign = if disc > thr {
        1
    } else if disc < -thr {
        -1
    } else {
        0
    };
    let class = match (rank, sign) {
        (_, 0) => UmbilicClass::Unresolved,
        (2, 1) => UmbilicClass::Elliptic,
        (2, _) => UmbilicClass::Hyperbolic,
        (0, 1) => UmbilicClass::D4Minus,
        (0, _) => UmbilicClass::D4Plus,
        _ => return Err(Error::TypeIncompatible("projection has rank one at an umbilic point".to_string())),
    };
    Ok((class, m))
}
