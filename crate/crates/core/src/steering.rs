//! Transformations that turn a chosen point of a regular surface into a
//! singular point of a requested class.
//!
//! The curvature sphere whose type matches the request is sent to a sphere
//! orthogonal to `p`. Generic choices of the preimage `p^` of `p` give the
//! generic class of the type; choices with `(p^, d sigma1) = 0` give lips or
//! beaks according to the sign of `det Hess (sigma1, p^)`, which is affine
//! along `p^ + xi sigma1(x)`.

use crate::classify::{type_from_surface, ClassificationReport, SingularityClass, SurfaceType};
use crate::curvature::{sphere_from_curvature, PrincipalData};
use crate::error::{Error, Result};
use crate::legendre::{value6, JetVec6, LiftPair};
use crate::minkowski::Mat6;
use crate::pipeline::Problem;
use crate::transform::{choose_phat, hessian_line, steer, SteerMode, SteeringContext};

#[derive(Clone, Debug)]
pub struct SteerRequest {
    pub target: SingularityClass,
    pub point: (f64, f64),
    /// Forced mode; derived from the target when absent.
    pub mode: Option<SteerMode>,
    pub seed: u64,
    /// Number of seeds tried before giving up.
    pub attempts: usize,
}

impl SteerRequest {
    pub fn new(target: SingularityClass, point: (f64, f64), seed: u64) -> Self {
        SteerRequest { target, point, mode: None, seed, attempts: 16 }
    }
}

#[derive(Clone, Debug)]
pub struct SteerOutcome {
    pub matrix: Mat6,
    pub context: SteeringContext,
    pub xi: f64,
    /// Index of the curvature sphere made singular.
    pub index: usize,
    pub surface_type: SurfaceType,
    pub report: ClassificationReport,
}

/// Surface type a rank-one target class requires.
pub fn required_type(target: SingularityClass) -> Result<SurfaceType> {
    match target {
        SingularityClass::CuspidalEdge
        | SingularityClass::Swallowtail
        | SingularityClass::CuspidalLips
        | SingularityClass::CuspidalBeaks
        | SingularityClass::CuspidalButterfly => Ok(target.bucket().expect("rank-one class")),
        other => Err(Error::TypeIncompatible(format!("{other} cannot be requested as a steering target"))),
    }
}

fn required_mode(target: SingularityClass) -> SteerMode {
    match target {
        SingularityClass::CuspidalLips | SingularityClass::CuspidalBeaks => SteerMode::Degenerate,
        _ => SteerMode::Generic,
    }
}

/// Lift, principal data and types of both curvature spheres at a point.
pub struct PointGeometry {
    pub lift: LiftPair,
    pub pd: PrincipalData,
    pub types: [SurfaceType; 2],
}

impl PointGeometry {
    pub fn at(problem: &Problem, point: (f64, f64)) -> Result<Self> {
        let sp = problem.surface_at(point.0, point.1, problem.order)?;
        let lift = sp.lift()?;
        let pd = sp.principal_data()?;
        if pd.umbilic {
            return Err(Error::Umbilic);
        }
        let types = [type_from_surface(&pd, 1, &problem.tol)?.0, type_from_surface(&pd, 2, &problem.tol)?.0];
        Ok(PointGeometry { lift, pd, types })
    }

    /// Index of a curvature sphere of the given type.
    pub fn index_of(&self, ty: SurfaceType) -> Option<usize> {
        (1..=2).find(|&i| self.types[i - 1] == ty)
    }

    pub fn sigma(&self, index: usize) -> JetVec6 {
        sphere_from_curvature(&self.lift, self.pd.kappa(index))
    }

    pub fn context(&self, index: usize, mode: SteerMode, seed: u64) -> Result<SteeringContext> {
        let other = value6(&self.lift.point_sphere);
        choose_phat(&self.sigma(index), &other, self.lift.base, mode, seed)
    }
}

/// `xi` making `det Hess (sigma1, p^xi)` have the requested sign, at a
/// distance from zero comparable to the coefficients of the affine map.
fn xi_for_sign(d0: f64, d1: f64, sign: f64) -> Option<f64> {
    let size = d0.abs().max(d1.abs());
    if size == 0.0 {
        return None;
    }
    if d1.abs() <= 1e-9 * size {
        return (d0 * sign > 0.0).then_some(0.0);
    }
    Some((sign * size - d0) / d1)
}

/// Finds `A` such that the transformed surface has the requested class at
/// the requested point, verified by classification.
pub fn steer_to_target(problem: &Problem, req: &SteerRequest) -> Result<SteerOutcome> {
    let need = required_type(req.target)?;
    let mode = required_mode(req.target);
    if let Some(m) = req.mode {
        if m != mode {
            return Err(Error::TypeIncompatible(format!("{} needs {mode:?} mode, not {m:?}", req.target)));
        }
    }
    let geo = PointGeometry::at(problem, req.point)?;
    let index = geo.index_of(need).ok_or_else(|| {
        Error::TypeIncompatible(format!(
            "{} needs a {need:?} point; the curvature spheres here are {:?} and {:?}",
            req.target, geo.types[0], geo.types[1]
        ))
    })?;
    let sigma = geo.sigma(index);
    let mut last = None;
    for attempt in 0..req.attempts as u64 {
        let ctx = geo.context(index, mode, req.seed.wrapping_add(attempt))?;
        let xi = match req.target {
            SingularityClass::CuspidalLips | SingularityClass::CuspidalBeaks => {
                let (d0, d1) = hessian_line(&ctx, &sigma);
                let sign = if req.target == SingularityClass::CuspidalLips { 1.0 } else { -1.0 };
                match xi_for_sign(d0, d1, sign) {
                    Some(xi) => xi,
                    None => continue,
                }
            }
            _ => 0.0,
        };
        let a = match steer(&ctx, xi, &geo.lift) {
            Ok(a) => a,
            Err(e) => {
                last = Some(e.to_string());
                continue;
            }
        };
        let check = Problem { matrix: Some(a), ..problem.clone() };
        match check.classify_at(req.point.0, req.point.1) {
            Ok(report) if report.class == req.target => {
                return Ok(SteerOutcome { matrix: a, context: ctx, xi, index, surface_type: need, report });
            }
            Ok(report) => last = Some(format!("verification gave {}", report.class)),
            Err(e) => last = Some(e.to_string()),
        }
    }
    Err(Error::SteeringFailed(last.unwrap_or_else(|| "no admissible choice found".into())))
}

/// The one-parameter family `xi -> A` with `A p^xi = p` in degenerate mode,
/// for a type 2 point.
pub struct SteeredFamily {
    pub geometry: PointGeometry,
    pub context: SteeringContext,
    pub index: usize,
}

impl SteeredFamily {
    pub fn new(problem: &Problem, point: (f64, f64), seed: u64) -> Result<Self> {
        let geometry = PointGeometry::at(problem, point)?;
        let index = geometry.index_of(SurfaceType::Type2).ok_or_else(|| {
            Error::TypeIncompatible(format!(
                "degenerate steering needs a Type2 point; the curvature spheres here are {:?} and {:?}",
                geometry.types[0], geometry.types[1]
            ))
        })?;
        let context = geometry.context(index, SteerMode::Degenerate, seed)?;
        Ok(SteeredFamily { geometry, context, index })
    }

    pub fn matrix(&self, xi: f64) -> Result<Mat6> {
        steer(&self.context, xi, &self.geometry.lift)
    }

    /// Parameter where `det Hess (sigma1, p^xi)` vanishes.
    pub fn critical_xi(&self) -> Option<f64> {
        let (d0, d1) = hessian_line(&self.context, &self.geometry.sigma(self.index));
        (d1 != 0.0).then(|| -d0 / d1)
    }
}
