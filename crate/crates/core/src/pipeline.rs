//! A surface together with an optional Lie sphere transformation, evaluated
//! and classified point by point.

use crate::classify::{
    classify_direct, classify_lie, classify_umbilic, criteria_rank1, density_det3, singular_index,
    ClassificationReport, FrontJets, Margins, Method, SingularityClass, Tolerances, UmbilicClass,
};
use crate::curvature::{principal_data, PrincipalData};
use crate::error::{Error, Result};
use crate::jets::{Jet2, DEFAULT_ORDER};
use crate::legendre::{compute_normal, lift, JetVec3, LiftPair};
use crate::minkowski::Mat6;
use crate::surface_dsl::SurfaceExpr;
use crate::transform::apply;

#[derive(Clone, Debug)]
pub struct Problem {
    pub surface: SurfaceExpr,
    pub matrix: Option<Mat6>,
    /// Jet order used for classification.
    pub order: usize,
    pub tol: Tolerances,
}

/// Original surface jets with its unit normal.
#[derive(Clone, Debug)]
pub struct SurfacePoint {
    pub f: JetVec3,
    pub t: JetVec3,
    pub base: (f64, f64),
}

impl SurfacePoint {
    pub fn lift(&self) -> Result<LiftPair> {
        lift(&self.f, &self.t, self.base)
    }

    pub fn principal_data(&self) -> Result<PrincipalData> {
        principal_data(&self.f, &self.t)
    }
}

impl Problem {
    pub fn new(surface: SurfaceExpr, matrix: Option<Mat6>) -> Self {
        Problem { surface, matrix, order: DEFAULT_ORDER, tol: Tolerances::default() }
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    /// Jets of `f` and its normal (supplied, or `f_u x f_v` normalized).
    pub fn surface_at(&self, u: f64, v: f64, order: usize) -> Result<SurfacePoint> {
        let j = self.surface.eval_jet(u, v, order)?;
        let t = match j.normal {
            Some(n) => n,
            None => compute_normal(&j.f)?,
        };
        Ok(SurfacePoint { f: j.f, t, base: (u, v) })
    }

    /// The front `(f^, t^)`: the surface itself without a matrix, otherwise
    /// the projection of the transformed lift.
    pub fn front_at(&self, u: f64, v: f64, order: usize) -> Result<FrontJets> {
        let sp = self.surface_at(u, v, order)?;
        match &self.matrix {
            None => Ok(FrontJets { f: sp.f, t: sp.t, base: (u, v) }),
            Some(a) => {
                let pr = apply(a, &sp.lift()?)?;
                Ok(FrontJets { f: pr.fhat, t: pr.that, base: (u, v) })
            }
        }
    }

    pub fn density_at(&self, u: f64, v: f64, order: usize) -> Result<Jet2> {
        let fr = self.front_at(u, v, order)?;
        density_det3(&fr.f, &fr.t)
    }

    /// Direct classification, cross-checked by the Lie-geometric route when
    /// a matrix is present. The report has `method = Both` only when both
    /// routes ran and agree.
    pub fn classify_at(&self, u: f64, v: f64) -> Result<ClassificationReport> {
        let front = self.front_at(u, v, self.order)?;
        let mut rep = classify_direct(&front, &self.tol)?;
        let Some(a) = &self.matrix else {
            return Ok(rep);
        };
        if rep.class == SingularityClass::Regular {
            return Ok(rep);
        }
        let cross = self.lie_cross_check(a, &front, &rep, u, v);
        match cross {
            Ok((other, margins)) => {
                for (k, val) in margins {
                    rep.margins.insert(format!("lie.{k}"), val);
                }
                if other == rep.class {
                    rep.method = Method::Both;
                } else {
                    rep.margins.insert("lie_mismatch".into(), 1.0);
                }
            }
            Err(_) => {
                rep.margins.insert("lie_unavailable".into(), 1.0);
            }
        }
        Ok(rep)
    }

    fn lie_cross_check(
        &self,
        a: &Mat6,
        front: &FrontJets,
        direct: &ClassificationReport,
        u: f64,
        v: f64,
    ) -> Result<(SingularityClass, Margins)> {
        let sp = self.surface_at(u, v, self.order)?;
        let l = sp.lift()?;
        let pd = sp.principal_data()?;
        if pd.umbilic {
            let (uc, m) = classify_umbilic(&l, &pd, Some(a), &self.tol)?;
            let class = match uc {
                UmbilicClass::D4Plus => SingularityClass::D4Plus,
                UmbilicClass::D4Minus => SingularityClass::D4Minus,
                UmbilicClass::Unresolved => SingularityClass::Unresolved,
                _ => SingularityClass::Regular,
            };
            return Ok((class, m));
        }
        let lie = classify_lie(&l, &pd, a, &self.tol)?;
        let mut margins = lie.margins;
        // the principal field of the singular sphere is a second null field
        if direct.rank == 1 {
            if let Some(i) = singular_index(&l, &pd, a, &self.tol) {
                let lambda = density_det3(&front.f, &front.t)?;
                let (c, _) = criteria_rank1(&lambda, pd.dir(i)?, &self.tol)?;
                margins.insert("principal_null_field_agrees".into(), (c == direct.class) as u8 as f64);
            }
        }
        Ok((lie.class, margins))
    }
}

/// Whether an error means the projection failed rather than bad input.
pub fn is_projection_failure(e: &Error) -> bool {
    matches!(
        e,
        Error::ProjectionSingular { .. }
            | Error::RankDeficient
            | Error::NotImmersed
            | Error::DivisionByZeroConstantTerm
            | Error::NegativeSqrtConstantTerm(_)
            | Error::NonPositiveBase(_)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    #[test]
    fn example_swallowtail_both_routes() {
        let p = Problem::new(models::parabolic_cylinder(), Some(models::example_matrix()));
        let r = p.classify_at(0.0, 0.0).unwrap();
        assert_eq!(r.class, SingularityClass::Swallowtail);
        assert_eq!(r.method, Method::Both);
        assert_eq!(r.rank, 1);
        assert_eq!(r.margins["lie.principal_null_field_agrees"], 1.0);
    }

    #[test]
    fn example_family_beaks_and_lips() {
        for (xi, class) in [(0.2, SingularityClass::CuspidalBeaks), (0.5, SingularityClass::CuspidalLips)] {
            let p = Problem::new(models::parabolic_cylinder(), Some(models::example_family(xi)));
            let r = p.classify_at(0.0, 0.0).unwrap();
            assert_eq!(r.class, class, "xi = {xi}: {:?}", r.margins);
            assert_eq!(r.method, Method::Both);
        }
    }

    #[test]
    fn regular_point_of_a_plane() {
        let s = SurfaceExpr::from_strs(["u", "v", "0"], None).unwrap();
        let r = Problem::new(s, None).classify_at(0.2, 0.3).unwrap();
        assert_eq!(r.class, SingularityClass::Regular);
        assert_eq!(r.rank, 2);
    }
}
