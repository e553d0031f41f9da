//! Random steered instances: surfaces with a transformation that makes a
//! chosen curvature sphere singular at a point, for validation runs.

use crate::classify::SurfaceType;
use crate::minkowski::Mat6;
use crate::models;
use crate::pipeline::Problem;
use crate::steering::PointGeometry;
use crate::surface_dsl::SurfaceExpr;
use crate::transform::{steer, SteerMode};
use rand::Rng;

/// A surface with a transformation that makes one curvature sphere
/// singular at `point`.
pub struct Instance {
    pub surface: SurfaceExpr,
    pub point: (f64, f64),
    pub index: usize,
    pub matrix: Mat6,
    pub mode: SteerMode,
    pub geometry: PointGeometry,
}

impl Instance {
    pub fn problem(&self) -> Problem {
        Problem::new(self.surface.clone(), Some(self.matrix))
    }
}

/// Tries to steer `surface` at `point`, making the sphere of type `want`
/// singular when there is one and a random sphere otherwise.
pub fn try_instance(
    rng: &mut impl Rng,
    surface: SurfaceExpr,
    point: (f64, f64),
    want: Option<SurfaceType>,
) -> Option<Instance> {
    let plain = Problem::new(surface.clone(), None);
    let geometry = PointGeometry::at(&plain, point).ok()?;
    let index = want.and_then(|t| geometry.index_of(t)).unwrap_or_else(|| rng.gen_range(1..=2));
    let mode = if rng.gen_bool(0.5) { SteerMode::Generic } else { SteerMode::Degenerate };
    let ctx = geometry.context(index, mode, rng.gen()).ok()?;
    let xi = rng.gen_range(-1.5..1.5);
    let matrix = steer(&ctx, xi, &geometry.lift).ok()?;
    Some(Instance { surface, point, index, matrix, mode, geometry })
}

/// Random steered instances drawn from three families: random analytic
/// surfaces at random points (type 1), graphs even in `u` along `u = 0`
/// (type 2) and the type 3 cylinder.
pub fn random_instance(rng: &mut impl Rng) -> Instance {
    loop {
        let pick = rng.gen_range(0..10);
        let found = if pick < 4 {
            let s = models::random_surface(rng);
            let p = (rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            try_instance(rng, s, p, None)
        } else if pick < 8 {
            let s = models::random_even_graph(rng);
            let p = (0.0, rng.gen_range(-0.4..0.4));
            try_instance(rng, s, p, Some(SurfaceType::Type2))
        } else {
            let p = (0.0, rng.gen_range(-1.0..1.0));
            try_instance(rng, models::type3_cylinder(), p, Some(SurfaceType::Type3))
        };
        if let Some(inst) = found {
            return inst;
        }
    }
}
