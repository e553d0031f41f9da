//! Singular set of a front over its parameter domain.
//!
//! The density is sampled on a grid, its zero contour traced by marching
//! squares and every vertex pulled onto the zero set by Newton steps along
//! the jet gradient. Distinguished points are then located by Newton
//! iterations on `(lambda, d_X lambda)` from local minima of `|d_X lambda|`
//! along the contour, on `grad lambda` from grid minima of `|grad lambda|`
//! (isolated and crossing singular points), and on `(f_u, f_v)` from grid
//! minima of `|df|` (rank-zero points).

use std::collections::HashMap;

use rayon::prelude::*;

use crate::classify::{derivative_scale, null_field, ClassificationReport, SingularityClass};
use crate::error::Result;
use crate::jets::directional_derivative;
use crate::legendre::partial3;
use crate::linalg::solve2;
use crate::pipeline::{is_projection_failure, Problem};
use crate::surface_dsl::Domain;

/// Jet order of the grid pass: enough for `grad lambda` and `df`.
const GRID_ORDER: usize = 3;
/// Jet order for the Newton steps on the contour.
const NEWTON_ORDER: usize = 4;

#[derive(Clone, Debug)]
pub struct GridSample {
    pub lambda: f64,
    pub grad: [f64; 2],
    /// `|f_u|^2 + |f_v|^2`.
    pub df2: f64,
}

#[derive(Clone, Debug)]
pub struct DensityGrid {
    pub nu: usize,
    pub nv: usize,
    pub domain: Domain,
    /// Row-major in `v`: index `j * nu + i`. `None` where the front could
    /// not be evaluated.
    pub samples: Vec<Option<GridSample>>,
}

impl DensityGrid {
    pub fn uv(&self, i: usize, j: usize) -> (f64, f64) {
        let d = &self.domain;
        let u = d.u_min + (d.u_max - d.u_min) * i as f64 / (self.nu - 1) as f64;
        let v = d.v_min + (d.v_max - d.v_min) * j as f64 / (self.nv - 1) as f64;
        (u, v)
    }

    pub fn at(&self, i: usize, j: usize) -> Option<&GridSample> {
        self.samples[j * self.nu + i].as_ref()
    }

    /// Fraction of grid points where the front could not be evaluated.
    pub fn failed_fraction(&self) -> f64 {
        self.samples.iter().filter(|s| s.is_none()).count() as f64 / self.samples.len() as f64
    }

    fn spacing(&self) -> f64 {
        let d = &self.domain;
        ((d.u_max - d.u_min) / (self.nu - 1) as f64).max((d.v_max - d.v_min) / (self.nv - 1) as f64)
    }
}

/// Samples the density on an `nu x nv` grid, in parallel. Evaluation
/// failures other than projection breakdowns are returned as errors.
pub fn sample_grid(problem: &Problem, nu: usize, nv: usize) -> Result<DensityGrid> {
    assert!(nu >= 2 && nv >= 2, "grid needs at least two points per axis");
    let mut grid = DensityGrid { nu, nv, domain: problem.surface.domain, samples: Vec::new() };
    let points: Vec<(f64, f64)> =
        (0..nv).flat_map(|j| (0..nu).map(move |i| (i, j))).map(|(i, j)| grid.uv(i, j)).collect();
    let samples: Vec<Result<Option<GridSample>>> = points
        .par_iter()
        .map(|&(u, v)| match problem.front_at(u, v, GRID_ORDER) {
            Ok(fr) => {
                let lambda = crate::classify::density_det3(&fr.f, &fr.t)?;
                let fu = partial3(&fr.f, 1, 0);
                let fv = partial3(&fr.f, 0, 1);
                let df2 = fu.iter().chain(fv.iter()).map(|x| x * x).sum();
                Ok(Some(GridSample { lambda: lambda.value(), grad: [lambda.partial(1, 0), lambda.partial(0, 1)], df2 }))
            }
            Err(e) if is_projection_failure(&e) => Ok(None),
            Err(e) => Err(e),
        })
        .collect();
    grid.samples = samples.into_iter().collect::<Result<_>>()?;
    Ok(grid)
}

/// Edge of the grid: horizontal from `(i, j)` to `(i + 1, j)` or vertical
/// from `(i, j)` to `(i, j + 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

fn edge_point(grid: &DensityGrid, e: Edge) -> (f64, f64) {
    let (a, b) = match e {
        Edge::H(i, j) => ((i, j), (i + 1, j)),
        Edge::V(i, j) => ((i, j), (i, j + 1)),
    };
    let la = grid.at(a.0, a.1).map_or(0.0, |s| s.lambda);
    let lb = grid.at(b.0, b.1).map_or(0.0, |s| s.lambda);
    let s = if la == lb { 0.5 } else { la / (la - lb) };
    let pa = grid.uv(a.0, a.1);
    let pb = grid.uv(b.0, b.1);
    (pa.0 + s * (pb.0 - pa.0), pa.1 + s * (pb.1 - pa.1))
}

/// Zero-contour segments of the grid density as pairs of edges.
fn contour_segments(grid: &DensityGrid) -> Vec<(Edge, Edge)> {
    let mut segs = Vec::new();
    for j in 0..grid.nv - 1 {
        for i in 0..grid.nu - 1 {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let vals: Option<Vec<f64>> = corners.iter().map(|&(a, b)| grid.at(a, b).map(|s| s.lambda)).collect();
            let Some(vals) = vals else { continue };
            let pos: Vec<bool> = vals.iter().map(|x| *x >= 0.0).collect();
            // edges in order bottom, right, top, left
            let edges = [Edge::H(i, j), Edge::V(i + 1, j), Edge::H(i, j + 1), Edge::V(i, j)];
            let ends = [(0, 1), (1, 2), (3, 2), (0, 3)];
            let crossing: Vec<usize> = (0..4).filter(|&k| pos[ends[k].0] != pos[ends[k].1]).collect();
            match crossing.len() {
                2 => segs.push((edges[crossing[0]], edges[crossing[1]])),
                4 => {
                    // saddle cell: cut off the corners whose sign differs
                    // from the cell average
                    let centre = vals.iter().sum::<f64>() >= 0.0;
                    let adjacent = [(3, 0), (0, 1), (1, 2), (2, 3)];
                    for k in 0..4 {
                        if pos[k] != centre {
                            segs.push((edges[adjacent[k].0], edges[adjacent[k].1]));
                        }
                    }
                }
                _ => {}
            }
        }
    }
    segs
}

/// Chains segments sharing edges into polylines of edges.
fn chain(segs: &[(Edge, Edge)]) -> Vec<Vec<Edge>> {
    let mut by_edge: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (k, (a, b)) in segs.iter().enumerate() {
        by_edge.entry(*a).or_default().push(k);
        by_edge.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segs.len()];
    let mut lines = Vec::new();
    let walk = |start_seg: usize, start_edge: Edge, used: &mut Vec<bool>| -> Vec<Edge> {
        let mut line = vec![start_edge];
        let mut seg = start_seg;
        let mut at = start_edge;
        loop {
            used[seg] = true;
            let (a, b) = segs[seg];
            let next = if a == at { b } else { a };
            line.push(next);
            let Some(cont) = by_edge[&next].iter().copied().find(|&s| !used[s]) else { break };
            seg = cont;
            at = next;
        }
        line
    };
    // open chains first, starting at edges used by a single segment
    let mut order: Vec<(usize, Edge)> = Vec::new();
    for (k, (a, b)) in segs.iter().enumerate() {
        for e in [a, b] {
            if by_edge[e].len() == 1 {
                order.push((k, *e));
            }
        }
    }
    order.extend(segs.iter().enumerate().map(|(k, (a, _))| (k, *a)));
    for (k, e) in order {
        if !used[k] {
            lines.push(walk(k, e, &mut used));
        }
    }
    lines
}

/// Newton projection onto `lambda = 0` along the gradient.
pub fn refine_to_zero(problem: &Problem, start: (f64, f64), max_step: f64) -> Option<(f64, f64)> {
    let (mut u, mut v) = start;
    for _ in 0..40 {
        let l = problem.density_at(u, v, NEWTON_ORDER).ok()?;
        let g = [l.partial(1, 0), l.partial(0, 1)];
        let g2 = g[0] * g[0] + g[1] * g[1];
        if l.value() == 0.0 {
            return Some((u, v));
        }
        if g2 == 0.0 {
            return None;
        }
        let mut step = [-l.value() * g[0] / g2, -l.value() * g[1] / g2];
        let n = step[0].hypot(step[1]);
        if n > max_step {
            step = [step[0] * max_step / n, step[1] * max_step / n];
        }
        u += step[0];
        v += step[1];
        if n <= 1e-15 * (1.0 + u.abs() + v.abs()) {
            return Some((u, v));
        }
    }
    let l = problem.density_at(u, v, NEWTON_ORDER).ok()?;
    let s = derivative_scale(&l, &problem.tol);
    (l.value().abs() <= 1e-10 * s).then_some((u, v))
}

/// One-dimensional Newton along the grid line of `edge`, for contour
/// ends on the domain boundary.
fn refine_on_edge(problem: &Problem, start: (f64, f64), edge: Edge, max_step: f64) -> Option<(f64, f64)> {
    let along_u = matches!(edge, Edge::H(..));
    let (mut u, mut v) = start;
    for _ in 0..40 {
        let l = problem.density_at(u, v, NEWTON_ORDER).ok()?;
        let d = if along_u { l.partial(1, 0) } else { l.partial(0, 1) };
        if l.value() == 0.0 {
            break;
        }
        if d == 0.0 {
            return None;
        }
        let step = (-l.value() / d).clamp(-max_step, max_step);
        if along_u {
            u += step;
        } else {
            v += step;
        }
        if step.abs() <= 1e-15 * (1.0 + u.abs() + v.abs()) {
            break;
        }
    }
    let l = problem.density_at(u, v, NEWTON_ORDER).ok()?;
    let ok = l.value().abs() <= 1e-10 * derivative_scale(&l, &problem.tol) && inside(&problem.surface.domain, (u, v));
    ok.then_some((u, v))
}

/// Newton on `(lambda, d_X lambda) = 0`.
fn refine_special(problem: &Problem, start: (f64, f64), max_step: f64) -> Option<(f64, f64)> {
    let (mut u, mut v) = start;
    for _ in 0..60 {
        let fr = problem.front_at(u, v, problem.order).ok()?;
        let l = crate::classify::density_det3(&fr.f, &fr.t).ok()?;
        let x = null_field(&fr.f).ok()?;
        let dl = directional_derivative(&l, &x).ok()?;
        let m = [[l.partial(1, 0), l.partial(0, 1)], [dl.partial(1, 0), dl.partial(0, 1)]];
        let r = [-l.value(), -dl.value()];
        let step = solve2(m, r)?;
        let n = step[0].hypot(step[1]);
        let k = if n > max_step { max_step / n } else { 1.0 };
        u += k * step[0];
        v += k * step[1];
        if n <= 1e-14 * (1.0 + u.abs() + v.abs()) {
            break;
        }
    }
    let fr = problem.front_at(u, v, problem.order).ok()?;
    let l = crate::classify::density_det3(&fr.f, &fr.t).ok()?;
    let dl = directional_derivative(&l, &null_field(&fr.f).ok()?).ok()?;
    let s = derivative_scale(&l, &problem.tol);
    let ok = l.value().abs() <= 1e-10 * s && dl.value().abs() <= problem.tol.zero * s;
    ok.then_some((u, v))
}

/// Newton on `grad lambda = 0`.
fn refine_critical(problem: &Problem, start: (f64, f64), max_step: f64) -> Option<(f64, f64)> {
    let (mut u, mut v) = start;
    for _ in 0..60 {
        let l = problem.density_at(u, v, NEWTON_ORDER).ok()?;
        let h = [[l.partial(2, 0), l.partial(1, 1)], [l.partial(1, 1), l.partial(0, 2)]];
        let step = solve2(h, [-l.partial(1, 0), -l.partial(0, 1)])?;
        let n = step[0].hypot(step[1]);
        let k = if n > max_step { max_step / n } else { 1.0 };
        u += k * step[0];
        v += k * step[1];
        if n <= 1e-14 * (1.0 + u.abs() + v.abs()) {
            break;
        }
    }
    Some((u, v))
}

/// Gauss-Newton on `(f_u, f_v) = 0`.
fn refine_rank0(problem: &Problem, start: (f64, f64), max_step: f64) -> Option<(f64, f64)> {
    let (mut u, mut v) = start;
    for _ in 0..60 {
        let fr = problem.front_at(u, v, NEWTON_ORDER).ok()?;
        let r: Vec<f64> = partial3(&fr.f, 1, 0).into_iter().chain(partial3(&fr.f, 0, 1)).collect();
        let ju: Vec<f64> = partial3(&fr.f, 2, 0).into_iter().chain(partial3(&fr.f, 1, 1)).collect();
        let jv: Vec<f64> = partial3(&fr.f, 1, 1).into_iter().chain(partial3(&fr.f, 0, 2)).collect();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let m = [[dot(&ju, &ju), dot(&ju, &jv)], [dot(&jv, &ju), dot(&jv, &jv)]];
        let step = solve2(m, [-dot(&ju, &r), -dot(&jv, &r)])?;
        let n = step[0].hypot(step[1]);
        let k = if n > max_step { max_step / n } else { 1.0 };
        u += k * step[0];
        v += k * step[1];
        if n <= 1e-14 * (1.0 + u.abs() + v.abs()) {
            break;
        }
    }
    Some((u, v))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocusSample {
    pub uv: (f64, f64),
    pub class: SingularityClass,
    /// `d_X lambda` when the sample is a rank-one singular point.
    pub dx_lambda: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct SingularLocus {
    pub polylines: Vec<Vec<LocusSample>>,
    /// Singular points that are not cuspidal edges.
    pub points: Vec<ClassificationReport>,
    pub failed_fraction: f64,
    pub notes: Vec<String>,
}

fn inside(d: &Domain, (u, v): (f64, f64)) -> bool {
    let eps = 1e-9 * (1.0 + d.u_max.abs().max(d.u_min.abs()).max(d.v_max.abs()).max(d.v_min.abs()));
    u >= d.u_min - eps && u <= d.u_max + eps && v >= d.v_min - eps && v <= d.v_max + eps
}

fn grid_local_minima(
    grid: &DensityGrid,
    key: impl Fn(&GridSample) -> f64,
    accept: impl Fn(&GridSample, f64) -> bool,
) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for j in 0..grid.nv {
        for i in 0..grid.nu {
            let Some(s) = grid.at(i, j) else { continue };
            let k0 = key(s);
            let mut is_min = true;
            let mut neigh_max: f64 = 0.0;
            for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (a, b) = (i as i64 + di, j as i64 + dj);
                    if a < 0 || b < 0 || a >= grid.nu as i64 || b >= grid.nv as i64 {
                        continue;
                    }
                    if let Some(n) = grid.at(a as usize, b as usize) {
                        let kn = key(n);
                        neigh_max = neigh_max.max(kn);
                        if kn < k0 {
                            is_min = false;
                        }
                    }
                }
            }
            if is_min && accept(s, neigh_max) {
                out.push(grid.uv(i, j));
            }
        }
    }
    out
}

/// Extracts the singular set of `problem` over its domain.
pub fn singular_locus(problem: &Problem, nu: usize, nv: usize) -> Result<SingularLocus> {
    let grid = sample_grid(problem, nu, nv)?;
    let h = grid.spacing();
    let domain = grid.domain;
    let mut notes = Vec::new();
    let failed = grid.failed_fraction();
    if failed > 0.0 {
        notes.push(format!(
            "front undefined at {:.1}% of grid points (projection singular); those cells are skipped",
            100.0 * failed
        ));
    }

    let segs = contour_segments(&grid);
    let edge_lines = chain(&segs);
    let classify = |uv: (f64, f64)| -> LocusSample {
        match problem.classify_at(uv.0, uv.1) {
            Ok(r) => LocusSample { uv, class: r.class, dx_lambda: r.margins.get("dXlambda").copied() },
            Err(_) => LocusSample { uv, class: SingularityClass::Unresolved, dx_lambda: None },
        }
    };
    let polylines: Vec<Vec<LocusSample>> = edge_lines
        .par_iter()
        .map(|line| {
            line.iter()
                .map(|e| {
                    let p0 = edge_point(&grid, *e);
                    let p = refine_to_zero(problem, p0, h)
                        .filter(|p| inside(&domain, *p))
                        .or_else(|| refine_on_edge(problem, p0, *e, h))
                        .unwrap_or(p0);
                    classify(p)
                })
                .collect()
        })
        .collect();

    // candidate starts for distinguished points
    let mut starts: Vec<(u8, (f64, f64))> = Vec::new();
    for line in &polylines {
        for k in 0..line.len() {
            let s = &line[k];
            if s.class != SingularityClass::CuspidalEdge && s.class != SingularityClass::Regular {
                starts.push((0, s.uv));
                continue;
            }
            let Some(d) = s.dx_lambda.map(f64::abs) else { continue };
            let prev = k.checked_sub(1).and_then(|p| line[p].dx_lambda).map(f64::abs);
            let next = line.get(k + 1).and_then(|n| n.dx_lambda).map(f64::abs);
            if prev.is_none_or(|p| d <= p) && next.is_none_or(|n| d <= n) && (prev.is_some() || next.is_some()) {
                starts.push((1, s.uv));
            }
        }
    }
    for uv in grid_local_minima(
        &grid,
        |s| s.grad[0].hypot(s.grad[1]),
        |s, neigh| s.lambda.abs() <= 2.0 * h * neigh.max(s.grad[0].hypot(s.grad[1])),
    ) {
        starts.push((2, uv));
    }
    let df_max = grid.samples.iter().flatten().map(|s| s.df2).fold(0.0, f64::max);
    for uv in
        grid_local_minima(&grid, |s| s.df2, |s, neigh| s.df2 <= 0.25 * neigh.max(1e-300) || s.df2 <= 1e-12 * df_max)
    {
        starts.push((3, uv));
    }

    let found: Vec<Option<ClassificationReport>> = starts
        .par_iter()
        .map(|&(kind, uv)| {
            let refined = match kind {
                0 => Some(uv),
                1 => refine_special(problem, uv, h),
                2 => refine_critical(problem, uv, h),
                _ => refine_rank0(problem, uv, h),
            }?;
            if !inside(&domain, refined) {
                return None;
            }
            let r = problem.classify_at(refined.0, refined.1).ok()?;
            match r.class {
                SingularityClass::Regular | SingularityClass::CuspidalEdge => None,
                _ => Some(r),
            }
        })
        .collect();
    let mut points: Vec<ClassificationReport> = Vec::new();
    for r in found.into_iter().flatten() {
        let dup = points.iter().any(|p| (p.point.0 - r.point.0).hypot(p.point.1 - r.point.1) <= 1e-6 * (1.0 + h));
        if !dup {
            points.push(r);
        }
    }
    points.sort_by(|a, b| a.point.partial_cmp(&b.point).unwrap_or(std::cmp::Ordering::Equal));
    Ok(SingularLocus { polylines, points, failed_fraction: failed, notes })
}
