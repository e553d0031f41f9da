//! Subcommand implementations.

use std::path::Path;

use anyhow::{bail, Context, Result};
use liefront::classify::SingularityClass;
use liefront::locus::{singular_locus, SingularLocus};
use liefront::minkowski::{format_matrix, is_lie_transformation, parse_matrix, Mat6};
use liefront::pipeline::Problem;
use liefront::report::{MatrixCheckEntry, PointEntry, Report, Sci, SteeringSection, SurfaceInfo, SweepSection};
use liefront::steering::{steer_to_target, SteerRequest, SteeredFamily};
use liefront::surface_dsl::{parse_expr, parse_family_file, parse_surface_file, Scope};
use liefront::sweep::sweep;
use liefront::transform::{SteerMode, LIE_TOL};

use crate::args::CheckArgs;
use crate::config::RunConfig;
use crate::obj::build_mesh;
use crate::output::{emit, write_atomic};
use crate::{ProjectionFailure, UsageError};

/// Above this fraction of unprojectable grid points a run is abandoned.
pub const MAX_FAILED_FRACTION: f64 = 0.5;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_problem(cfg: &RunConfig) -> Result<(Problem, SurfaceInfo)> {
    let path = cfg.surface.as_deref().ok_or_else(|| UsageError("this command needs --surface FILE".into()))?;
    let mut surface = parse_surface_file(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    if let Some(d) = cfg.domain {
        surface = surface.with_domain(d);
    }
    let info = SurfaceInfo::new(path.display().to_string(), &surface, cfg.order);
    let problem = Problem::new(surface, None).with_order(cfg.order).with_tolerances(cfg.tol);
    Ok((problem, info))
}

fn load_matrix(path: &Path) -> Result<Mat6> {
    let m = parse_matrix(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    let check = is_lie_transformation(&m, LIE_TOL);
    if !check.is_lie {
        return Err(liefront::Error::NotOrthogonal(check.residual)).with_context(|| format!("in {}", path.display()));
    }
    Ok(m)
}

/// The matrix of a run: steered when a target is given, else from a file.
fn resolve_matrix(cfg: &RunConfig, problem: &Problem) -> Result<(Option<Mat6>, Option<SteeringSection>)> {
    if let Some(target) = cfg.target {
        if cfg.matrix.is_some() {
            bail!(UsageError("give either --matrix or --target, not both".into()));
        }
        let point = cfg.require_point()?;
        let req = SteerRequest { mode: cfg.mode, ..SteerRequest::new(target, point, cfg.seed) };
        let out = steer_to_target(problem, &req)?;
        return Ok((Some(out.matrix), Some(SteeringSection::new(target, point, &out))));
    }
    Ok((cfg.matrix.as_deref().map(load_matrix).transpose()?, None))
}

fn locus_checked(problem: &Problem, cfg: &RunConfig) -> Result<SingularLocus> {
    let locus = singular_locus(problem, cfg.grid.0, cfg.grid.1)?;
    if locus.failed_fraction > MAX_FAILED_FRACTION {
        bail!(ProjectionFailure { fraction: locus.failed_fraction });
    }
    Ok(locus)
}

fn write_mesh(
    problem: &Problem,
    cfg: &RunConfig,
    locus: &SingularLocus,
    path: &Path,
    report: &mut Report,
) -> Result<()> {
    let mesh = build_mesh(problem, cfg.grid.0, cfg.grid.1, locus)?;
    if mesh.omitted_cells > 0 {
        report.notes.push(format!("mesh: {} grid cells omitted where the projection is singular", mesh.omitted_cells));
    }
    write_atomic(path, &mesh.text)
}

pub fn classify(cfg: &RunConfig) -> Result<()> {
    let (mut problem, info) = load_problem(cfg)?;
    let (matrix, steering) = resolve_matrix(cfg, &problem)?;
    problem.matrix = matrix;
    let locus = locus_checked(&problem, cfg)?;
    let mut report = Report::new(Some(info), problem.matrix.as_ref());
    report.steering = steering;
    report.add_locus(&locus);
    if let Some(path) = &cfg.obj {
        write_mesh(&problem, cfg, &locus, path, &mut report)?;
    }
    emit(cfg.report.as_deref(), &report.to_json())?;
    let samples: usize = locus.polylines.iter().map(Vec::len).sum();
    eprintln!(
        "{} singular point(s), {} locus polyline(s) with {samples} samples",
        locus.points.len(),
        locus.polylines.len()
    );
    for p in &locus.points {
        eprintln!("  ({:.3e}, {:.3e}) rank {} {} [{:?}]", p.point.0, p.point.1, p.rank, p.class, p.method);
    }
    Ok(())
}

pub fn mesh(cfg: &RunConfig) -> Result<()> {
    let path = cfg.obj.as_deref().ok_or_else(|| UsageError("mesh needs --obj FILE".into()))?;
    let (mut problem, info) = load_problem(cfg)?;
    let (matrix, steering) = resolve_matrix(cfg, &problem)?;
    problem.matrix = matrix;
    let locus = locus_checked(&problem, cfg)?;
    let mut report = Report::new(Some(info), problem.matrix.as_ref());
    report.steering = steering;
    report.add_locus(&locus);
    write_mesh(&problem, cfg, &locus, path, &mut report)?;
    if let Some(r) = &cfg.report {
        write_atomic(r, &report.to_json())?;
    }
    eprintln!("wrote {}", path.display());
    Ok(())
}

pub fn sweep_cmd(cfg: &RunConfig) -> Result<()> {
    let (problem, info) = load_problem(cfg)?;
    let (u, v) = cfg.require_point()?;
    let family: Box<dyn Fn(f64) -> liefront::Result<Mat6> + Sync> = match (&cfg.matrix, cfg.mode) {
        (Some(path), _) => {
            let fam = parse_family_file(&read(path)?).with_context(|| format!("in {}", path.display()))?;
            Box::new(move |xi| fam.eval(xi).map(Mat6))
        }
        (None, Some(SteerMode::Degenerate)) => {
            let fam = SteeredFamily::new(&problem, (u, v), cfg.seed)?;
            Box::new(move |xi| fam.matrix(xi))
        }
        (None, _) => bail!(UsageError("sweep needs --matrix FAMILY_FILE or --mode degenerate".into())),
    };
    let classify_at = |xi: f64| -> liefront::Result<liefront::classify::ClassificationReport> {
        let p = Problem { matrix: Some(family(xi)?), ..problem.clone() };
        p.classify_at(u, v)
    };
    let class_of = |xi: f64| classify_at(xi).map_or(SingularityClass::Unresolved, |r| r.class);
    let result = sweep(cfg.xi_range, cfg.samples, &class_of)?;

    let first = result.transitions[0].xi_star;
    let mut report = Report::new(Some(info), Some(&family(first)?));
    report.notes.push(format!("matrixA is the family member at xi = {first:.16e}"));
    for t in &result.transitions {
        match classify_at(t.xi_star) {
            Ok(r) => report.points.push(PointEntry::from(&r)),
            Err(e) => report.notes.push(format!("xi = {:.16e}: {e}", t.xi_star)),
        }
    }
    report.sweep = Some(SweepSection::new(cfg.xi_range, (u, v), &result));
    emit(cfg.report.as_deref(), &report.to_json())?;
    for t in &result.transitions {
        eprintln!(
            "{} -> {} at xi* = {:.12} (bracket width {:.1e}); class at xi*: {}",
            t.from,
            t.to,
            t.xi_star,
            t.upper - t.lower,
            t.class_at
        );
    }
    Ok(())
}

pub fn steer_cmd(cfg: &RunConfig) -> Result<()> {
    let target = cfg.target.ok_or_else(|| UsageError("steer needs --target CLASS".into()))?;
    let point = cfg.require_point()?;
    let (problem, info) = load_problem(cfg)?;
    let req = SteerRequest { mode: cfg.mode, ..SteerRequest::new(target, point, cfg.seed) };
    let out = steer_to_target(&problem, &req)?;
    if let Some(path) = &cfg.matrix_out {
        write_atomic(path, &format_matrix(&out.matrix))?;
    }
    let mut report = Report::new(Some(info), Some(&out.matrix));
    report.points.push(PointEntry::from(&out.report));
    report.steering = Some(SteeringSection::new(target, point, &out));
    emit(cfg.report.as_deref(), &report.to_json())?;
    eprintln!("{} at ({}, {}) [{:?}]", out.report.class, point.0, point.1, out.report.method);
    Ok(())
}

fn parse_xi(text: &str) -> Result<f64> {
    let e = parse_expr(text, &Scope::default()).with_context(|| format!("in --xi `{text}`"))?;
    let vars: [(&str, f64); 0] = [];
    Ok(e.eval(&liefront::surface_dsl::Env::new(&vars, 0.0))?)
}

fn is_family(text: &str) -> bool {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .is_some_and(|l| l.starts_with("family"))
}

/// Returns whether every matrix passed.
pub fn check_matrix(args: &CheckArgs) -> Result<bool> {
    let xis = args.xi.iter().map(|x| parse_xi(x)).collect::<Result<Vec<_>>>()?;
    let mut entries = Vec::new();
    for path in &args.matrices {
        let text = read(path)?;
        if is_family(&text) {
            let fam = parse_family_file(&text).with_context(|| format!("in {}", path.display()))?;
            if xis.is_empty() {
                bail!(UsageError(format!("{} is a matrix family; give parameter values with --xi", path.display())));
            }
            for &xi in &xis {
                entries.push((format!("{} at {} = {xi:.16e}", path.display(), fam.parameter), Mat6(fam.eval(xi)?)));
            }
        } else {
            let m = parse_matrix(&text).with_context(|| format!("in {}", path.display()))?;
            entries.push((path.display().to_string(), m));
        }
    }
    let mut report = Report::new(None, None);
    let mut ok = true;
    for (label, m) in entries {
        let check = is_lie_transformation(&m, args.tol_lie);
        ok &= check.is_lie;
        println!("{} {label}: residual {:.3e}", if check.is_lie { "PASS" } else { "FAIL" }, check.residual);
        report.matrices.push(MatrixCheckEntry {
            label,
            residual: Sci(check.residual),
            tolerance: Sci(args.tol_lie),
            is_lie: check.is_lie,
        });
    }
    if let Some(path) = &args.report {
        write_atomic(path, &report.to_json())?;
    }
    Ok(ok)
}
