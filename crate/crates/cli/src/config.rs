//! Run configuration: flags over config file over defaults.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use liefront::classify::{SingularityClass, Tolerances};
use liefront::surface_dsl::Domain;
use liefront::transform::SteerMode;
use serde::Deserialize;

use crate::args::{ModeArg, RunArgs};
use crate::UsageError;

pub const DEFAULT_GRID: (usize, usize) = (101, 101);
pub const DEFAULT_SAMPLES: usize = 101;
pub const ORDER_RANGE: std::ops::RangeInclusive<usize> = 4..=10;

/// Keys accepted in a TOML config file. Paths are relative to the file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    surface: Option<PathBuf>,
    matrix: Option<PathBuf>,
    xi_range: Option<[f64; 2]>,
    point: Option<[f64; 2]>,
    grid: Option<[usize; 2]>,
    domain: Option<[f64; 4]>,
    order: Option<usize>,
    report: Option<PathBuf>,
    obj: Option<PathBuf>,
    matrix_out: Option<PathBuf>,
    seed: Option<u64>,
    target: Option<String>,
    mode: Option<ModeArg>,
    samples: Option<usize>,
    #[serde(default)]
    tol: FileTol,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileTol {
    zero: Option<f64>,
    rank: Option<f64>,
    front: Option<f64>,
    scale_floor: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub surface: Option<PathBuf>,
    pub matrix: Option<PathBuf>,
    pub xi_range: (f64, f64),
    pub point: Option<(f64, f64)>,
    pub grid: (usize, usize),
    pub domain: Option<Domain>,
    pub order: usize,
    pub report: Option<PathBuf>,
    pub obj: Option<PathBuf>,
    pub matrix_out: Option<PathBuf>,
    pub seed: u64,
    pub target: Option<SingularityClass>,
    pub mode: Option<SteerMode>,
    pub samples: usize,
    pub tol: Tolerances,
}

fn pair<T: Copy>(v: &[T]) -> (T, T) {
    (v[0], v[1])
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn tolerance(name: &str, value: Option<f64>, default: f64) -> Result<f64> {
    match value {
        Some(t) if !(t.is_finite() && t > 0.0) => Err(usage(format!("--tol-{name} must be positive, got {t}"))),
        Some(t) => Ok(t),
        None => Ok(default),
    }
}

impl RunConfig {
    pub fn resolve(args: &RunArgs) -> Result<Self> {
        let file = match &args.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let mut cfg: FileConfig =
                    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
                let dir = path.parent().unwrap_or(Path::new(""));
                for p in [&mut cfg.surface, &mut cfg.matrix, &mut cfg.report, &mut cfg.obj, &mut cfg.matrix_out]
                    .into_iter()
                    .flatten()
                {
                    if p.is_relative() {
                        *p = dir.join(&*p);
                    }
                }
                cfg
            }
            None => FileConfig::default(),
        };

        let grid = args.grid.as_deref().map(pair).or(file.grid.map(|g| (g[0], g[1]))).unwrap_or(DEFAULT_GRID);
        if grid.0 < 2 || grid.1 < 2 {
            return Err(usage(format!("grid needs at least 2 points per axis, got {} x {}", grid.0, grid.1)));
        }
        let order = args.order.or(file.order).unwrap_or(liefront::jets::DEFAULT_ORDER);
        if !ORDER_RANGE.contains(&order) {
            return Err(usage(format!("jet order must lie in 4..=10, got {order}")));
        }
        let domain = match args.domain.as_deref().or(file.domain.as_ref().map(|d| &d[..])) {
            Some(d) => {
                if d.iter().any(|x| !x.is_finite()) || d[0] >= d[1] || d[2] >= d[3] {
                    return Err(usage("domain needs finite bounds with UMIN < UMAX and VMIN < VMAX"));
                }
                Some(Domain { u_min: d[0], u_max: d[1], v_min: d[2], v_max: d[3] })
            }
            None => None,
        };
        let xi_range = args.xi_range.as_deref().map(pair).or(file.xi_range.map(|r| (r[0], r[1]))).unwrap_or((0.0, 1.0));
        if !(xi_range.0.is_finite() && xi_range.1.is_finite() && xi_range.0 < xi_range.1) {
            return Err(usage("xi range needs finite A < B"));
        }
        let point = args.point.as_deref().map(pair).or(file.point.map(|p| (p[0], p[1])));
        let samples = args.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES);
        if samples < 2 {
            return Err(usage("sweep needs at least 2 samples"));
        }
        let target =
            args.target.clone().or(file.target).map(|t| t.parse::<SingularityClass>().map_err(usage)).transpose()?;
        let mode = args.mode.or(file.mode).map(|m| match m {
            ModeArg::Generic => SteerMode::Generic,
            ModeArg::Degenerate => SteerMode::Degenerate,
        });

        let d = Tolerances::default();
        let tol = Tolerances {
            zero: tolerance("zero", args.tol.tol_zero.or(file.tol.zero), d.zero)?,
            rank: tolerance("rank", args.tol.tol_rank.or(file.tol.rank), d.rank)?,
            front: tolerance("front", args.tol.tol_front.or(file.tol.front), d.front)?,
            scale_floor: tolerance("scale-floor", args.tol.tol_scale_floor.or(file.tol.scale_floor), d.scale_floor)?,
        };

        Ok(RunConfig {
            surface: args.surface.clone().or(file.surface),
            matrix: args.matrix.clone().or(file.matrix),
            xi_range,
            point,
            grid,
            domain,
            order,
            report: args.report.clone().or(file.report),
            obj: args.obj.clone().or(file.obj),
            matrix_out: args.matrix_out.clone().or(file.matrix_out),
            seed: args.seed.or(file.seed).unwrap_or(0),
            target,
            mode,
            samples,
            tol,
        })
    }

    pub fn require_point(&self) -> Result<(f64, f64)> {
        self.point.ok_or_else(|| usage("this command needs --point U V"))
    }
}
