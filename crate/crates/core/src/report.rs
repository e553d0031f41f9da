//! JSON reports with every number written to 17 significant digits.
//!
//! Numbers go through [`Sci`], which emits `{:.16e}` text as a raw JSON
//! value; non-finite values become `null`. Maps are ordered, so identical
//! inputs give byte-identical output.

use std::collections::BTreeMap;

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::classify::{ClassificationReport, SingularityClass};
use crate::locus::SingularLocus;
use crate::minkowski::{Mat6, Vec6};
use crate::steering::SteerOutcome;
use crate::surface_dsl::SurfaceExpr;
use crate::sweep::SweepResult;
use crate::transform::SteerMode;

/// A float serialized with 17 significant digits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sci(pub f64);

impl Serialize for Sci {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

fn sci_pair((a, b): (f64, f64)) -> [Sci; 2] {
    [Sci(a), Sci(b)]
}

fn sci_vec6(v: &Vec6) -> [Sci; 6] {
    v.0.map(Sci)
}

fn sci_mat6(m: &Mat6) -> [[Sci; 6]; 6] {
    m.0.map(|row| row.map(Sci))
}

#[derive(Serialize)]
pub struct SurfaceInfo {
    pub source: String,
    pub x: String,
    pub y: String,
    pub z: String,
    pub normal: Option<[String; 3]>,
    pub domain: [Sci; 4],
    pub order: usize,
}

impl SurfaceInfo {
    pub fn new(source: impl Into<String>, s: &SurfaceExpr, order: usize) -> Self {
        let d = s.domain;
        SurfaceInfo {
            source: source.into(),
            x: s.components[0].to_string(),
            y: s.components[1].to_string(),
            z: s.components[2].to_string(),
            normal: s.normal.as_ref().map(|n| [n[0].to_string(), n[1].to_string(), n[2].to_string()]),
            domain: [Sci(d.u_min), Sci(d.u_max), Sci(d.v_min), Sci(d.v_max)],
            order,
        }
    }
}

#[derive(Serialize)]
pub struct PointEntry {
    pub uv: [Sci; 2],
    pub rank: u8,
    pub class: SingularityClass,
    pub margins: BTreeMap<String, Sci>,
    pub method: crate::classify::Method,
}

impl From<&ClassificationReport> for PointEntry {
    fn from(r: &ClassificationReport) -> Self {
        PointEntry {
            uv: sci_pair(r.point),
            rank: r.rank,
            class: r.class,
            margins: r.margins.iter().map(|(k, v)| (k.clone(), Sci(*v))).collect(),
            method: r.method,
        }
    }
}

#[derive(Serialize)]
pub struct LocusEntry {
    pub uv: [Sci; 2],
    pub class: SingularityClass,
}

#[derive(Serialize)]
pub struct SweepSection {
    pub range: [Sci; 2],
    pub point: [Sci; 2],
    pub samples: Vec<(Sci, SingularityClass)>,
    pub transitions: Vec<TransitionEntry>,
}

#[derive(Serialize)]
pub struct TransitionEntry {
    pub from: SingularityClass,
    pub to: SingularityClass,
    pub lower: Sci,
    pub upper: Sci,
    pub xi_star: Sci,
    pub class_at: SingularityClass,
}

impl SweepSection {
    pub fn new(range: (f64, f64), point: (f64, f64), r: &SweepResult) -> Self {
        SweepSection {
            range: sci_pair(range),
            point: sci_pair(point),
            samples: r.samples.iter().map(|s| (Sci(s.xi), s.class)).collect(),
            transitions: r
                .transitions
                .iter()
                .map(|t| TransitionEntry {
                    from: t.from,
                    to: t.to,
                    lower: Sci(t.lower),
                    upper: Sci(t.upper),
                    xi_star: Sci(t.xi_star),
                    class_at: t.class_at,
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
pub struct SteeringSection {
    pub target: SingularityClass,
    pub point: [Sci; 2],
    pub mode: &'static str,
    pub seed: u64,
    pub phat: [Sci; 6],
    pub xi: Sci,
    pub sphere_index: usize,
    pub surface_type: crate::classify::SurfaceType,
    pub witness: Sci,
}

pub fn mode_name(m: SteerMode) -> &'static str {
    match m {
        SteerMode::Generic => "generic",
        SteerMode::Degenerate => "degenerate",
    }
}

impl SteeringSection {
    pub fn new(target: SingularityClass, point: (f64, f64), out: &SteerOutcome) -> Self {
        SteeringSection {
            target,
            point: sci_pair(point),
            mode: mode_name(out.context.mode),
            seed: out.context.seed,
            phat: sci_vec6(&out.context.phat_family(out.xi)),
            xi: Sci(out.xi),
            sphere_index: out.index,
            surface_type: out.surface_type,
            witness: Sci(out.context.witness),
        }
    }
}

#[derive(Serialize)]
pub struct MatrixCheckEntry {
    pub label: String,
    pub residual: Sci,
    pub tolerance: Sci,
    pub is_lie: bool,
}

/// The top-level report.
#[derive(Serialize)]
pub struct Report {
    pub surface: Option<SurfaceInfo>,
    #[serde(rename = "matrixA")]
    pub matrix_a: Option<[[Sci; 6]; 6]>,
    pub points: Vec<PointEntry>,
    pub locus: Vec<Vec<LocusEntry>>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steering: Option<SteeringSection>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub matrices: Vec<MatrixCheckEntry>,
}

impl Report {
    pub fn new(surface: Option<SurfaceInfo>, matrix: Option<&Mat6>) -> Self {
        Report {
            surface,
            matrix_a: matrix.map(sci_mat6),
            points: Vec::new(),
            locus: Vec::new(),
            notes: Vec::new(),
            sweep: None,
            steering: None,
            matrices: Vec::new(),
        }
    }

    pub fn add_locus(&mut self, locus: &SingularLocus) {
        self.points.extend(locus.points.iter().map(PointEntry::from));
        self.locus.extend(
            locus
                .polylines
                .iter()
                .map(|pl| pl.iter().map(|s| LocusEntry { uv: sci_pair(s.uv), class: s.class }).collect()),
        );
        self.notes.extend(locus.notes.iter().cloned());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
