//! Class transitions along a one-parameter family of transformations.

use rayon::prelude::*;

use crate::classify::SingularityClass;
use crate::error::{Error, Result};

/// Bisection stops once the bracket is narrower than this.
pub const BISECTION_WIDTH: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSample {
    pub xi: f64,
    pub class: SingularityClass,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub from: SingularityClass,
    pub to: SingularityClass,
    /// Last parameter still classified `from`.
    pub lower: f64,
    /// First parameter classified `to`.
    pub upper: f64,
    /// Midpoint of `lower` and `upper`.
    pub xi_star: f64,
    /// Class at `xi_star`.
    pub class_at: SingularityClass,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub samples: Vec<SweepSample>,
    pub transitions: Vec<Transition>,
}

/// Classes that only occur on thin parameter sets between generic ones.
fn is_degenerate(c: SingularityClass) -> bool {
    matches!(c, SingularityClass::Type2Degenerate | SingularityClass::Type3Degenerate | SingularityClass::Unresolved)
}

fn bisect(
    classify: &(dyn Fn(f64) -> SingularityClass + Sync),
    mut lo: f64,
    mut hi: f64,
    lo_holds: bool,
    class: SingularityClass,
) -> (f64, f64) {
    // invariant: the predicate `classify(x) == class` is `lo_holds` at lo
    // and `!lo_holds` at hi
    while hi - lo > BISECTION_WIDTH / 2.0 {
        let mid = 0.5 * (lo + hi);
        if (classify(mid) == class) == lo_holds {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Classifies on `samples` evenly spaced parameters in `[a, b]` and
/// bisects every change of class. A run of degenerate samples between two
/// generic classes is folded into a single transition.
pub fn sweep(
    range: (f64, f64),
    samples: usize,
    classify: &(dyn Fn(f64) -> SingularityClass + Sync),
) -> Result<SweepResult> {
    let (a, b) = range;
    assert!(samples >= 2 && b > a, "sweep needs a non-empty range and two samples");
    let xs: Vec<f64> = (0..samples).map(|k| a + (b - a) * k as f64 / (samples - 1) as f64).collect();
    let classes: Vec<SingularityClass> = xs.par_iter().map(|&x| classify(x)).collect();
    let out: Vec<SweepSample> = xs.iter().zip(&classes).map(|(&xi, &class)| SweepSample { xi, class }).collect();

    let mut transitions = Vec::new();
    let mut k = 0;
    while k + 1 < out.len() {
        if out[k + 1].class == out[k].class {
            k += 1;
            continue;
        }
        let from = out[k].class;
        // fold a degenerate run that separates two different generic classes
        let mut m = k + 1;
        if !is_degenerate(from) {
            let mut e = m;
            while e + 1 < out.len() && is_degenerate(out[e].class) {
                e += 1;
            }
            if !is_degenerate(out[e].class) && out[e].class != from {
                m = e;
            }
        }
        let to = out[m].class;
        let (lower, _) = bisect(classify, out[k].xi, out[k + 1].xi, true, from);
        let (_, upper) = bisect(classify, out[m - 1].xi, out[m].xi, false, to);
        let xi_star = 0.5 * (lower + upper);
        transitions.push(Transition { from, to, lower, upper, xi_star, class_at: classify(xi_star) });
        k = m;
    }
    if transitions.is_empty() {
        return Err(Error::NoTransition);
    }
    Ok(SweepResult { samples: out, transitions })
}
