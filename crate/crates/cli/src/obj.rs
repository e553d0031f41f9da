//! Wavefront OBJ export of the projected surface and its singular locus.

use std::fmt::Write;

use liefront::locus::SingularLocus;
use liefront::pipeline::{is_projection_failure, Problem};
use liefront::Result;
use rayon::prelude::*;

pub struct Mesh {
    pub text: String,
    /// Grid cells left out because a corner could not be projected.
    pub omitted_cells: usize,
}

fn front_point(problem: &Problem, u: f64, v: f64) -> Result<Option<[f64; 3]>> {
    match problem.front_at(u, v, 1) {
        Ok(fr) => Ok(Some(std::array::from_fn(|k| fr.f[k].value()))),
        Err(e) if is_projection_failure(&e) => Ok(None),
        Err(e) => Err(e),
    }
}

fn vertex(out: &mut String, p: &[f64; 3]) {
    let _ = writeln!(out, "v {} {} {}", p[0], p[1], p[2]);
}

/// Grid quads split into two triangles each, then the locus polylines as
/// `l` elements and isolated singular points as `p` elements.
pub fn build_mesh(problem: &Problem, nu: usize, nv: usize, locus: &SingularLocus) -> Result<Mesh> {
    let d = problem.surface.domain;
    let uv = |i: usize, j: usize| {
        (
            d.u_min + (d.u_max - d.u_min) * i as f64 / (nu - 1) as f64,
            d.v_min + (d.v_max - d.v_min) * j as f64 / (nv - 1) as f64,
        )
    };
    let pts: Vec<Option<[f64; 3]>> = (0..nu * nv)
        .into_par_iter()
        .map(|k| {
            let (u, v) = uv(k % nu, k / nu);
            front_point(problem, u, v)
        })
        .collect::<Result<_>>()?;

    let mut text = String::new();
    let _ = writeln!(text, "# projected surface, {nu} x {nv} grid");
    let _ = writeln!(text, "o surface");
    // OBJ indices are 1-based; 0 marks a missing vertex
    let mut index = vec![0usize; pts.len()];
    let mut next = 1;
    for (k, p) in pts.iter().enumerate() {
        if let Some(p) = p.filter(|p| p.iter().all(|x| x.is_finite())) {
            vertex(&mut text, &p);
            index[k] = next;
            next += 1;
        }
    }
    let mut omitted_cells = 0;
    for j in 0..nv - 1 {
        for i in 0..nu - 1 {
            let c = [j * nu + i, j * nu + i + 1, (j + 1) * nu + i + 1, (j + 1) * nu + i].map(|k| index[k]);
            if c.contains(&0) {
                omitted_cells += 1;
                continue;
            }
            let _ = writeln!(text, "f {} {} {}", c[0], c[1], c[2]);
            let _ = writeln!(text, "f {} {} {}", c[0], c[2], c[3]);
        }
    }

    if !locus.polylines.is_empty() {
        let _ = writeln!(text, "o singular_locus");
        for line in &locus.polylines {
            let mut ids = Vec::new();
            for s in line {
                if let Some(p) = front_point(problem, s.uv.0, s.uv.1)? {
                    vertex(&mut text, &p);
                    ids.push(next);
                    next += 1;
                }
            }
            if ids.len() >= 2 {
                let ids: Vec<String> = ids.iter().map(usize::to_string).collect();
                let _ = writeln!(text, "l {}", ids.join(" "));
            }
        }
    }
    if !locus.points.is_empty() {
        let _ = writeln!(text, "o singular_points");
        for r in &locus.points {
            if let Some(p) = front_point(problem, r.point.0, r.point.1)? {
                vertex(&mut text, &p);
                let _ = writeln!(text, "p {next}");
                next += 1;
            }
        }
    }
    Ok(Mesh { text, omitted_cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use liefront::locus::singular_locus;
    use liefront::models;

    #[test]
    fn cylinder_mesh_has_all_faces_and_a_locus_line() {
        let p = Problem::new(models::parabolic_cylinder(), Some(models::example_matrix()));
        let loc = singular_locus(&p, 21, 21).unwrap();
        let m = build_mesh(&p, 5, 4, &loc).unwrap();
        assert_eq!(m.omitted_cells, 0);
        assert_eq!(m.text.lines().filter(|l| l.starts_with("f ")).count(), 2 * 4 * 3);
        assert!(m.text.lines().any(|l| l.starts_with("l ")));
        assert_eq!(m.text.lines().filter(|l| l.starts_with("p ")).count(), 1);
        let nverts = m.text.lines().filter(|l| l.starts_with("v ")).count();
        for l in m.text.lines().filter(|l| l.starts_with("f ") || l.starts_with("l ")) {
            for id in l.split_whitespace().skip(1) {
                let id: usize = id.parse().unwrap();
                assert!(id >= 1 && id <= nverts);
            }
        }
    }
}
