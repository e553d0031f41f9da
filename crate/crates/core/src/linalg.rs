//! Small dense helpers: 2x2 symmetric eigenproblems and two-column
//! singular values.

/// Singular values `(max, min)` of the matrix with columns `a` and `b`.
///
/// The Gram determinant is formed by the Lagrange identity, which keeps the
/// small singular value accurate near rank one.
pub fn singular_values_2col(a: &[f64], b: &[f64]) -> (f64, f64) {
    let aa: f64 = a.iter().map(|x| x * x).sum();
    let bb: f64 = b.iter().map(|x| x * x).sum();
    let mut det = 0.0;
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            let m = a[i] * b[j] - a[j] * b[i];
            det += m * m;
        }
    }
    let tr = aa + bb;
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    let smax = ((tr + disc) / 2.0).sqrt();
    let smin = if smax > 0.0 { det.sqrt() / smax } else { 0.0 };
    (smax, smin)
}

/// Eigenvalues `(larger, smaller)` of `[[a, b], [b, c]]`.
pub fn sym2_eigenvalues(a: f64, b: f64, c: f64) -> (f64, f64) {
    let mean = (a + c) / 2.0;
    let r = (((a - c) / 2.0).powi(2) + b * b).sqrt();
    (mean + r, mean - r)
}

/// Solves the 2x2 system `m x = r`, or `None` when singular.
pub fn solve2(m: [[f64; 2]; 2], r: [f64; 2]) -> Option<[f64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs()));
    if det == 0.0 || det.abs() <= 1e-300 + 1e-15 * scale * scale {
        return None;
    }
    Some([(r[0] * m[1][1] - m[0][1] * r[1]) / det, (m[0][0] * r[1] - r[0] * m[1][0]) / det])
}

pub fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}
