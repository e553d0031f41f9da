//! Linear algebra of `R^{4,2}` with the metric `diag(-1, 1, 1, 1, 1, -1)`.
//!
//! Vectors are representatives of lightcone lines; no projective classes are
//! carried around, and every operation that depends on a scaling states it.

use std::fmt::Write as _;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Metric signs of the six coordinates.
pub const SIGNS: [f64; 6] = [-1.0, 1.0, 1.0, 1.0, 1.0, -1.0];

/// Timelike point-sphere vector of the Euclidean gauge.
pub const P: Vec6 = Vec6([0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);

/// Null spaceform vector of the Euclidean gauge.
pub const Q: Vec6 = Vec6([1.0, -1.0, 0.0, 0.0, 0.0, 0.0]);

/// Relative cutoff below which a Gram-Schmidt candidate counts as null.
pub const NULL_TOL: f64 = 1e-10;

/// Tolerance on `(x, x) = -1` for unit timelike inputs.
pub const UNIT_TIMELIKE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Vec6(pub [f64; 6]);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat6(pub [[f64; 6]; 6]);

pub fn inner(x: &Vec6, y: &Vec6) -> f64 {
    (0..6).map(|k| SIGNS[k] * x.0[k] * y.0[k]).sum()
}

impl Vec6 {
    pub const ZERO: Vec6 = Vec6([0.0; 6]);

    pub fn new(c: [f64; 6]) -> Self {
        Vec6(c)
    }

    pub fn basis(k: usize) -> Self {
        let mut v = Self::ZERO;
        v.0[k] = 1.0;
        v
    }

    pub fn inner(&self, other: &Vec6) -> f64 {
        inner(self, other)
    }

    /// Self inner product `(x, x)`.
    pub fn square(&self) -> f64 {
        inner(self, self)
    }

    pub fn euclid_norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m: f64, c| m.max(c.abs()))
    }

    /// Euclidean part `(x3, x4, x5)`.
    pub fn spatial(&self) -> [f64; 3] {
        [self.0[2], self.0[3], self.0[4]]
    }
}

impl Index<usize> for Vec6 {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

impl IndexMut<usize> for Vec6 {
    fn index_mut(&mut self, k: usize) -> &mut f64 {
        &mut self.0[k]
    }
}

impl Add for Vec6 {
    type Output = Vec6;
    fn add(self, r: Vec6) -> Vec6 {
        Vec6(std::array::from_fn(|k| self.0[k] + r.0[k]))
    }
}

impl Sub for Vec6 {
    type Output = Vec6;
    fn sub(self, r: Vec6) -> Vec6 {
        Vec6(std::array::from_fn(|k| self.0[k] - r.0[k]))
    }
}

impl Mul<f64> for Vec6 {
    type Output = Vec6;
    fn mul(self, s: f64) -> Vec6 {
        Vec6(self.0.map(|c| c * s))
    }
}

impl Neg for Vec6 {
    type Output = Vec6;
    fn neg(self) -> Vec6 {
        self * -1.0
    }
}

impl Mat6 {
    pub fn identity() -> Self {
        Mat6(std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 })))
    }

    pub fn zero() -> Self {
        Mat6([[0.0; 6]; 6])
    }

    pub fn diag(d: [f64; 6]) -> Self {
        let mut m = Self::zero();
        for k in 0..6 {
            m.0[k][k] = d[k];
        }
        m
    }

    /// The metric matrix `J`.
    pub fn metric() -> Self {
        Self::diag(SIGNS)
    }

    pub fn transpose(&self) -> Self {
        Mat6(std::array::from_fn(|i| std::array::from_fn(|j| self.0[j][i])))
    }

    pub fn row(&self, i: usize) -> Vec6 {
        Vec6(self.0[i])
    }

    pub fn column(&self, j: usize) -> Vec6 {
        Vec6(std::array::from_fn(|i| self.0[i][j]))
    }

    pub fn apply(&self, x: &Vec6) -> Vec6 {
        Vec6(std::array::from_fn(|i| (0..6).map(|j| self.0[i][j] * x.0[j]).sum()))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m: f64, c| m.max(c.abs()))
    }

    /// Inverse of an `O(4,2)` element, `J A^T J`.
    pub fn lie_inverse(&self) -> Self {
        Mat6(std::array::from_fn(|i| std::array::from_fn(|j| SIGNS[i] * self.0[j][i] * SIGNS[j])))
    }

    /// Outer product `x y^T`.
    pub fn outer(x: &Vec6, y: &Vec6) -> Self {
        Mat6(std::array::from_fn(|i| std::array::from_fn(|j| x.0[i] * y.0[j])))
    }

    pub fn scale(&self, s: f64) -> Self {
        Mat6(self.0.map(|r| r.map(|c| c * s)))
    }
}

impl Add for Mat6 {
    type Output = Mat6;
    fn add(self, r: Mat6) -> Mat6 {
        Mat6(std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j] + r.0[i][j])))
    }
}

impl Sub for Mat6 {
    type Output = Mat6;
    fn sub(self, r: Mat6) -> Mat6 {
        Mat6(std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j] - r.0[i][j])))
    }
}

impl Mul for Mat6 {
    type Output = Mat6;
    fn mul(self, r: Mat6) -> Mat6 {
        Mat6(std::array::from_fn(|i| std::array::from_fn(|j| (0..6).map(|k| self.0[i][k] * r.0[k][j]).sum())))
    }
}

impl Mul<Vec6> for Mat6 {
    type Output = Vec6;
    fn mul(self, x: Vec6) -> Vec6 {
        self.apply(&x)
    }
}

/// `||A^T J A - J||_inf` (largest absolute entry).
pub fn lie_residual(a: &Mat6) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..6 {
        for j in 0..6 {
            let s: f64 = (0..6).map(|k| a.0[k][i] * SIGNS[k] * a.0[k][j]).sum();
            let target = if i == j { SIGNS[i] } else { 0.0 };
            worst = worst.max((s - target).abs());
        }
    }
    worst
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LieCheck {
    pub is_lie: bool,
    pub residual: f64,
}

pub fn is_lie_transformation(a: &Mat6, tol: f64) -> LieCheck {
    let residual = lie_residual(a);
    LieCheck { is_lie: residual <= tol, residual }
}

fn check_unit_timelike(x: &Vec6) -> Result<()> {
    let s = x.square();
    if (s + 1.0).abs() > UNIT_TIMELIKE_TOL {
        Err(Error::NotUnitTimelike(s))
    } else {
        Ok(())
    }
}

/// A pseudo-orthonormal basis `b_k` with signs `eps_k = (b_k, b_k)`.
#[derive(Clone, Debug)]
pub struct PseudoBasis {
    pub vectors: [Vec6; 6],
    pub signs: [f64; 6],
}

fn project_out(c: &Vec6, chosen: &[(Vec6, f64)]) -> Vec6 {
    let mut out = *c;
    for (b, eps) in chosen {
        out = out - *b * (eps * inner(&out, b));
    }
    out
}

fn complete_with(first: &Vec6, candidates: &[Vec6]) -> Option<PseudoBasis> {
    let eps0 = first.square().signum();
    let mut chosen: Vec<(Vec6, f64)> = vec![(*first * (1.0 / first.square().abs().sqrt()), eps0)];
    while chosen.len() < 6 {
        let best = candidates
            .iter()
            .map(|c| project_out(&project_out(c, &chosen), &chosen))
            .filter(|c| c.euclid_norm() > 0.0)
            .max_by(|a, b| a.square().abs().total_cmp(&b.square().abs()))?;
        let s = best.square();
        let n2 = best.euclid_norm().powi(2);
        if s.abs() <= NULL_TOL * n2 {
            return None;
        }
        chosen.push((best * (1.0 / s.abs().sqrt()), s.signum()));
    }
    Some(PseudoBasis { vectors: std::array::from_fn(|k| chosen[k].0), signs: std::array::from_fn(|k| chosen[k].1) })
}

/// Completes a non-null `first` vector to a pseudo-orthonormal basis.
///
/// Candidates are the standard basis vectors, greedily pivoting on the
/// largest `|(c, c)|` after orthogonalization. If every remaining candidate
/// is numerically null, the pairwise sums and differences are tried too.
pub fn pseudo_orthonormal_basis(first: &Vec6) -> Result<PseudoBasis> {
    if first.max_abs() == 0.0 {
        return Err(Error::ZeroVector);
    }
    if first.square().abs() <= NULL_TOL * first.euclid_norm().powi(2) {
        return Err(Error::GramSchmidtBreakdown);
    }
    let standard: Vec<Vec6> = (0..6).map(Vec6::basis).collect();
    if let Some(b) = complete_with(first, &standard) {
        return Ok(b);
    }
    let mut extended = standard.clone();
    for i in 0..6 {
        for j in (i + 1)..6 {
            extended.push(standard[i] + standard[j]);
            extended.push(standard[i] - standard[j]);
        }
    }
    complete_with(first, &extended).ok_or(Error::GramSchmidtBreakdown)
}

/// Returns `A` in `O(4,2)` with `A phat = p`, both unit timelike.
///
/// Each vector is completed to a pseudo-orthonormal basis and the bases are
/// matched sign by sign, `phat` to `p` first.
pub fn build_isometry_sending(phat: &Vec6, p: &Vec6) -> Result<Mat6> {
    check_unit_timelike(phat)?;
    check_unit_timelike(p)?;
    let from = pseudo_orthonormal_basis(phat)?;
    let to = pseudo_orthonormal_basis(p)?;
    let mut neg_to: Vec<Vec6> = Vec::new();
    let mut pos_to: Vec<Vec6> = Vec::new();
    for k in 1..6 {
        if to.signs[k] < 0.0 {
            neg_to.push(to.vectors[k]);
        } else {
            pos_to.push(to.vectors[k]);
        }
    }
    let (mut ni, mut pi) = (0, 0);
    let mut a = Mat6::zero();
    for k in 0..6 {
        let b = from.vectors[k];
        let eps = from.signs[k];
        let c = if k == 0 {
            to.vectors[0]
        } else if eps < 0.0 {
            ni += 1;
            *neg_to.get(ni - 1).ok_or(Error::GramSchmidtBreakdown)?
        } else {
            pi += 1;
            *pos_to.get(pi - 1).ok_or(Error::GramSchmidtBreakdown)?
        };
        // eps * c (J b)^T
        let jb = Vec6(std::array::from_fn(|i| SIGNS[i] * b.0[i]));
        a = a + Mat6::outer(&c, &jb).scale(eps);
    }
    Ok(a)
}

/// Euclidean reading of a lightcone line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SphereInterp {
    /// Oriented sphere of the given center and radius; `sign` is the sign of
    /// the last coordinate after scaling to `a + b = 1`.
    MetricSphere {
        center: [f64; 3],
        radius: f64,
        sign: f64,
    },
    /// Plane `<normal, x> + offset = 0` with unit `normal`.
    Plane {
        normal: [f64; 3],
        offset: f64,
    },
    PointSphere {
        point: [f64; 3],
    },
}

/// Cutoff on `|(sigma, q)| / |sigma|` selecting the plane branch.
pub const PLANE_TOL: f64 = 1e-10;
/// Cutoff on `|c|` after scaling selecting a point sphere.
pub const POINT_TOL: f64 = 1e-10;
/// Relative lightlike tolerance accepted by [`interpret_sphere`].
pub const LIGHTLIKE_TOL: f64 = 1e-8;

pub fn interpret_sphere(sigma: &Vec6) -> Result<SphereInterp> {
    let norm = sigma.euclid_norm();
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    let s = sigma.square();
    if s.abs() > LIGHTLIKE_TOL * norm * norm {
        return Err(Error::NotLightlike(s));
    }
    let apb = sigma[0] + sigma[1];
    if inner(sigma, &Q).abs() < PLANE_TOL * norm {
        let v = *sigma * (1.0 / sigma[5]);
        let n = v.spatial();
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        return Ok(SphereInterp::Plane { normal: n.map(|c| c / len), offset: (v[1] - v[0]) / 2.0 });
    }
    let v = *sigma * (1.0 / apb);
    let c = v[5];
    if c.abs() < POINT_TOL {
        return Ok(SphereInterp::PointSphere { point: v.spatial() });
    }
    Ok(SphereInterp::MetricSphere { center: v.spatial(), radius: c.abs(), sign: c.signum() })
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Lift of the sphere with `center` and signed radius `c` (`a + b = 1`).
pub fn sphere_lift(center: [f64; 3], c: f64) -> Vec6 {
    let z2 = dot3(&center, &center);
    Vec6([(1.0 - c * c + z2) / 2.0, (1.0 + c * c - z2) / 2.0, center[0], center[1], center[2], c])
}

/// Lift of the point `x`, i.e. the point sphere `(1+|x|^2)/2, (1-|x|^2)/2, x, 0`.
pub fn point_lift(x: [f64; 3]) -> Vec6 {
    sphere_lift(x, 0.0)
}

/// Lift of the plane `<normal, x> + offset = 0`, normal of unit length.
pub fn plane_lift(normal: [f64; 3], offset: f64) -> Vec6 {
    Vec6([-offset, offset, normal[0], normal[1], normal[2], 1.0])
}

/// Parses a matrix file: six lines of six whitespace separated numbers.
/// Blank lines and `#` comments are ignored.
pub fn parse_matrix(text: &str) -> Result<Mat6> {
    let rows: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    if rows.len() != 6 {
        return Err(Error::MatrixFormat(format!("expected 6 rows, found {}", rows.len())));
    }
    let mut m = Mat6::zero();
    for (r, (line, text)) in rows.iter().enumerate() {
        let vals: Vec<&str> = text.split_whitespace().collect();
        if vals.len() != 6 {
            return Err(Error::MatrixFormat(format!("line {line}: expected 6 entries, found {}", vals.len())));
        }
        for (c, tok) in vals.iter().enumerate() {
            m.0[r][c] =
                tok.parse::<f64>().map_err(|_| Error::MatrixFormat(format!("line {line}: invalid number `{tok}`")))?;
        }
    }
    Ok(m)
}

/// Writes a matrix with 17 significant digits per entry.
pub fn format_matrix(m: &Mat6) -> String {
    let mut out = String::new();
    for row in &m.0 {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:.16e}")).collect();
        let _ = writeln!(out, "{}", cells.join(" "));
    }
    out
}
