//! Lie sphere transformations of lifted surfaces: application, parallel
//! transformations, and the steering constructions that force a chosen
//! curvature sphere to become singular.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::legendre::{apply_mat, partial6, project, value6, JetVec6, LiftPair, ProjectionResult};
use crate::minkowski::{build_isometry_sending, inner, lie_residual, Mat6, Vec6, P, Q};

/// Residual on `A^T J A = J` accepted by [`apply`].
pub const LIE_TOL: f64 = 1e-8;

/// Projects `(A F, A T)`.
pub fn apply(a: &Mat6, lift: &LiftPair) -> Result<ProjectionResult> {
    let r = lie_residual(a);
    if r > LIE_TOL {
        return Err(Error::NotOrthogonal(r));
    }
    project(&apply_mat(a, &lift.point_sphere), &apply_mat(a, &lift.tangent_plane))
}

/// `x -> (x, p) q - (x, q) p`, nilpotent of order three and skew for the
/// metric.
fn parallel_generator() -> Mat6 {
    let jp = Vec6(std::array::from_fn(|k| crate::minkowski::SIGNS[k] * P[k]));
    let jq = Vec6(std::array::from_fn(|k| crate::minkowski::SIGNS[k] * Q[k]));
    Mat6::outer(&Q, &jp) - Mat6::outer(&P, &jq)
}

/// The transformation taking `(f, t)` to `(f + d t, t)`.
pub fn parallel_matrix(d: f64) -> Mat6 {
    let n = parallel_generator();
    let n2 = n * n;
    Mat6::identity() - n.scale(d) + n2.scale(d * d / 2.0)
}

/// Boost in the `(e1, ek)` plane.
pub fn boost(k: usize, t: f64) -> Mat6 {
    let mut m = Mat6::identity();
    let (c, s) = (t.cosh(), t.sinh());
    m.0[0][0] = c;
    m.0[0][k] = s;
    m.0[k][0] = s;
    m.0[k][k] = c;
    m
}

/// Rotation in the `(ei, ej)` plane.
pub fn rotation(i: usize, j: usize, t: f64) -> Mat6 {
    let mut m = Mat6::identity();
    let (c, s) = (t.cos(), t.sin());
    m.0[i][i] = c;
    m.0[i][j] = -s;
    m.0[j][i] = s;
    m.0[j][j] = c;
    m
}

/// A random element of `O(4,2)` fixing `p`.
pub fn random_stabilizer(rng: &mut impl Rng) -> Mat6 {
    let mut m = Mat6::identity();
    for k in 1..5 {
        m = boost(k, rng.gen_range(-0.8..0.8)) * m;
    }
    for i in 1..5 {
        for j in (i + 1)..5 {
            m = rotation(i, j, rng.gen_range(0.0..std::f64::consts::TAU)) * m;
        }
    }
    m
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SteerMode {
    /// `p^` has a component outside `W`: the singular sphere moves off `p`.
    Generic,
    /// `p^ mod s1(x)` lies in `W`: `d sigma1` stays orthogonal to `p`.
    Degenerate,
}

#[derive(Clone, Debug)]
pub struct SteeringContext {
    pub base: (f64, f64),
    pub sigma1: Vec6,
    pub dsigma1: [Vec6; 2],
    /// Basis of `span{sigma1, d_u sigma1, d_v sigma1}^perp` (contains `sigma1`
    /// whenever it is non-trivial).
    pub w_basis: Vec<Vec6>,
    pub phat: Vec6,
    pub mode: SteerMode,
    /// `max |(p^, d sigma1)|` relative to `|d sigma1|`.
    pub witness: f64,
    pub seed: u64,
}

impl SteeringContext {
    /// `p^ + xi sigma1(x)`, still unit timelike and orthogonal to `sigma1(x)`.
    pub fn phat_family(&self, xi: f64) -> Vec6 {
        self.phat + self.sigma1 * xi
    }
}

/// Euclidean orthonormal basis of `{x : (x, c) = 0 for all c}`.
fn metric_complement(constraints: &[Vec6]) -> Vec<Vec6> {
    let mut rows: Vec<Vec6> = Vec::new();
    for c in constraints {
        let mut r = Vec6(std::array::from_fn(|k| crate::minkowski::SIGNS[k] * c[k]));
        let scale = r.euclid_norm();
        for b in &rows {
            r = r - *b * edot(&r, b);
        }
        let n = r.euclid_norm();
        if n > 1e-9 * scale.max(1e-300) {
            rows.push(r * (1.0 / n));
        }
    }
    let mut out: Vec<Vec6> = Vec::new();
    for k in 0..6 {
        let mut e = Vec6::basis(k);
        for b in rows.iter().chain(out.iter()) {
            e = e - *b * edot(&e, b);
        }
        for b in rows.iter().chain(out.iter()) {
            e = e - *b * edot(&e, b);
        }
        let n = e.euclid_norm();
        if n > 1e-6 {
            out.push(e * (1.0 / n));
        }
        if rows.len() + out.len() == 6 {
            break;
        }
    }
    out
}

fn edot(a: &Vec6, b: &Vec6) -> f64 {
    (0..6).map(|k| a[k] * b[k]).sum()
}

/// Chooses a unit timelike `p^` orthogonal to `sigma1(x)`.
///
/// `other` is any element of the isotropic plane at `x` outside `s1(x)`
/// (for instance `F(x)`); `p^` is kept away from its orthogonal complement
/// so that the transformed surface still projects.
pub fn choose_phat(
    sigma1: &JetVec6,
    other: &Vec6,
    base: (f64, f64),
    mode: SteerMode,
    seed: u64,
) -> Result<SteeringContext> {
    let s = value6(sigma1);
    let ds = [partial6(sigma1, 1, 0), partial6(sigma1, 0, 1)];
    let w_basis = metric_complement(&[s, ds[0], ds[1]]);
    let space = match mode {
        SteerMode::Degenerate => w_basis.clone(),
        SteerMode::Generic => metric_complement(&[s]),
    };
    let ds_scale = ds[0].euclid_norm().max(ds[1].euclid_norm()).max(1e-300);
    let other_scale = other.euclid_norm();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..20_000 {
        let mut x = Vec6::ZERO;
        for b in &space {
            x = x + *b * rng.gen_range(-1.0..1.0);
        }
        let n2 = x.euclid_norm().powi(2);
        let sq = x.square();
        if n2 == 0.0 || sq >= -0.05 * n2 {
            continue;
        }
        let dir = x * (1.0 / n2.sqrt());
        if inner(&dir, other).abs() < 0.05 * other_scale {
            continue;
        }
        let witness = ds.iter().map(|d| inner(&dir, d).abs()).fold(0.0, f64::max) / ds_scale;
        if mode == SteerMode::Generic && witness < 0.05 {
            continue;
        }
        let phat = x * (1.0 / (-sq).sqrt());
        return Ok(SteeringContext { base, sigma1: s, dsigma1: ds, w_basis, phat, mode, witness, seed });
    }
    Err(Error::NoTimelikeVector)
}

/// `A` with `A p^xi = p`; composed with stabilizers of `p` until the
/// transformed lift projects at the base point.
pub fn steer(ctx: &SteeringContext, xi: f64, lift: &LiftPair) -> Result<Mat6> {
    let target = ctx.phat_family(xi);
    let a = build_isometry_sending(&target, &P)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed ^ 0x5eed);
    let mut candidate = a;
    for _ in 0..64 {
        match apply(&candidate, lift) {
            Ok(pr) if pr.det_b.abs() > 1e-6 => return Ok(candidate),
            Ok(_) | Err(Error::ProjectionSingular { .. }) => {
                candidate = random_stabilizer(&mut rng) * a;
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::ProjectionSingular { det: 0.0, norm: 1.0 })
}

/// Hessian of `y -> (sigma1(y), v)` at the base point as `[uu, uv, vv]`.
pub fn pairing_hessian(sigma1: &JetVec6, v: &Vec6) -> [f64; 3] {
    [(2, 0), (1, 1), (0, 2)].map(|(a, b)| inner(&partial6(sigma1, a, b), v))
}

fn det_hess(h: [f64; 3]) -> f64 {
    h[0] * h[2] - h[1] * h[1]
}

/// `det Hess (sigma1, p^xi) = d0 + xi d1`, returned as `(d0, d1)`.
///
/// Affine in `xi` because `Hess (sigma1, sigma1(x))` has rank one at a
/// degenerate point.
pub fn hessian_line(ctx: &SteeringContext, sigma1: &JetVec6) -> (f64, f64) {
    let h0 = pairing_hessian(sigma1, &ctx.phat);
    let h1 = pairing_hessian(sigma1, &ctx.sigma1);
    let d0 = det_hess(h0);
    let d1 = det_hess([h0[0] + h1[0], h0[1] + h1[1], h0[2] + h1[2]]) - d0;
    (d0, d1)
}

/// Residuals of the steering invariants: `(p^, sigma1)` and `(p^, p^) + 1`.
pub fn context_residuals(ctx: &SteeringContext, xi: f64) -> (f64, f64) {
    let p = ctx.phat_family(xi);
    (inner(&p, &ctx.sigma1), p.square() + 1.0)
}

/// `(A sigma, p)` at the base point.
pub fn pairing_with_p(a: &Mat6, sigma: &Vec6) -> f64 {
    inner(&a.apply(sigma), &P)
}

/// `(A sigma, q)` at the base point.
pub fn pairing_with_q(a: &Mat6, sigma: &Vec6) -> f64 {
    inner(&a.apply(sigma), &Q)
}
