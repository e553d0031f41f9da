//! Reference surfaces and transformations with known singularities: the
//! standard normal forms with smooth unit normals, the parabolic cylinder
//! and its swallowtail-producing transformations, umbilic graphs, and
//! surfaces engineered to a given type.

use rand::Rng;

use crate::classify::SingularityClass;
use crate::minkowski::Mat6;
use crate::surface_dsl::{Domain, SurfaceExpr};

/// A normal form with its expected class at the origin.
#[derive(Clone, Debug)]
pub struct NormalForm {
    pub class: SingularityClass,
    pub surface: SurfaceExpr,
}

fn nf(class: SingularityClass, xyz: [&str; 3], normal: [&str; 3]) -> NormalForm {
    let surface = SurfaceExpr::from_strs(xyz, Some(normal)).expect("model surfaces parse");
    NormalForm { class, surface }
}

pub fn cuspidal_edge() -> NormalForm {
    nf(SingularityClass::CuspidalEdge, ["u", "v^2", "v^3"], ["0", "-3*v/sqrt(9*v^2+4)", "2/sqrt(9*v^2+4)"])
}

pub fn swallowtail() -> NormalForm {
    let n = "sqrt(1+v^2+v^4)";
    nf(
        SingularityClass::Swallowtail,
        ["u", "4*v^3+2*u*v", "3*v^4+u*v^2"],
        [&format!("-v^2/{n}"), &format!("v/{n}"), &format!("-1/{n}")],
    )
}

pub fn cuspidal_beaks() -> NormalForm {
    let n = "sqrt(1+4*v^2+4*u^2*v^4)";
    nf(
        SingularityClass::CuspidalBeaks,
        ["u", "2*v^3-u^2*v", "3*v^4-u^2*v^2"],
        [&format!("-2*u*v^2/{n}"), &format!("-2*v/{n}"), &format!("1/{n}")],
    )
}

pub fn cuspidal_lips() -> NormalForm {
    let n = "sqrt(1+4*v^2+4*u^2*v^4)";
    nf(
        SingularityClass::CuspidalLips,
        ["u", "2*v^3+u^2*v", "3*v^4+u^2*v^2"],
        [&format!("2*u*v^2/{n}"), &format!("-2*v/{n}"), &format!("1/{n}")],
    )
}

pub fn cuspidal_butterfly() -> NormalForm {
    let n = "sqrt(1+v^2+v^4)";
    nf(
        SingularityClass::CuspidalButterfly,
        ["u", "5*v^4+2*u*v", "4*v^5+u*v^2"],
        [&format!("v^2/{n}"), &format!("-v/{n}"), &format!("1/{n}")],
    )
}

pub fn d4_plus() -> NormalForm {
    let n = "sqrt(1+u^2+v^2)";
    nf(
        SingularityClass::D4Plus,
        ["2*u*v", "u^2+3*v^2", "2*u^2*v+2*v^3"],
        [&format!("-u/{n}"), &format!("-v/{n}"), &format!("1/{n}")],
    )
}

pub fn d4_minus() -> NormalForm {
    let n = "sqrt(1+u^2+v^2)";
    nf(
        SingularityClass::D4Minus,
        ["2*u*v", "-u^2+3*v^2", "-2*u^2*v+2*v^3"],
        [&format!("u/{n}"), &format!("-v/{n}"), &format!("1/{n}")],
    )
}

pub fn normal_forms() -> Vec<NormalForm> {
    vec![cuspidal_edge(), swallowtail(), cuspidal_beaks(), cuspidal_lips(), cuspidal_butterfly(), d4_plus(), d4_minus()]
}

/// `(u, u^2, v)`: `kappa2 = -2` has a critical point along its principal
/// direction at the origin, so the origin is a type 2 point.
pub fn parabolic_cylinder() -> SurfaceExpr {
    SurfaceExpr::from_strs(["u", "u^2", "v"], None).expect("parses")
}

/// `(u, u^2 + u^3, v)`: type 1 at the origin.
pub fn type1_cylinder() -> SurfaceExpr {
    SurfaceExpr::from_strs(["u", "u^2+u^3", "v"], None).expect("parses")
}

/// `(u, u^2 + u^4 + u^5, v)`: curvature `2 + 20 u^3 + O(u^4)`, type 3 at the
/// origin.
pub fn type3_cylinder() -> SurfaceExpr {
    SurfaceExpr::from_strs(["u", "u^2+u^4+u^5", "v"], None).expect("parses")
}

/// Torus of revolution with an elliptic tube section (semi-axes 1 and
/// 1/2, centre radius 2). The meridian curvature varies along the
/// meridians away from the four vertices of the ellipse.
pub fn elliptic_torus() -> SurfaceExpr {
    SurfaceExpr::from_strs(["(2+cos(u))*cos(v)", "(2+cos(u))*sin(v)", "sin(u)/2"], None)
        .expect("parses")
        .with_domain(Domain { u_min: 0.3, u_max: 1.2, v_min: -0.5, v_max: 0.5 })
}

/// Graph of `(u^2 + v^2)/2 + c(u, v)/6` with an umbilic of curvature 1 at the
/// origin; `c = u^3 - 3uv^2` (elliptic) or `u^3 + uv^2` (hyperbolic).
pub fn umbilic_graph(elliptic: bool) -> SurfaceExpr {
    let z = if elliptic { "(u^2+v^2)/2 + (u^3-3*u*v^2)/6" } else { "(u^2+v^2)/2 + (u^3+u*v^2)/6" };
    SurfaceExpr::from_strs(["u", "v", z], None).expect("parses").with_domain(Domain {
        u_min: -0.5,
        u_max: 0.5,
        v_min: -0.5,
        v_max: 0.5,
    })
}

/// Unit sphere patch around the south pole with the inward normal.
pub fn unit_sphere_inward() -> SurfaceExpr {
    SurfaceExpr::from_strs(
        ["sin(u)*cos(v)", "sin(u)*sin(v)", "-cos(u)"],
        Some(["-sin(u)*cos(v)", "-sin(u)*sin(v)", "cos(u)"]),
    )
    .expect("parses")
    .with_domain(Domain { u_min: 0.4, u_max: 1.2, v_min: -0.5, v_max: 0.5 })
}

/// The transformation sending the parabolic cylinder to a swallowtail at
/// the origin.
pub fn example_matrix() -> Mat6 {
    Mat6([
        [-0.5, 0.0, 0.0, 0.0, -0.5, 1.0],
        [0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
        [0.5, 0.0, 0.0, 0.0, -1.5, 1.0],
        [1.0, 0.0, 0.0, 0.0, -1.0, 1.0],
    ])
}

/// One-parameter family through cuspidal beaks (`xi < 1/(2 sqrt 2)`) and
/// cuspidal lips (`xi > 1/(2 sqrt 2)`) on the parabolic cylinder.
pub fn example_family(xi: f64) -> Mat6 {
    let s = std::f64::consts::SQRT_2;
    let chi = (1.0 + 2.0 * xi * xi).sqrt();
    let r = 1.0 / s;
    Mat6([
        [-(r + xi) / chi, 0.0, 0.0, 0.0, 0.0, (r - xi) / chi],
        [xi * (-1.0 + s * xi) / chi, -chi / s, 0.0, -chi / s, 0.0, -xi * (1.0 + s * xi) / chi],
        [0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        [0.0, r, 0.0, -r, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
        [r - xi, xi, 0.0, xi, 0.0, r + xi],
    ])
}

/// Text of [`example_family`] in the family-file format.
pub const EXAMPLE_FAMILY_FILE: &str = "\
family xi
const s = sqrt(2)
const r = 1/sqrt(2)
-(r+xi)/sqrt(1+2*xi^2), 0, 0, 0, 0, (r-xi)/sqrt(1+2*xi^2)
xi*(-1+s*xi)/sqrt(1+2*xi^2), -sqrt(1+2*xi^2)/s, 0, -sqrt(1+2*xi^2)/s, 0, -xi*(1+s*xi)/sqrt(1+2*xi^2)
0, 0, 1, 0, 0, 0
0, r, 0, -r, 0, 0
0, 0, 0, 0, 1, 0
r-xi, xi, 0, xi, 0, r+xi
";

fn coef(rng: &mut impl Rng, r: f64) -> String {
    format!("({})", rng.gen_range(-r..r))
}

/// A random analytic surface `(u + a v^2, v + b u^2, z(u, v))` mixing
/// polynomial and transcendental terms. Immersed on `[-1, 1]^2`: the
/// horizontal part has Jacobian determinant at least `1 - 4|ab| > 0.8`.
pub fn random_surface(rng: &mut impl Rng) -> SurfaceExpr {
    let x = format!("u + {}*v^2", coef(rng, 0.2));
    let y = format!("v + {}*u^2", coef(rng, 0.2));
    let z = format!(
        "{}*u^2 + {}*u*v + {}*v^2 + {}*u^3 + {}*v^3 + {}*sin(u + {}*v) + {}*exp({}*u*v) + {}*cos(v)*u",
        coef(rng, 1.0),
        coef(rng, 1.0),
        coef(rng, 1.0),
        coef(rng, 0.5),
        coef(rng, 0.5),
        coef(rng, 0.5),
        coef(rng, 1.0),
        coef(rng, 0.5),
        coef(rng, 1.0),
        coef(rng, 0.5),
    );
    SurfaceExpr::from_strs([&x, &y, &z], None).expect("generated surface parses")
}

/// A random graph even in `u`. Along `u = 0` one principal direction is
/// `d/du` and its curvature is even in `u`, so those points are type 2
/// for that curvature whenever its second derivative does not vanish.
pub fn random_even_graph(rng: &mut impl Rng) -> SurfaceExpr {
    let a = rng.gen_range(0.6..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let z = format!(
        "{a}*u^2 + {}*v^2 + {}*u^4 + {}*u^2*v + {}*v^3 + {}*u^2*v^2 + {}*u^4*v",
        coef(rng, 0.3),
        coef(rng, 2.0),
        coef(rng, 1.0),
        coef(rng, 0.5),
        coef(rng, 1.0),
        coef(rng, 1.0),
    );
    SurfaceExpr::from_strs(["u", "v", &z], None).expect("generated surface parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::lie_residual;
    use crate::surface_dsl::parse_family_file;

    #[test]
    fn example_matrices_are_lie() {
        assert!(lie_residual(&example_matrix()) <= 1e-15);
        for xi in [0.0, 0.2, 1.0 / (2.0 * 2f64.sqrt()), 1.0, -3.0] {
            assert!(lie_residual(&example_family(xi)) <= 1e-13, "xi = {xi}");
        }
    }

    #[test]
    fn family_file_matches_closed_form() {
        let fam = parse_family_file(EXAMPLE_FAMILY_FILE).unwrap();
        for xi in [0.0, 0.2, 0.7] {
            let m = fam.eval(xi).unwrap();
            let e = example_family(xi);
            for i in 0..6 {
                for j in 0..6 {
                    assert!((m[i][j] - e.0[i][j]).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn supplied_normals_are_valid() {
        for m in normal_forms() {
            m.surface.validate_normal(9).unwrap();
        }
        unit_sphere_inward().validate_normal(9).unwrap();
    }
}
