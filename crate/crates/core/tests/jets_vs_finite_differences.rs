//! Jet partial derivatives against finite differences, and exactness on
//! polynomials.

use liefront::jets::{coeff_index, Jet2};
use liefront::surface_dsl::{parse, Env, Expr};
use proptest::prelude::*;

const BATTERY: [&str; 8] = [
    "exp(u*v)",
    "sin(u) + cos(2*v)",
    "sqrt(1 + u^2 + v^2)",
    "1/(2 + u + v^2)",
    "exp(sin(u))*cos(v)",
    "(1 + u^2)^(1/3) * v",
    "u^3*v^2 - 2*u*v^4",
    "sin(u*v + v^2)/(3 + cos(u))",
];

const POINTS: [(f64, f64); 4] = [(0.0, 0.0), (0.3, -0.2), (-0.7, 0.4), (0.5, 0.9)];

fn eval(e: &Expr, u: f64, v: f64) -> f64 {
    let vars = [("u", u), ("v", v)];
    e.eval(&Env::new(&vars, 0.0)).unwrap()
}

fn jet(e: &Expr, u: f64, v: f64, order: usize) -> Jet2 {
    let vars = [("u", Jet2::var_u(u, order)), ("v", Jet2::var_v(v, order))];
    e.eval(&Env::new(&vars, Jet2::constant(0.0, order))).unwrap()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Tensor product of central difference stencils: `h^(a+b)` times the
/// partial, up to `O(h^2)`.
fn central(e: &Expr, u: f64, v: f64, a: usize, b: usize, h: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..=a {
        for j in 0..=b {
            let w = binomial(a, i) * binomial(b, j) * if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            let du = (a as f64 / 2.0 - i as f64) * h;
            let dv = (b as f64 / 2.0 - j as f64) * h;
            acc += w * eval(e, u + du, v + dv);
        }
    }
    acc / h.powi((a + b) as i32)
}

/// Two Richardson steps on the `O(h^2)` stencil, leaving `O(h^6)`.
fn finite_difference(e: &Expr, u: f64, v: f64, a: usize, b: usize) -> f64 {
    let h = 0.04;
    let d = [h, h / 2.0, h / 4.0].map(|s| central(e, u, v, a, b, s));
    let r1 = (4.0 * d[1] - d[0]) / 3.0;
    let r2 = (4.0 * d[2] - d[1]) / 3.0;
    (16.0 * r2 - r1) / 15.0
}

#[test]
fn partials_through_order_four_match_finite_differences() {
    let mut worst: f64 = 0.0;
    for text in BATTERY {
        let e = parse(text).unwrap();
        for (u, v) in POINTS {
            let j = jet(&e, u, v, 4);
            for d in 1..=4 {
                for b in 0..=d {
                    let a = d - b;
                    let exact = j.partial(a, b);
                    let fd = finite_difference(&e, u, v, a, b);
                    let rel = (exact - fd).abs() / exact.abs().max(1.0);
                    worst = worst.max(rel);
                    assert!(rel <= 1e-6, "{text} at ({u}, {v}), d^{a}_u d^{b}_v: jet {exact}, fd {fd}");
                }
            }
            // jet division goes through a reciprocal: equal up to rounding
            let x = eval(&e, u, v);
            assert!((j.value() - x).abs() <= 1e-15 * x.abs().max(1.0), "{text}");
        }
    }
    eprintln!("worst relative deviation {worst:.2e}");
}

#[test]
fn polynomial_jet_coefficients_are_exact() {
    // (1 + 2u - v)^3 at the origin
    let j = jet(&parse("(1 + 2*u - v)^3").unwrap(), 0.0, 0.0, 5);
    let expect = [
        ((0, 0), 1.0),
        ((1, 0), 6.0),
        ((0, 1), -3.0),
        ((2, 0), 12.0),
        ((1, 1), -12.0),
        ((0, 2), 3.0),
        ((3, 0), 8.0),
        ((2, 1), -12.0),
        ((1, 2), 6.0),
        ((0, 3), -1.0),
    ];
    for d in 0..=5 {
        for b in 0..=d {
            let a = d - b;
            let want = expect.iter().find(|(k, _)| *k == (a, b)).map_or(0.0, |(_, c)| *c);
            assert_eq!(j.coeff(a, b), want, "coefficient of u^{a} v^{b}");
        }
    }
    // base point shift: u^2 v at (1, 2) = (1 + du)^2 (2 + dv)
    let j = jet(&parse("u^2*v").unwrap(), 1.0, 2.0, 4);
    assert_eq!(j.coeffs()[coeff_index(0, 0)], 2.0);
    assert_eq!(j.coeff(1, 0), 4.0);
    assert_eq!(j.coeff(0, 1), 1.0);
    assert_eq!(j.coeff(2, 0), 2.0);
    assert_eq!(j.coeff(1, 1), 2.0);
    assert_eq!(j.coeff(2, 1), 1.0);
    assert_eq!(j.coeff(3, 0), 0.0);
}

proptest! {
    /// Integer polynomials of degree at most 4 have exactly their own
    /// coefficients as a jet at the origin.
    #[test]
    fn integer_polynomials_round_trip(coeffs in proptest::collection::vec(-9i32..=9, 15)) {
        let mut terms = Vec::new();
        let mut k = 0;
        for d in 0..=4usize {
            for b in 0..=d {
                terms.push(format!("({})*u^{}*v^{}", coeffs[k], d - b, b));
                k += 1;
            }
        }
        let j = jet(&parse(&terms.join(" + ")).unwrap(), 0.0, 0.0, 6);
        let mut k = 0;
        for d in 0..=6usize {
            for b in 0..=d {
                let want = if d <= 4 { let c = coeffs[k] as f64; k += 1; c } else { 0.0 };
                prop_assert_eq!(j.coeff(d - b, b), want);
            }
        }
    }
}
