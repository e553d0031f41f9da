//! Bivariate truncated Taylor series.
//!
//! A [`Jet2`] of order `K` stores the Taylor coefficients `c_ij` of a scalar
//! function about a base point, for every monomial `u^i v^j` with
//! `i + j <= K`. Coefficients are laid out by total degree, so the slice for
//! degree `d` is `d(d+1)/2 .. (d+1)(d+2)/2` with the `v` power increasing.
//!
//! Arithmetic between jets of different orders truncates to the smaller
//! order. Every derivative of an order-`K` jet has order `K - 1`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};

pub const DEFAULT_ORDER: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    order: usize,
    coeffs: Vec<f64>,
}

#[inline]
pub fn coeff_len(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

#[inline]
pub fn coeff_index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

impl Jet2 {
    pub fn zero(order: usize) -> Self {
        Self { order, coeffs: vec![0.0; coeff_len(order)] }
    }

    pub fn constant(value: f64, order: usize) -> Self {
        let mut j = Self::zero(order);
        j.coeffs[0] = value;
        j
    }

    /// The coordinate function `u` expanded about `u0`.
    pub fn var_u(u0: f64, order: usize) -> Self {
        let mut j = Self::constant(u0, order);
        if order > 0 {
            j.coeffs[coeff_index(1, 0)] = 1.0;
        }
        j
    }

    /// The coordinate function `v` expanded about `v0`.
    pub fn var_v(v0: f64, order: usize) -> Self {
        let mut j = Self::constant(v0, order);
        if order > 0 {
            j.coeffs[coeff_index(0, 1)] = 1.0;
        }
        j
    }

    /// Builds a jet from raw coefficients in total-degree layout.
    ///
    /// Panics if `coeffs.len()` does not match the order.
    pub fn from_coeffs(order: usize, coeffs: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), coeff_len(order), "coefficient count mismatch");
        Self { order, coeffs }
    }

    /// Builds a jet from a closure giving the coefficient of `u^i v^j`.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut j = Self::zero(order);
        for d in 0..=order {
            for b in 0..=d {
                j.coeffs[coeff_index(d - b, b)] = f(d - b, b);
            }
        }
        j
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Coefficient of `u^i v^j`, zero beyond the order.
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i + j > self.order {
            0.0
        } else {
            self.coeffs[coeff_index(i, j)]
        }
    }

    /// `d^(a+b) / du^a dv^b` at the base point.
    pub fn partial(&self, a: usize, b: usize) -> f64 {
        factorial(a) * factorial(b) * self.coeff(a, b)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Self { order, coeffs: self.coeffs[..coeff_len(order)].to_vec() }
    }

    /// Largest absolute coefficient over total degrees `lo..=hi`.
    pub fn max_abs_in_degrees(&self, lo: usize, hi: usize) -> f64 {
        let hi = hi.min(self.order);
        let mut m: f64 = 0.0;
        for d in lo..=hi {
            for b in 0..=d {
                m = m.max(self.coeffs[coeff_index(d - b, b)].abs());
            }
        }
        m
    }

    /// Largest absolute partial derivative over total degrees `lo..=hi`.
    pub fn max_abs_partial(&self, lo: usize, hi: usize) -> f64 {
        let hi = hi.min(self.order);
        let mut m: f64 = 0.0;
        for d in lo..=hi {
            for b in 0..=d {
                m = m.max(self.partial(d - b, b).abs());
            }
        }
        m
    }

    /// Evaluates the Taylor polynomial at an offset from the base point.
    pub fn eval_offset(&self, du: f64, dv: f64) -> f64 {
        let mut sum = 0.0;
        for d in (0..=self.order).rev() {
            let mut row = 0.0;
            for b in 0..=d {
                row += self.coeffs[coeff_index(d - b, b)] * du.powi((d - b) as i32) * dv.powi(b as i32);
            }
            sum += row;
        }
        sum
    }

    fn check_derivable(&self) -> Result<()> {
        if self.order == 0 {
            Err(Error::OrderExhausted { needed: 1, order: 0 })
        } else {
            Ok(())
        }
    }

    /// Partial derivative in `u`, as a jet of order `K - 1`.
    pub fn du(&self) -> Result<Self> {
        self.check_derivable()?;
        Ok(Self::from_fn(self.order - 1, |i, j| (i + 1) as f64 * self.coeff(i + 1, j)))
    }

    /// Partial derivative in `v`, as a jet of order `K - 1`.
    pub fn dv(&self) -> Result<Self> {
        self.check_derivable()?;
        Ok(Self::from_fn(self.order - 1, |i, j| (j + 1) as f64 * self.coeff(i, j + 1)))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { order: self.order, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn add_scalar(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    fn mul_jet(&self, rhs: &Self) -> Self {
        let order = self.order.min(rhs.order);
        let mut out = Self::zero(order);
        for d1 in 0..=order {
            for b1 in 0..=d1 {
                let a = self.coeffs[coeff_index(d1 - b1, b1)];
                if a == 0.0 {
                    continue;
                }
                for d2 in 0..=(order - d1) {
                    for b2 in 0..=d2 {
                        let c = rhs.coeffs[coeff_index(d2 - b2, b2)];
                        out.coeffs[coeff_index(d1 - b1 + d2 - b2, b1 + b2)] += a * c;
                    }
                }
            }
        }
        out
    }

    /// Composes a univariate Taylor series with this jet: returns
    /// `sum_k taylor[k] * (self - self(0))^k`, where `taylor[k] = g^(k)(c0)/k!`.
    pub fn compose(&self, taylor: &[f64]) -> Self {
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let top = taylor.len().min(self.order + 1);
        let mut acc = Self::constant(taylor.get(top.saturating_sub(1)).copied().unwrap_or(0.0), self.order);
        for k in (0..top.saturating_sub(1)).rev() {
            acc = acc.mul_jet(&h).add_scalar(taylor[k]);
        }
        acc
    }

    pub fn recip(&self) -> Result<Self> {
        let c = self.value();
        if c == 0.0 || !c.is_finite() {
            return Err(Error::DivisionByZeroConstantTerm);
        }
        // 1/(c+h) = sum (-1)^k h^k / c^(k+1)
        let taylor: Vec<f64> =
            (0..=self.order).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 } / c.powi(k as i32 + 1)).collect();
        Ok(self.compose(&taylor))
    }

    pub fn try_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul_jet(&rhs.recip()?))
    }

    pub fn sqrt(&self) -> Result<Self> {
        let c = self.value();
        if c <= 0.0 || !c.is_finite() {
            return Err(Error::NegativeSqrtConstantTerm(c));
        }
        Ok(self.compose(&binomial_series(c, 0.5, self.order)))
    }

    /// Real power `self^r`, requiring a positive constant term.
    pub fn powf(&self, r: f64) -> Result<Self> {
        let c = self.value();
        if c <= 0.0 || !c.is_finite() {
            return Err(Error::NonPositiveBase(c));
        }
        Ok(self.compose(&binomial_series(c, r, self.order)))
    }

    /// Integer power; negative exponents need a non-zero constant term.
    pub fn powi(&self, n: i32) -> Result<Self> {
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self::constant(1.0, self.order);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_jet(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul_jet(&sq);
            }
        }
        Ok(acc)
    }

    pub fn ln(&self) -> Result<Self> {
        let c = self.value();
        if c <= 0.0 || !c.is_finite() {
            return Err(Error::NonPositiveBase(c));
        }
        let taylor: Vec<f64> = (0..=self.order)
            .map(|k| {
                if k == 0 {
                    c.ln()
                } else {
                    let s = if k % 2 == 1 { 1.0 } else { -1.0 };
                    s / (k as f64 * c.powi(k as i32))
                }
            })
            .collect();
        Ok(self.compose(&taylor))
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        let taylor: Vec<f64> = (0..=self.order).map(|k| e / factorial(k)).collect();
        self.compose(&taylor)
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        let cycle = [s, c, -s, -c];
        let taylor: Vec<f64> = (0..=self.order).map(|k| cycle[k % 4] / factorial(k)).collect();
        self.compose(&taylor)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        let cycle = [c, -s, -c, s];
        let taylor: Vec<f64> = (0..=self.order).map(|k| cycle[k % 4] / factorial(k)).collect();
        self.compose(&taylor)
    }
}

/// Taylor coefficients of `x^r` about `c > 0`.
fn binomial_series(c: f64, r: f64, order: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(order + 1);
    let mut binom = 1.0;
    for k in 0..=order {
        if k > 0 {
            binom *= (r - (k as f64 - 1.0)) / k as f64;
        }
        out.push(binom * c.powf(r - k as f64));
    }
    out
}

/// Derivative of `g` along the vector field `x = (x_u, x_v)`, whose
/// components are themselves jets so that repeated application
/// differentiates the field as well.
pub fn directional_derivative(g: &Jet2, x: &[Jet2; 2]) -> Result<Jet2> {
    let gu = g.du()?;
    let gv = g.dv()?;
    Ok(&(&x[0] * &gu) + &(&x[1] * &gv))
}

/// Applies [`directional_derivative`] `times` times.
pub fn iterated_directional(g: &Jet2, x: &[Jet2; 2], times: usize) -> Result<Jet2> {
    if g.order() < times {
        return Err(Error::OrderExhausted { needed: times, order: g.order() });
    }
    let mut out = g.clone();
    for _ in 0..times {
        out = directional_derivative(&out, x)?;
    }
    Ok(out)
}

impl Add for &Jet2 {
    type Output = Jet2;
    fn add(self, rhs: &Jet2) -> Jet2 {
        let order = self.order.min(rhs.order);
        let n = coeff_len(order);
        Jet2 { order, coeffs: (0..n).map(|k| self.coeffs[k] + rhs.coeffs[k]).collect() }
    }
}

impl Sub for &Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: &Jet2) -> Jet2 {
        let order = self.order.min(rhs.order);
        let n = coeff_len(order);
        Jet2 { order, coeffs: (0..n).map(|k| self.coeffs[k] - rhs.coeffs[k]).collect() }
    }
}

impl Mul for &Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: &Jet2) -> Jet2 {
        self.mul_jet(rhs)
    }
}

impl Mul<f64> for &Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Jet2 {
        self.scale(rhs)
    }
}

impl Neg for &Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Jet2 {
            type Output = Jet2;
            fn $m(self, rhs: Jet2) -> Jet2 {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Jet2> for Jet2 {
            type Output = Jet2;
            fn $m(self, rhs: &Jet2) -> Jet2 {
                (&self).$m(rhs)
            }
        }
        impl $tr<Jet2> for &Jet2 {
            type Output = Jet2;
            fn $m(self, rhs: Jet2) -> Jet2 {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Jet2 {
        self.scale(rhs)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl AddAssign<&Jet2> for Jet2 {
    fn add_assign(&mut self, rhs: &Jet2) {
        *self = &*self + rhs;
    }
}
