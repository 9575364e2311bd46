//! Floating-point evaluation boundary.
//!
//! Expanded fields reach total degree 40+ with large cancelling terms near the
//! cycles, so evaluation runs in double-double arithmetic: coefficients are
//! split into a high and low `f64` and a dense Horner scheme accumulates in
//! roughly 106 bits. The result is rounded to `f64` once at the end.

use super::poly::BivariatePolynomial;
use super::rational::{to_f64, Rational};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let err = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, err)
}

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    pub fn from_rational(q: &Rational) -> Self {
        let hi = to_f64(q);
        if !hi.is_finite() {
            return DoubleDouble { hi, lo: 0.0 };
        }
        let rest = q - Rational::from_float(hi).expect("finite");
        let lo = to_f64(&rest);
        let (hi, lo) = quick_two_sum(hi, lo);
        DoubleDouble { hi, lo }
    }

    #[inline]
    pub fn add(self, o: DoubleDouble) -> DoubleDouble {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> DoubleDouble {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        DoubleDouble { hi, lo }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// A polynomial prepared for repeated floating evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    degree: usize,
    // rows[i][j] = coefficient of x^i y^j, dense over j <= degree - i
    rows: Vec<Vec<DoubleDouble>>,
}

impl CompiledPoly {
    pub fn new(p: &BivariatePolynomial) -> Self {
        let degree = p.degree().unwrap_or(0) as usize;
        let mut rows: Vec<Vec<DoubleDouble>> =
            (0..=degree).map(|i| vec![DoubleDouble::ZERO; degree - i + 1]).collect();
        for (m, c) in p.terms() {
            rows[m.x as usize][m.y as usize] = DoubleDouble::from_rational(c);
        }
        CompiledPoly { degree, rows }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.eval_dd(x, y).to_f64()
    }

    pub fn eval_dd(&self, x: f64, y: f64) -> DoubleDouble {
        let mut acc = DoubleDouble::ZERO;
        for row in self.rows.iter().rev() {
            let mut inner = DoubleDouble::ZERO;
            for c in row.iter().rev() {
                inner = inner.mul_f64(y).add(*c);
            }
            acc = acc.mul_f64(x).add(inner);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::rational::rat;

    #[test]
    fn dd_captures_rational_tail() {
        let third = DoubleDouble::from_rational(&rat(1, 3));
        let back = third.mul_f64(3.0);
        assert!((back.hi - 1.0).abs() + back.lo.abs() < 1e-30);
    }

    #[test]
    fn cancellation_survives() {
        // (x - 1)^6 expanded, evaluated near the root
        let f = BivariatePolynomial::x().sub(&BivariatePolynomial::one()).pow(6);
        let c = CompiledPoly::new(&f);
        let x = 1.0 + 1e-3;
        let exact = (x - 1.0_f64).powi(6);
        let got = c.eval(x, 0.0);
        // plain f64 Horner leaves noise near 1e-15 here
        assert!((got - exact).abs() < 1e-3 * exact, "got {got}");
    }
}
