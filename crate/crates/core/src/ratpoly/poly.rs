use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::eval::CompiledPoly;
use super::rational::{format_fraction, int, lcm_denominators, parse_rational, Rational};
use super::PolyError;

/// Exponent pair `x^x y^y`, ordered graded-lexicographically: total degree
/// first, then the power of `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub x: u32,
    pub y: u32,
}

impl Monomial {
    pub const fn new(x: u32, y: u32) -> Self {
        Monomial { x, y }
    }

    pub fn degree(self) -> u32 {
        self.x + self.y
    }

    pub fn divides(self, other: Monomial) -> bool {
        self.x <= other.x && self.y <= other.y
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.degree(), self.x).cmp(&(other.degree(), other.x))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in `x, y` with exact rational coefficients.
///
/// No stored coefficient is ever zero, so structural equality is
/// mathematical equality.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct BivariatePolynomial {
    terms: BTreeMap<Monomial, Rational>,
}

pub type Poly = BivariatePolynomial;

impl BivariatePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn x() -> Self {
        Self::monomial(1, 0, Rational::one())
    }

    pub fn y() -> Self {
        Self::monomial(0, 1, Rational::one())
    }

    pub fn monomial(i: u32, j: u32, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::new(i, j), c);
        }
        BivariatePolynomial { terms }
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates.
    pub fn from_terms(it: impl IntoIterator<Item = (u32, u32, Rational)>) -> Self {
        let mut p = Self::zero();
        for (i, j, c) in it {
            p.add_term(Monomial::new(i, j), c);
        }
        p
    }

    /// `(x - a)^2 + (y - b)^2 - r2`
    pub fn circle(a: &Rational, b: &Rational, r2: &Rational) -> Self {
        let two = int(2);
        Self::from_terms([
            (2, 0, Rational::one()),
            (0, 2, Rational::one()),
            (1, 0, -&two * a),
            (0, 1, -&two * b),
            (0, 0, a * a + b * b - r2),
        ])
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` stands for the degree of the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rational {
        self.terms.get(&Monomial::new(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &Rational)> + '_ {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn leading_term(&self) -> Option<(Monomial, &Rational)> {
        self.terms.iter().next_back().map(|(m, c)| (*m, c))
    }

    pub fn is_constant(&self) -> bool {
        self.degree().is_none_or(|d| d == 0)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, -c.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        BivariatePolynomial {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        BivariatePolynomial {
            terms: self.terms.iter().map(|(m, c)| (*m, c * s)).collect(),
        }
    }

    /// Product. Denominators are cleared first so the quadratic inner loop
    /// only touches integers.
    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let (da, na) = integer_form(self);
        let (db, nb) = integer_form(o);
        let mut acc: HashMap<(u32, u32), BigInt> = HashMap::with_capacity(na.len() * 2);
        for (ma, ca) in &na {
            for (mb, cb) in &nb {
                let key = (ma.x + mb.x, ma.y + mb.y);
                let prod = ca * cb;
                match acc.get_mut(&key) {
                    Some(v) => *v += prod,
                    None => {
                        acc.insert(key, prod);
                    }
                }
            }
        }
        let den = da * db;
        let terms = acc
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|((i, j), v)| (Monomial::new(i, j), Rational::new(v, den.clone())))
            .collect();
        BivariatePolynomial { terms }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn diff_x(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.x > 0)
            .map(|(m, c)| (Monomial::new(m.x - 1, m.y), c * int(m.x as i64)))
            .collect();
        BivariatePolynomial { terms }
    }

    pub fn diff_y(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.y > 0)
            .map(|(m, c)| (Monomial::new(m.x, m.y - 1), c * int(m.y as i64)))
            .collect();
        BivariatePolynomial { terms }
    }

    /// Exact value at a rational point.
    pub fn eval_exact(&self, x: &Rational, y: &Rational) -> Rational {
        self.terms.iter().fold(Rational::zero(), |acc, (m, c)| {
            acc + c * num_traits::pow(x.clone(), m.x as usize) * num_traits::pow(y.clone(), m.y as usize)
        })
    }

    /// Floating evaluation; see [`CompiledPoly`] for repeated use.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        CompiledPoly::new(self).eval(x, y)
    }

    /// Quotient `q` with `self = q * d`, or `None` when `d` does not divide.
    ///
    /// Plain multivariate division by a single divisor in graded-lex order:
    /// the leading term of the running remainder must always be divisible
    /// by the leading term of `d`, otherwise the remainder is nonzero.
    pub fn exact_divide(&self, d: &Self) -> Result<Option<Self>, PolyError> {
        let (lm, lc) = match d.leading_term() {
            Some((m, c)) => (m, c.clone()),
            None => return Err(PolyError::DivisionByZero),
        };
        let lc_inv = lc.recip();
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some((m, c)) = rem.leading_term() {
            if !lm.divides(m) {
                return Ok(None);
            }
            let qm = Monomial::new(m.x - lm.x, m.y - lm.y);
            let qc = c * &lc_inv;
            for (dm, dc) in &d.terms {
                rem.add_term(Monomial::new(dm.x + qm.x, dm.y + qm.y), -(dc * &qc));
            }
            quot.add_term(qm, qc);
        }
        Ok(Some(quot))
    }

    /// Largest `k` with `f^k` dividing `self`.
    pub fn vanishing_order(&self, f: &Self) -> Result<u32, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomialOrder);
        }
        if f.is_constant() {
            return Err(PolyError::ConstantFactor);
        }
        let mut k = 0;
        let mut cur = self.clone();
        while let Some(q) = cur.exact_divide(f)? {
            k += 1;
            cur = q;
        }
        Ok(k)
    }

    /// Largest absolute coefficient, as a float. Used for diagnostics only.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .map(|c| super::rational::to_f64(&c.abs()))
            .fold(0.0, f64::max)
    }
}

fn integer_form(p: &Poly) -> (BigInt, Vec<(Monomial, BigInt)>) {
    let den = lcm_denominators(p.terms.values());
    let terms = p
        .terms
        .iter()
        .map(|(m, c)| (*m, c.numer() * (&den / c.denom())))
        .collect();
    (den, terms)
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        Poly::add(self, o)
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        Poly::sub(self, o)
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        Poly::mul(self, o)
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::neg(self)
    }
}

impl fmt::Debug for BivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for BivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let (sign, mag) = if c.is_negative() { ("-", -c.clone()) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mono = match (m.x, m.y) {
                (0, 0) => String::new(),
                (i, 0) => pow_str("x", i),
                (0, j) => pow_str("y", j),
                (i, j) => format!("{}*{}", pow_str("x", i), pow_str("y", j)),
            };
            if mono.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

fn pow_str(v: &str, e: u32) -> String {
    if e == 1 {
        v.to_string()
    } else {
        format!("{v}^{e}")
    }
}

// Wire format: [[i, j, "num/den"], ...] in ascending (i + j, i) order.
impl Serialize for BivariatePolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (m, c) in &self.terms {
            seq.serialize_element(&(m.x, m.y, format_fraction(c)))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for BivariatePolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: Vec<(u32, u32, String)> = Vec::deserialize(d)?;
        let mut p = Poly::zero();
        for (i, j, c) in raw {
            let q = parse_rational(&c).map_err(D::Error::custom)?;
            if p.terms.contains_key(&Monomial::new(i, j)) {
                return Err(D::Error::custom(format!("duplicate monomial x^{i} y^{j}")));
            }
            p.add_term(Monomial::new(i, j), q);
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::rational::rat;

    fn x() -> Poly {
        Poly::x()
    }
    fn y() -> Poly {
        Poly::y()
    }
    fn c(n: i64) -> Poly {
        Poly::constant(int(n))
    }

    #[test]
    fn difference_of_squares() {
        let lhs = x().add(&y()).mul(&x().sub(&y()));
        let rhs = x().pow(2).sub(&y().pow(2));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivative_of_circle_form() {
        let f = Poly::circle(&int(2), &int(3), &int(1));
        assert_eq!(f.diff_y(), y().scale(&int(2)).sub(&c(6)));
        assert_eq!(f.diff_x().degree(), Some(1));
    }

    #[test]
    fn pow_zero_is_one() {
        let f = Poly::circle(&int(0), &int(0), &int(1));
        assert_eq!(f.pow(0), Poly::one());
    }

    #[test]
    fn zero_has_no_degree() {
        assert_eq!(Poly::zero().degree(), None);
        assert_eq!(x().sub(&x()), Poly::zero());
        assert!(x().sub(&x()).is_zero());
    }

    #[test]
    fn evaluation_examples() {
        let unit = Poly::circle(&int(0), &int(0), &int(1));
        assert_eq!(unit.eval(1.0, 0.0), 0.0);
        assert_eq!(unit.eval(2.0, 0.0), 3.0);
        assert_eq!(y().scale(&int(2)).eval(0.5, -1.5), -3.0);
    }

    #[test]
    fn division_examples() {
        let p = x().pow(2).sub(&c(1));
        let q = p.exact_divide(&x().sub(&c(1))).unwrap().unwrap();
        assert_eq!(q, x().add(&c(1)));

        let s = x().pow(2).add(&y().pow(2));
        assert_eq!(s.exact_divide(&x()).unwrap(), None);

        let f = Poly::circle(&int(0), &int(0), &int(1));
        let g = s.clone();
        let prod = f.pow(2).mul(&g);
        assert_eq!(prod.exact_divide(&f).unwrap().unwrap(), f.mul(&g));

        assert_eq!(s.exact_divide(&Poly::zero()), Err(PolyError::DivisionByZero));
    }

    #[test]
    fn vanishing_order_examples() {
        let f = Poly::circle(&int(0), &int(0), &int(1));
        let g = x().pow(2).add(&y().pow(2));
        assert_eq!(f.pow(2).mul(&g).vanishing_order(&f).unwrap(), 2);
        assert_eq!(g.vanishing_order(&f).unwrap(), 0);
        assert_eq!(f.pow(3).mul(&x().add(&c(1))).vanishing_order(&f).unwrap(), 3);
        assert_eq!(Poly::zero().vanishing_order(&f), Err(PolyError::ZeroPolynomialOrder));
        assert_eq!(g.vanishing_order(&c(2)), Err(PolyError::ConstantFactor));
    }

    #[test]
    fn wire_format_is_sorted_and_exact() {
        let p = Poly::from_terms([(0, 2, rat(1, 3)), (1, 0, int(-2)), (0, 0, rat(5, 7)), (2, 0, int(1))]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"[[0,0,"5/7"],[1,0,"-2/1"],[0,2,"1/3"],[2,0,"1/1"]]"#);
        let back: Poly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn exact_eval_matches_float() {
        let f = Poly::circle(&rat(1, 2), &rat(-3, 4), &rat(9, 16));
        let v = f.eval_exact(&rat(3, 2), &rat(1, 4));
        assert_eq!(v, rat(1, 1) + rat(1, 1) - rat(9, 16));
        assert!((f.eval(1.5, 0.25) - 1.4375).abs() < 1e-15);
    }
}
