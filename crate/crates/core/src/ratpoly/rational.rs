//! Exact rational helpers on top of `BigRational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::PolyError;

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Very large operands: fall back to a scaled division.
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Canonical `num/den` text, always with an explicit denominator.
pub fn format_fraction(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Short form: integers print without `/1`.
pub fn format_short(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format_fraction(q)
    }
}

/// Parses `p/q`, `p`, or a finite decimal such as `-1.25`.
pub fn parse_rational(s: &str) -> Result<Rational, PolyError> {
    let t = s.trim();
    let bad = || PolyError::Parse(s.to_string());
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        let negative = ip.starts_with('-');
        let ip_digits = ip.trim_start_matches(['-', '+']);
        if fp.is_empty() && ip_digits.is_empty() {
            return Err(bad());
        }
        if !fp.chars().all(|c| c.is_ascii_digit()) || !ip_digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{}{}", if ip_digits.is_empty() { "0" } else { ip_digits }, fp);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let q = Rational::new(n, d);
        return Ok(if negative { -q } else { q });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Best rational approximation of `x` by continued fractions, stopping at the
/// first convergent within `rel_tol` relative error.
pub fn rationalize(x: f64, rel_tol: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some(Rational::zero());
    }
    let exact = Rational::from_float(x)?;
    let target = x.abs();
    let mut rem = exact.abs();
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    loop {
        let a = rem.floor().to_integer();
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        let approx = Rational::new(p2.clone(), q2.clone());
        let err = (to_f64(&approx) - target).abs();
        let frac = &rem - Rational::from_integer(a);
        if err <= rel_tol * target || frac.is_zero() {
            return Some(if x < 0.0 { -approx } else { approx });
        }
        rem = frac.recip();
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
}

/// Rational `s` with `s ≤ sqrt(q)`, relative gap below about 1e-12.
pub fn sqrt_lower(q: &Rational) -> Rational {
    sqrt_bound(q, false)
}

/// Rational `s` with `s ≥ sqrt(q)`, relative gap below about 1e-12.
pub fn sqrt_upper(q: &Rational) -> Rational {
    sqrt_bound(q, true)
}

fn sqrt_bound(q: &Rational, upper: bool) -> Rational {
    assert!(!q.is_negative(), "square root of a negative rational");
    if q.is_zero() {
        return Rational::zero();
    }
    let approx = to_f64(q).sqrt();
    let mut rel = 1e-13;
    loop {
        let factor = if upper { 1.0 + rel } else { 1.0 - rel };
        let cand = Rational::from_float(approx * factor).expect("finite");
        let sq = &cand * &cand;
        if (upper && &sq >= q) || (!upper && &sq <= q) {
            return cand;
        }
        rel *= 16.0;
    }
}

/// Largest dyadic `k / 2^p` not exceeding `q`, with `p` large enough that
/// the loss is at most `q / 128`.
pub fn floor_dyadic(q: &Rational) -> Rational {
    assert!(q.is_positive());
    let mut scale = BigInt::one();
    while Rational::new(BigInt::from(128), scale.clone()) > *q {
        scale <<= 1;
    }
    let k = (q * Rational::from_integer(scale.clone())).floor().to_integer();
    Rational::new(k, scale)
}

pub fn lcm_denominators<'a>(it: impl Iterator<Item = &'a Rational>) -> BigInt {
    it.fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-4").unwrap(), int(-4));
        assert_eq!(parse_rational("-1.25").unwrap(), rat(-5, 4));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn format_round_trip() {
        let q = rat(-22, 7);
        assert_eq!(format_fraction(&q), "-22/7");
        assert_eq!(parse_rational(&format_fraction(&q)).unwrap(), q);
        assert_eq!(format_short(&int(3)), "3");
        assert_eq!(format_fraction(&int(3)), "3/1");
    }

    #[test]
    fn rationalize_pi() {
        let q = rationalize(std::f64::consts::PI, 1e-12).unwrap();
        assert!((to_f64(&q) - std::f64::consts::PI).abs() <= 1e-12 * std::f64::consts::PI);
        assert!(q.denom() < &BigInt::from(10_000_000i64));
        assert_eq!(rationalize(2.0, 1e-12).unwrap(), int(2));
        assert_eq!(rationalize(-0.5, 1e-12).unwrap(), rat(-1, 2));
    }

    #[test]
    fn sqrt_bounds_bracket() {
        for v in [rat(2, 1), rat(1, 3), rat(25, 4), rat(1, 1_000_000)] {
            let lo = sqrt_lower(&v);
            let hi = sqrt_upper(&v);
            assert!(&lo * &lo <= v);
            assert!(&hi * &hi >= v);
            assert!(to_f64(&(&hi - &lo)) < 1e-10 * to_f64(&v).sqrt());
        }
    }

    #[test]
    fn dyadic_floor() {
        let q = rat(1, 3);
        let d = floor_dyadic(&q);
        assert!(d <= q);
        assert!(d >= &q * rat(127, 128));
        let den = d.denom().clone();
        assert_eq!(&den & (&den - BigInt::one()), BigInt::zero());
    }
}
