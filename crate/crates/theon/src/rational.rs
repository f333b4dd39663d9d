//! Exact rationals and their text form.

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub type Rational = num_rational::BigRational;

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Always `num/den`, including integers (`1/1`, `0/1`).
pub fn fmt(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `a/b`, `a` or a finite decimal such as `0.25`.
pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let digits = format!("{}{}", ip.trim_start_matches('-'), fp);
        let n: BigInt = digits.parse().ok()?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let q = Rational::new(n, d);
        return Some(if neg { -q } else { q });
    }
    s.parse::<BigInt>().ok().map(Rational::from_integer)
}

pub fn to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_integers_with_denominator() {
        assert_eq!(fmt(&int(1)), "1/1");
        assert_eq!(fmt(&zero()), "0/1");
        assert_eq!(fmt(&ratio(2, 6)), "1/3");
    }

    #[test]
    fn parses_forms() {
        assert_eq!(parse("2/3"), Some(ratio(2, 3)));
        assert_eq!(parse("0.25"), Some(ratio(1, 4)));
        assert_eq!(parse("-3"), Some(int(-3)));
        assert_eq!(parse("1/0"), None);
    }
}
