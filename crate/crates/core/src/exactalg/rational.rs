use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational; always stored in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Parses `"a"`, `"a/b"` or a plain decimal such as `"-0.125"` into an exact
/// rational. Decimals are read digit by digit, never through `f64`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((num, den)) = text.split_once('/') {
        let num = BigInt::from_str(num.trim()).ok()?;
        let den = BigInt::from_str(den.trim()).ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    if let Some((int_part, frac_part)) = text.split_once('.') {
        let (negative, int_digits) = match int_part.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, int_part.strip_prefix('+').unwrap_or(int_part)),
        };
        if !int_digits.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
            || (int_digits.is_empty() && frac_part.is_empty())
        {
            return None;
        }
        let digits = format!("{int_digits}{frac_part}");
        let num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        let value = Rational::new(num, den);
        return Some(if negative { -value } else { value });
    }
    BigInt::from_str(text).ok().map(Rational::from_integer)
}

/// Nearest `f64` to an exact rational. Handles magnitudes far outside the
/// range where numerator and denominator individually fit in a double.
pub fn rational_to_f64(value: &Rational) -> f64 {
    if let Some(v) = value.to_f64() {
        if v.is_finite() && (v != 0.0 || value.is_zero()) {
            return v;
        }
    }
    let sign = if value.is_negative() { -1.0 } else { 1.0 };
    sign * ln_abs(value).exp()
}

/// Natural logarithm of `|value|`, computed from the bit lengths of numerator
/// and denominator so that it stays accurate for huge or tiny rationals.
/// Returns `-inf` for zero.
pub fn ln_abs(value: &Rational) -> f64 {
    if value.is_zero() {
        return f64::NEG_INFINITY;
    }
    ln_bigint(value.numer()) - ln_bigint(value.denom())
}

fn ln_bigint(n: &BigInt) -> f64 {
    let magnitude = n.magnitude();
    let bits = magnitude.bits();
    if bits <= 1000 {
        return BigInt::from_biguint(Sign::Plus, magnitude.clone()).to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (magnitude >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `n!` as an exact rational.
pub fn factorial(n: usize) -> Rational {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    Rational::from_integer(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_rational("3/6"), Some(r(1, 2)));
        assert_eq!(parse_rational("-7"), Some(r(-7, 1)));
        assert_eq!(parse_rational("0.125"), Some(r(1, 8)));
        assert_eq!(parse_rational("-0.1"), Some(r(-1, 10)));
        assert_eq!(parse_rational(".5"), Some(r(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn normalization_invariant() {
        let x = r(6, -4);
        assert_eq!(x.numer(), &BigInt::from(-3));
        assert_eq!(x.denom(), &BigInt::from(2));
    }

    #[test]
    fn ln_abs_of_huge_values() {
        let big = Rational::from_integer(num_traits::pow(BigInt::from(10), 400));
        assert!((ln_abs(&big) - 400.0 * 10f64.ln()).abs() < 1e-9);
        let tiny = big.recip();
        assert!((ln_abs(&tiny) + 400.0 * 10f64.ln()).abs() < 1e-9);
        assert_eq!(rational_to_f64(&r(-3, 4)), -0.75);
    }

    #[test]
    fn small_factorials() {
        assert_eq!(factorial(0), r(1, 1));
        assert_eq!(factorial(6), r(720, 1));
    }
}
