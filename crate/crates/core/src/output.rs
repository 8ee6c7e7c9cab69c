//! Formatting shared by the CSV and JSON writers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exactalg::Rational;

/// Fixed 17-significant-digit rendering so that identical runs produce
/// byte-identical files.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// File-name friendly label for a rational `lambda`: the exact decimal when
/// the expansion terminates (`0.25`, `1`), otherwise `num_den`.
pub fn lambda_label(value: &Rational) -> String {
    let den = value.denom().clone();
    let mut rest = den.clone();
    let mut twos = 0u32;
    let mut fives = 0u32;
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while rest.is_even() {
        rest /= &two;
        twos += 1;
    }
    while (&rest % &five).is_zero() {
        rest /= &five;
        fives += 1;
    }
    if !rest.is_one() {
        let sign = if value.is_negative() { "m" } else { "" };
        return format!("{sign}{}_{}", value.numer().abs(), den);
    }
    let digits = twos.max(fives) as usize;
    let scaled = (value * Rational::from_integer(num_traits::pow(BigInt::from(10), digits))).to_integer();
    let negative = scaled.is_negative();
    let mut s = scaled.abs().to_string();
    if digits > 0 {
        if s.len() <= digits {
            s = format!("{}{s}", "0".repeat(digits + 1 - s.len()));
        }
        s.insert(s.len() - digits, '.');
    }
    if negative {
        s.insert(0, '-');
    }
    s
}
