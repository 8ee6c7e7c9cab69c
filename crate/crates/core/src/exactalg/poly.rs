use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::gaussian::GaussRat;
use super::rational::Rational;

/// Polynomial in the mesh ratio `lambda` with Gaussian-rational
/// coefficients, stored in ascending powers with trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LambdaPoly {
    coeffs: Vec<GaussRat>,
}

impl LambdaPoly {
    pub fn from_coeffs(mut coeffs: Vec<GaussRat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_rationals(coeffs: impl IntoIterator<Item = Rational>) -> Self {
        Self::from_coeffs(coeffs.into_iter().map(GaussRat::real).collect())
    }

    pub fn constant(c: GaussRat) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(GaussRat::from_int(n))
    }

    /// The polynomial `lambda`.
    pub fn lambda() -> Self {
        Self::monomial(GaussRat::one(), 1)
    }

    pub fn monomial(c: GaussRat, power: usize) -> Self {
        let mut coeffs = vec![GaussRat::zero(); power];
        coeffs.push(c);
        Self::from_coeffs(coeffs)
    }

    pub fn coeffs(&self) -> &[GaussRat] {
        &self.coeffs
    }

    /// Coefficient of `lambda^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> GaussRat {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(GaussRat::is_real)
    }

    pub fn real_part(&self) -> LambdaPoly {
        Self::from_rationals(self.coeffs.iter().map(|c| c.re.clone()))
    }

    pub fn imag_part(&self) -> LambdaPoly {
        Self::from_rationals(self.coeffs.iter().map(|c| c.im.clone()))
    }

    pub fn eval(&self, lambda: &Rational) -> GaussRat {
        let mut acc = GaussRat::zero();
        for c in self.coeffs.iter().rev() {
            acc = &acc.scale(lambda) + c;
        }
        acc
    }

    /// Exact evaluation at the dyadic rational equal to `lambda`, then
    /// conversion to double precision.
    pub fn eval_f64(&self, lambda: f64) -> Complex64 {
        match Rational::from_float(lambda) {
            Some(l) => self.eval(&l).to_complex(),
            None => Complex64::new(f64::NAN, f64::NAN),
        }
    }

    pub fn scale(&self, factor: &GaussRat) -> LambdaPoly {
        Self::from_coeffs(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn scale_rational(&self, factor: &Rational) -> LambdaPoly {
        Self::from_coeffs(self.coeffs.iter().map(|c| c.scale(factor)).collect())
    }

    /// Multiplies by `lambda`.
    pub fn mul_lambda(&self) -> LambdaPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(GaussRat::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// Exact division by `lambda`; `None` when the constant term is nonzero.
    pub fn div_lambda(&self) -> Option<LambdaPoly> {
        match self.coeffs.first() {
            None => Some(self.clone()),
            Some(c0) if c0.is_zero() => Some(Self { coeffs: self.coeffs[1..].to_vec() }),
            Some(_) => None,
        }
    }
}

impl Zero for LambdaPoly {
    fn zero() -> Self {
        Self::default()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for LambdaPoly {
    fn one() -> Self {
        Self::from_int(1)
    }
}

impl<'a> Add<&'a LambdaPoly> for &'a LambdaPoly {
    type Output = LambdaPoly;
    fn add(self, rhs: &LambdaPoly) -> LambdaPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        LambdaPoly::from_coeffs((0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect())
    }
}

impl<'a> Sub<&'a LambdaPoly> for &'a LambdaPoly {
    type Output = LambdaPoly;
    fn sub(self, rhs: &LambdaPoly) -> LambdaPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        LambdaPoly::from_coeffs((0..n).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect())
    }
}

impl<'a> Mul<&'a LambdaPoly> for &'a LambdaPoly {
    type Output = LambdaPoly;
    fn mul(self, rhs: &LambdaPoly) -> LambdaPoly {
        if self.is_zero() || rhs.is_zero() {
            return LambdaPoly::zero();
        }
        let mut out = vec![GaussRat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        LambdaPoly::from_coeffs(out)
    }
}

impl Neg for &LambdaPoly {
    type Output = LambdaPoly;
    fn neg(self) -> LambdaPoly {
        LambdaPoly { coeffs: self.coeffs.iter().map(Neg::neg).collect() }
    }
}

impl Neg for LambdaPoly {
    type Output = LambdaPoly;
    fn neg(self) -> LambdaPoly {
        -&self
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr<LambdaPoly> for LambdaPoly {
            type Output = LambdaPoly;
            fn $method(self, rhs: LambdaPoly) -> LambdaPoly {
                (&self).$method(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

/// Renders a real rational polynomial over a common denominator, e.g.
/// `(1-6*lambda)/12`.
fn fmt_real(coeffs: &[Rational]) -> String {
    let den = coeffs.iter().filter(|c| !c.is_zero()).fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut body = String::new();
    let mut terms = 0;
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let n = (c * Rational::from_integer(den.clone())).to_integer();
        let sign = if n.is_negative() {
            "-"
        } else if terms > 0 {
            "+"
        } else {
            ""
        };
        let mag = n.abs();
        let term = match (k, mag.is_one()) {
            (0, _) => mag.to_string(),
            (1, true) => "lambda".to_string(),
            (1, false) => format!("{mag}*lambda"),
            (_, true) => format!("lambda^{k}"),
            (_, false) => format!("{mag}*lambda^{k}"),
        };
        body.push_str(sign);
        body.push_str(&term);
        terms += 1;
    }
    match (terms, den.is_one()) {
        (0, _) => "0".to_string(),
        (_, true) => body,
        (1, false) => format!("{body}/{den}"),
        (_, false) => format!("({body})/{den}"),
    }
}

impl fmt::Display for LambdaPoly {
    /// Real polynomials print as `(1-6*lambda)/12`; genuinely complex ones as
    /// `<re>+i*(<im>)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re: Vec<Rational> = self.coeffs.iter().map(|c| c.re.clone()).collect();
        let im: Vec<Rational> = self.coeffs.iter().map(|c| c.im.clone()).collect();
        let re_zero = re.iter().all(Zero::is_zero);
        let im_zero = im.iter().all(Zero::is_zero);
        match (re_zero, im_zero) {
            (_, true) => f.write_str(&fmt_real(&re)),
            (true, false) => write!(f, "i*({})", fmt_real(&im)),
            (false, false) => write!(f, "{}+i*({})", fmt_real(&re), fmt_real(&im)),
        }
    }
}
