use std::fmt;

use num_traits::{One, Zero};

use super::gaussian::GaussRat;
use super::poly::LambdaPoly;
use super::rational::Rational;
use super::AlgebraError;

/// Truncated power series `c_0 + c_1 theta + ... + c_N theta^N` whose
/// coefficients are [`LambdaPoly`] values.
///
/// The order `N` is fixed at construction. Binary operations require equal
/// orders and never extend the result; terms above `theta^N` are dropped.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ThetaSeries {
    coeffs: Vec<LambdaPoly>,
}

impl ThetaSeries {
    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![LambdaPoly::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = LambdaPoly::one();
        s
    }

    /// Builds a series of order `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<LambdaPoly>) -> Result<Self, AlgebraError> {
        if coeffs.is_empty() {
            return Err(AlgebraError::EmptySeries);
        }
        Ok(Self { coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, p: usize) -> &LambdaPoly {
        &self.coeffs[p]
    }

    pub fn coeffs(&self) -> &[LambdaPoly] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn check_order(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.order() != other.order() {
            return Err(AlgebraError::OrderMismatch { left: self.order(), right: other.order() });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_order(other)?;
        Ok(Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_order(other)?;
        Ok(Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() })
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_order(other)?;
        let n = self.order();
        let mut out = vec![LambdaPoly::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in self.coeffs_upto(other, n - i) {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Ok(Self { coeffs: out })
    }

    fn coeffs_upto<'a>(&self, other: &'a Self, max: usize) -> impl Iterator<Item = (usize, &'a LambdaPoly)> {
        other.coeffs.iter().enumerate().take(max + 1).filter(|(_, b)| !b.is_zero())
    }

    pub fn scale(&self, factor: &LambdaPoly) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * factor).collect() }
    }

    pub fn scale_gauss(&self, factor: &GaussRat) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c.scale(factor)).collect() }
    }

    /// Principal logarithm `-sum_{m>=1} (1-s)^m / m`, truncated at the
    /// series order.
    ///
    /// Evaluated through the coefficient recurrence implied by
    /// `s * (log s)' = s'`, which yields the identical truncated series in
    /// O(N^2) coefficient products. Requires `c_0 = 1`.
    pub fn log(&self) -> Result<Self, AlgebraError> {
        if !self.coeffs[0].is_one() {
            return Err(AlgebraError::LogConstantTerm(self.coeffs[0].to_string()));
        }
        let n = self.order();
        let mut out = vec![LambdaPoly::zero(); n + 1];
        for k in 1..=n {
            // k L_k = k s_k - sum_{j=1}^{k-1} j L_j s_{k-j}
            let mut acc = self.coeffs[k].scale_rational(&int(k));
            for (j, l_j) in out.iter().enumerate().take(k).skip(1) {
                if l_j.is_zero() || self.coeffs[k - j].is_zero() {
                    continue;
                }
                acc = &acc - &(l_j * &self.coeffs[k - j]).scale_rational(&int(j));
            }
            out[k] = acc.scale_rational(&int(k).recip());
        }
        Ok(Self { coeffs: out })
    }

    /// `sum_{m>=0} s^m / m!` truncated at the series order, via the
    /// recurrence from `E' = s' E`. Requires `c_0 = 0`.
    pub fn exp(&self) -> Result<Self, AlgebraError> {
        if !self.coeffs[0].is_zero() {
            return Err(AlgebraError::ExpConstantTerm(self.coeffs[0].to_string()));
        }
        let n = self.order();
        let mut out = vec![LambdaPoly::zero(); n + 1];
        out[0] = LambdaPoly::one();
        for k in 1..=n {
            // k E_k = sum_{j=1}^{k} j s_j E_{k-j}
            let mut acc = LambdaPoly::zero();
            for j in 1..=k {
                if self.coeffs[j].is_zero() || out[k - j].is_zero() {
                    continue;
                }
                acc = &acc + &(&self.coeffs[j] * &out[k - j]).scale_rational(&int(j));
            }
            out[k] = acc.scale_rational(&int(k).recip());
        }
        Ok(Self { coeffs: out })
    }
}

fn int(k: usize) -> Rational {
    Rational::from_integer(k.into())
}

impl fmt::Display for ThetaSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (p, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match p {
                0 => write!(f, "[{c}]")?,
                _ => write!(f, "[{c}]*theta^{p}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(theta^{})", self.order() + 1)
    }
}
