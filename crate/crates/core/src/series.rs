//! Truncated integer power series `c_0 + c_1 t + ... + c_B t^B`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    coeffs: Vec<BigInt>,
}

impl TruncatedSeries {
    /// Series with the given coefficients; the bound is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series keeps at least c_0");
        TruncatedSeries { coeffs }
    }

    pub fn from_u64(coeffs: &[u64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn one(bound: usize) -> Self {
        let mut c = vec![BigInt::zero(); bound + 1];
        c[0] = BigInt::one();
        Self::new(c)
    }

    /// `t` truncated at `bound`.
    pub fn t(bound: usize) -> Self {
        let mut c = vec![BigInt::zero(); bound + 1];
        if bound >= 1 {
            c[1] = BigInt::one();
        }
        Self::new(c)
    }

    pub fn bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    pub fn truncate(&self, bound: usize) -> Self {
        Self::new((0..=bound).map(|i| self.coeff(i)).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let b = self.bound().min(other.bound());
        Self::new((0..=b).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let b = self.bound().min(other.bound());
        Self::new((0..=b).map(|i| &self.coeffs[i] - &other.coeffs[i]).collect())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Product truncated at the smaller bound.
    pub fn mul(&self, other: &Self) -> Self {
        let b = self.bound().min(other.bound());
        let mut out = vec![BigInt::zero(); b + 1];
        for (i, x) in self.coeffs.iter().enumerate().take(b + 1) {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coeffs.iter().enumerate().take(b + 1 - i) {
                out[i + j] += x * y;
            }
        }
        Self::new(out)
    }

    /// Multiplicative inverse; requires constant term 1.
    pub fn inverse(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::NonUnitConstantTerm(self.coeffs[0].to_string()));
        }
        let b = self.bound();
        let mut inv: Vec<BigInt> = Vec::with_capacity(b + 1);
        inv.push(BigInt::one());
        for n in 1..=b {
            let mut s = BigInt::zero();
            for k in 1..=n {
                s += &self.coeffs[k] * &inv[n - k];
            }
            inv.push(-s);
        }
        Ok(Self::new(inv))
    }

    /// `self * other^{-1}`
    pub fn mul_inv(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inverse()?))
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => c.to_string(),
                1 => format!("{c}t"),
                _ => format!("{c}t^{i}"),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{} + O(t^{})", parts.join(" + "), self.bound() + 1)
        }
    }
}
