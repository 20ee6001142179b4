//! Exact rationals: the bounded pairs produced by decoding, and unbounded
//! `BigRational` arithmetic for the rational side of every comparison.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::residue::Scalar;

/// Unbounded exact rational.
pub type Q = BigRational;

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// `max(|numerator|, denominator)` of a reduced rational.
pub fn q_height(x: &Q) -> BigInt {
    let n = x.numer().abs();
    let d = x.denom().clone();
    if n > d {
        n
    } else {
        d
    }
}

pub fn q_to_string(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Reduced `k1/k2` with `k2 >= 1`; the sign lives on `k1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoundedRational {
    k1: i64,
    k2: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RationalError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("rational does not fit the 64-bit bounded representation")]
    TooLarge,
    #[error("cannot parse rational {0:?}")]
    Parse(String),
}

impl BoundedRational {
    pub const ZERO: BoundedRational = BoundedRational { k1: 0, k2: 1 };
    pub const ONE: BoundedRational = BoundedRational { k1: 1, k2: 1 };

    pub fn new(k1: i64, k2: i64) -> Result<Self, RationalError> {
        Self::from_i128(k1 as i128, k2 as i128)
    }

    pub fn integer(k: i64) -> Self {
        BoundedRational { k1: k, k2: 1 }
    }

    pub fn from_i128(num: i128, den: i128) -> Result<Self, RationalError> {
        if den == 0 {
            return Err(RationalError::ZeroDenominator);
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        let k1 = i64::try_from(n).map_err(|_| RationalError::TooLarge)?;
        let k2 = u64::try_from(d).map_err(|_| RationalError::TooLarge)?;
        Ok(BoundedRational { k1, k2 })
    }

    pub fn numer(&self) -> i64 {
        self.k1
    }

    pub fn denom(&self) -> u64 {
        self.k2
    }

    pub fn height(&self) -> u64 {
        self.k1.unsigned_abs().max(self.k2)
    }

    pub fn is_zero(&self) -> bool {
        self.k1 == 0
    }

    pub fn abs(&self) -> Self {
        BoundedRational { k1: self.k1.abs(), k2: self.k2 }
    }

    pub fn neg(&self) -> Self {
        BoundedRational { k1: -self.k1, k2: self.k2 }
    }

    /// `|k1| / k2 <= bound`, compared exactly.
    pub fn ratio_at_most(&self, bound: u64) -> bool {
        self.k1.unsigned_abs() as u128 <= bound as u128 * self.k2 as u128
    }

    pub fn to_q(&self) -> Q {
        Q::new(BigInt::from(self.k1), BigInt::from(self.k2))
    }

    pub fn from_q(x: &Q) -> Result<Self, RationalError> {
        let k1 = x.numer().to_i64().ok_or(RationalError::TooLarge)?;
        let k2 = x.denom().to_u64().ok_or(RationalError::TooLarge)?;
        Ok(BoundedRational { k1, k2 })
    }

    pub fn checked_add(&self, other: &Self) -> Option<Self> {
        let n = (self.k1 as i128).checked_mul(other.k2 as i128)?
            .checked_add((other.k1 as i128).checked_mul(self.k2 as i128)?)?;
        let d = (self.k2 as i128).checked_mul(other.k2 as i128)?;
        Self::from_i128(n, d).ok()
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Self) -> Option<Self> {
        let n = (self.k1 as i128).checked_mul(other.k1 as i128)?;
        let d = (self.k2 as i128).checked_mul(other.k2 as i128)?;
        Self::from_i128(n, d).ok()
    }

    /// `|self - other|`, the distance on decoded values.
    pub fn abs_diff(&self, other: &Self) -> Option<Self> {
        self.checked_sub(other).map(|d| d.abs())
    }

    pub fn to_f64(&self) -> f64 {
        self.k1 as f64 / self.k2 as f64
    }
}

impl Ord for BoundedRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.k1 as i128 * other.k2 as i128;
        let rhs = other.k1 as i128 * self.k2 as i128;
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for BoundedRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BoundedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.k1, self.k2)
    }
}

impl FromStr for BoundedRational {
    type Err = RationalError;

    /// Accepts `p/q` or a bare integer.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RationalError::Parse(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            Some((n, d)) => {
                let n: i64 = n.trim().parse().map_err(|_| bad())?;
                let d: i64 = d.trim().parse().map_err(|_| bad())?;
                Self::new(n, d)
            }
            None => s.parse::<i64>().map(Self::integer).map_err(|_| bad()),
        }
    }
}

impl Serialize for BoundedRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Scalar for Q {
    fn zero_like(&self) -> Self {
        Q::zero()
    }
    fn one_like(&self) -> Self {
        Q::one()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn try_inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// Element `re + i*im` of `Q[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: Q,
    pub im: Q,
}

impl GaussianRational {
    pub fn new(re: Q, im: Q) -> Self {
        GaussianRational { re, im }
    }

    pub fn real(re: Q) -> Self {
        GaussianRational { re, im: Q::zero() }
    }

    pub fn i() -> Self {
        GaussianRational { re: Q::zero(), im: Q::one() }
    }

    /// `|z|^2`.
    pub fn norm(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn height(&self) -> BigInt {
        q_height(&self.re).max(q_height(&self.im))
    }
}

impl Scalar for GaussianRational {
    fn zero_like(&self) -> Self {
        GaussianRational { re: Q::zero(), im: Q::zero() }
    }
    fn one_like(&self) -> Self {
        GaussianRational { re: Q::one(), im: Q::zero() }
    }
    fn plus(&self, other: &Self) -> Self {
        GaussianRational { re: &self.re + &other.re, im: &self.im + &other.im }
    }
    fn minus(&self, other: &Self) -> Self {
        GaussianRational { re: &self.re - &other.re, im: &self.im - &other.im }
    }
    fn times(&self, other: &Self) -> Self {
        GaussianRational {
            re: &self.re * &other.re - &self.im * &other.im,
            im: &self.re * &other.im + &self.im * &other.re,
        }
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn try_inv(&self) -> Option<Self> {
        let n = self.norm();
        if Zero::is_zero(&n) {
            return None;
        }
        Some(GaussianRational { re: &self.re / &n, im: -(&self.im / &n) })
    }
    fn conj(&self) -> Self {
        GaussianRational { re: self.re.clone(), im: -self.im.clone() }
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", q_to_string(&self.re), q_to_string(&self.im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_and_sign() {
        let r = BoundedRational::new(4, -6).unwrap();
        assert_eq!((r.numer(), r.denom()), (-2, 3));
        assert_eq!(BoundedRational::new(0, -5).unwrap(), BoundedRational::ZERO);
        assert_eq!(BoundedRational::new(1, 0), Err(RationalError::ZeroDenominator));
    }

    #[test]
    fn ordering_is_exact() {
        let a: BoundedRational = "1/3".parse().unwrap();
        let b: BoundedRational = "-1/2".parse().unwrap();
        let c: BoundedRational = "333333333/1000000000".parse().unwrap();
        assert!(b < c && c < a);
        assert_eq!(a.abs_diff(&b).unwrap(), "5/6".parse().unwrap());
    }

    #[test]
    fn q_round_trip() {
        let r = BoundedRational::new(-7, 12).unwrap();
        assert_eq!(BoundedRational::from_q(&r.to_q()).unwrap(), r);
        assert_eq!(q_height(&q_frac(-7, 3)), BigInt::from(7));
    }

    #[test]
    fn gaussian_rational_inverse() {
        let z = GaussianRational::new(q_frac(3, 5), q_frac(-4, 5));
        let w = z.try_inv().unwrap();
        assert_eq!(z.times(&w), z.one_like());
        assert_eq!(w, z.conj()); // unit modulus
    }
}
