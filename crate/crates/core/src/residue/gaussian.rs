use std::fmt;

use super::{Modulus, Residue, ResidueError, Scalar};

/// Element `(a, b)` of the ring `R x R` with `(a1,b1)(a2,b2) = (a1a2 - b1b2, a1b2 + b1a2)`.
///
/// This is `R[x]/(x^2 + 1)`. It is a field only when `x^2 + 1` is
/// irreducible; for `q = 1 (mod 4)` it has zero divisors, so inversion is
/// always fallible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GaussianResidue {
    re: Residue,
    im: Residue,
}

impl GaussianResidue {
    pub fn new(re: Residue, im: Residue) -> Result<Self, ResidueError> {
        re.check(&im)?;
        Ok(GaussianResidue { re, im })
    }

    pub fn from_parts(modulus: &Modulus, re: i128, im: i128) -> Self {
        GaussianResidue { re: modulus.reduce(re), im: modulus.reduce(im) }
    }

    pub fn re(&self) -> Residue {
        self.re
    }

    pub fn im(&self) -> Residue {
        self.im
    }

    pub fn modulus(&self) -> Modulus {
        self.re.modulus
    }

    pub fn add(&self, other: &Self) -> Result<Self, ResidueError> {
        self.re.check(&other.re)?;
        Ok(self.plus(other))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, ResidueError> {
        self.re.check(&other.re)?;
        Ok(self.times(other))
    }

    /// `(a, b) -> (a, -b)`.
    pub fn conjugate(&self) -> Self {
        GaussianResidue { re: self.re, im: self.im.neg() }
    }

    /// `a^2 + b^2`; the element is a unit iff its norm is.
    pub fn norm(&self) -> Residue {
        self.re.mul_unchecked(&self.re).add_unchecked(&self.im.mul_unchecked(&self.im))
    }

    pub fn inv(&self) -> Result<Self, ResidueError> {
        let n_inv = self.norm().inv().map_err(|_| ResidueError::NonUnit {
            value: self.norm().value,
            modulus: self.modulus().value,
        })?;
        let c = self.conjugate();
        Ok(GaussianResidue { re: c.re.mul_unchecked(&n_inv), im: c.im.mul_unchecked(&n_inv) })
    }
}

impl Scalar for GaussianResidue {
    fn zero_like(&self) -> Self {
        let z = self.modulus().zero();
        GaussianResidue { re: z, im: z }
    }
    fn one_like(&self) -> Self {
        let m = self.modulus();
        GaussianResidue { re: m.one(), im: m.zero() }
    }
    fn plus(&self, other: &Self) -> Self {
        GaussianResidue { re: self.re.add_unchecked(&other.re), im: self.im.add_unchecked(&other.im) }
    }
    fn minus(&self, other: &Self) -> Self {
        GaussianResidue { re: self.re.sub_unchecked(&other.re), im: self.im.sub_unchecked(&other.im) }
    }
    fn times(&self, other: &Self) -> Self {
        let (a1, b1, a2, b2) = (&self.re, &self.im, &other.re, &other.im);
        GaussianResidue {
            re: a1.mul_unchecked(a2).sub_unchecked(&b1.mul_unchecked(b2)),
            im: a1.mul_unchecked(b2).add_unchecked(&b1.mul_unchecked(a2)),
        }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn try_inv(&self) -> Option<Self> {
        self.inv().ok()
    }
    fn conj(&self) -> Self {
        self.conjugate()
    }
    fn modulus_value(&self) -> Option<u64> {
        Some(self.modulus().value)
    }
}

impl fmt::Display for GaussianResidue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.re, self.im)
    }
}
