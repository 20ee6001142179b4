//! Exact arithmetic in `F_q`, `Z_n`, the Gaussian extension and square
//! matrices over them.
//!
//! Every value carries its [`Modulus`]; binary operations between values
//! over different moduli are rejected with [`ResidueError::ModulusMismatch`].
//! Canonical representatives are the least non-negative residues.

mod gaussian;
mod matrix;
mod prime;

pub use gaussian::GaussianResidue;
pub use matrix::{Matrix, Scalar};
pub use prime::{is_prime, next_prime};

use std::fmt;

use prime::mul_mod;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResidueError {
    #[error("modulus {0} is composite but field mode was requested")]
    CompositeInFieldMode(u64),
    #[error("modulus must be at least 2, got {0}")]
    ValueTooSmall(u64),
    #[error("operands live over different moduli ({0} vs {1})")]
    ModulusMismatch(u64, u64),
    #[error("{value} is not a unit modulo {modulus}")]
    NonUnit { value: u64, modulus: u64 },
    #[error("matrix dimensions do not match ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("elimination hit a non-unit pivot in column {0}")]
    SingularPivot(usize),
    #[error("{divisor} does not divide {modulus}")]
    NotADivisor { divisor: u64, modulus: u64 },
    #[error("no prime >= {0} fits in 64 bits")]
    RangeExhausted(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModulusMode {
    Field,
    Ring,
}

/// A validated modulus: a prime in field mode, any `n >= 2` in ring mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Modulus {
    value: u64,
    mode: ModulusMode,
}

impl Modulus {
    pub fn new(value: u64, mode: ModulusMode) -> Result<Self, ResidueError> {
        if value < 2 {
            return Err(ResidueError::ValueTooSmall(value));
        }
        if mode == ModulusMode::Field && !is_prime(value) {
            return Err(ResidueError::CompositeInFieldMode(value));
        }
        Ok(Modulus { value, mode })
    }

    pub fn field(q: u64) -> Result<Self, ResidueError> {
        Self::new(q, ModulusMode::Field)
    }

    pub fn ring(n: u64) -> Result<Self, ResidueError> {
        Self::new(n, ModulusMode::Ring)
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn mode(&self) -> ModulusMode {
        self.mode
    }

    pub fn is_field(&self) -> bool {
        self.mode == ModulusMode::Field
    }

    /// Residue of a signed integer.
    pub fn reduce(&self, k: i128) -> Residue {
        let value = k.rem_euclid(self.value as i128) as u64;
        Residue { value, modulus: *self }
    }

    pub fn residue(&self, value: u64) -> Residue {
        Residue { value: value % self.value, modulus: *self }
    }

    pub fn zero(&self) -> Residue {
        Residue { value: 0, modulus: *self }
    }

    pub fn one(&self) -> Residue {
        Residue { value: 1, modulus: *self }
    }

    /// All residues `0..value`, in order.
    pub fn elements(&self) -> impl Iterator<Item = Residue> + '_ {
        (0..self.value).map(move |v| Residue { value: v, modulus: *self })
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            ModulusMode::Field => write!(f, "F_{}", self.value),
            ModulusMode::Ring => write!(f, "Z_{}", self.value),
        }
    }
}

/// Element of `F_q` or `Z_n` in canonical form `0 <= value < modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u64,
    modulus: Modulus,
}

impl Residue {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    fn check(&self, other: &Residue) -> Result<(), ResidueError> {
        if self.modulus.value != other.modulus.value {
            return Err(ResidueError::ModulusMismatch(self.modulus.value, other.modulus.value));
        }
        Ok(())
    }

    pub fn add(&self, other: &Residue) -> Result<Residue, ResidueError> {
        self.check(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn sub(&self, other: &Residue) -> Result<Residue, ResidueError> {
        self.check(other)?;
        Ok(self.sub_unchecked(other))
    }

    pub fn mul(&self, other: &Residue) -> Result<Residue, ResidueError> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &Residue) -> Residue {
        let m = self.modulus.value as u128;
        let value = ((self.value as u128 + other.value as u128) % m) as u64;
        Residue { value, modulus: self.modulus }
    }

    pub(crate) fn sub_unchecked(&self, other: &Residue) -> Residue {
        let value = if self.value >= other.value {
            self.value - other.value
        } else {
            self.modulus.value - (other.value - self.value)
        };
        Residue { value, modulus: self.modulus }
    }

    pub(crate) fn mul_unchecked(&self, other: &Residue) -> Residue {
        Residue { value: mul_mod(self.value, other.value, self.modulus.value), modulus: self.modulus }
    }

    pub fn neg(&self) -> Residue {
        self.modulus.zero().sub_unchecked(self)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(&self) -> Result<Residue, ResidueError> {
        let m = self.modulus.value as i128;
        let (mut r0, mut r1) = (m, self.value as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let quot = r0 / r1;
            (r0, r1) = (r1, r0 - quot * r1);
            (t0, t1) = (t1, t0 - quot * t1);
        }
        if r0 != 1 {
            return Err(ResidueError::NonUnit { value: self.value, modulus: self.modulus.value });
        }
        Ok(self.modulus.reduce(t0))
    }

    pub fn pow(&self, mut exp: u64) -> Residue {
        let mut acc = self.modulus.one();
        let mut base = *self;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            exp >>= 1;
        }
        acc
    }

    /// Signed representative in `(-n/2, n/2]`.
    pub fn signed(&self) -> i128 {
        let v = self.value as i128;
        let m = self.modulus.value as i128;
        if v > m / 2 {
            v - m
        } else {
            v
        }
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// The reduction `Z_n -> F_q`, `k -> k mod q`, defined when `q | n`.
pub fn project_ring_to_field(k: &Residue, q: &Modulus) -> Result<Residue, ResidueError> {
    let n = k.modulus.value;
    if !q.is_field() {
        return Err(ResidueError::CompositeInFieldMode(q.value));
    }
    if !n.is_multiple_of(q.value) {
        return Err(ResidueError::NotADivisor { divisor: q.value, modulus: n });
    }
    Ok(q.residue(k.value))
}
