//! Rational points of matrix groups and varieties, their residue images, and
//! covering experiments.
//!
//! A matrix point is written over one common denominator `D`. Its *common
//! height* is `max(D, max |numerator|)`, and a [`HeightBound`] `H` caps that
//! quantity, which also caps every entry's own reduced numerator and
//! denominator.

mod covering;
mod groups;
mod hom;
mod variety;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::metric::{encode_q, reconstruct, LocalityScale, MetricError};
use crate::rational::{q_to_string, GaussianRational, Q};
use crate::residue::{GaussianResidue, Matrix, Modulus, Residue, ResidueError, Scalar};

pub use covering::{covering_radius, enumerate_points, reference_grid, CoveringReport, GridSpec, MAX_POINTS};
pub use groups::{
    cayley, generate_rational_point, quaternion_from_stereographic, sample_point, verify_membership,
    HalfAngle, PointParams,
};
pub use hom::{group_hom_check, group_hom_check_pairs, required_bounds, HomFailure, HomReport};
pub use variety::{variety_points, VarietyReport, VarietyScan};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("point height {height} exceeds the bound {bound}")]
    HeightExceeded { height: String, bound: u64 },
    #[error("degenerate parameters: {0}")]
    DegenerateParams(String),
    #[error("decoding products needs bounds {num_required}x{den_required}, but scale height is {available} at modulus {modulus}")]
    WindowTooSmall { num_required: u128, den_required: u128, available: u64, modulus: u64 },
    #[error("the generated point set is empty")]
    EmptyPointSet,
    #[error("{0} is not compact; covering radius is undefined")]
    NonCompactFamily(GroupFamily),
    #[error("invalid group family: {0}")]
    InvalidFamily(String),
    #[error("matrices of different kinds or dimensions")]
    Mismatch,
    #[error("enumeration exceeds the budget of {0} elements")]
    EnumerationBudgetExceeded(usize),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Residue(#[from] ResidueError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GroupKind {
    #[serde(rename = "SO")]
    So,
    #[serde(rename = "SU")]
    Su,
    #[serde(rename = "SL2")]
    Sl2Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GroupFamily {
    kind: GroupKind,
    n: usize,
}

impl GroupFamily {
    pub fn so(n: usize) -> Result<Self, StructureError> {
        if n < 2 {
            return Err(StructureError::InvalidFamily(format!("SO({n}) needs n >= 2")));
        }
        Ok(GroupFamily { kind: GroupKind::So, n })
    }

    pub fn su(n: usize) -> Result<Self, StructureError> {
        if n < 2 {
            return Err(StructureError::InvalidFamily(format!("SU({n}) needs n >= 2")));
        }
        Ok(GroupFamily { kind: GroupKind::Su, n })
    }

    pub fn sl2_gaussian() -> Self {
        GroupFamily { kind: GroupKind::Sl2Gaussian, n: 2 }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_compact(&self) -> bool {
        self.kind != GroupKind::Sl2Gaussian
    }

    /// Entries live in `Q[i]` rather than `Q`.
    pub fn is_gaussian(&self) -> bool {
        self.kind != GroupKind::So
    }

    pub fn identity(&self) -> RationalMatrix {
        if self.is_gaussian() {
            RationalMatrix::Gaussian(Matrix::identity(self.n, &GaussianRational::real(Q::zero())))
        } else {
            RationalMatrix::Real(Matrix::identity(self.n, &Q::zero()))
        }
    }
}

impl fmt::Display for GroupFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GroupKind::So => write!(f, "SO({})", self.n),
            GroupKind::Su => write!(f, "SU({})", self.n),
            GroupKind::Sl2Gaussian => write!(f, "SL2"),
        }
    }
}

impl FromStr for GroupFamily {
    type Err = StructureError;

    /// `SO(n)`, `SU(n)` or `SL2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_uppercase().replace(' ', "");
        if t == "SL2" || t == "SL(2)" || t == "SL2_GAUSSIAN" {
            return Ok(Self::sl2_gaussian());
        }
        let bad = || StructureError::InvalidFamily(s.to_string());
        let (head, rest) = t.split_at(t.find('(').ok_or_else(bad)?);
        let n: usize = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?.parse().map_err(|_| bad())?;
        match head {
            "SO" => Self::so(n),
            "SU" => Self::su(n),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct HeightBound(u64);

impl HeightBound {
    pub fn new(h: u64) -> Result<Self, StructureError> {
        if h == 0 {
            return Err(StructureError::DegenerateParams("height bound must be >= 1".into()));
        }
        Ok(HeightBound(h))
    }

    pub fn get(&self) -> u64 {
        self.0
    }
}

/// A group point over `Q` or `Q[i]`.
#[derive(Debug, Clone, PartialEq)]
pub enum RationalMatrix {
    Real(Matrix<Q>),
    Gaussian(Matrix<GaussianRational>),
}

/// A matrix over `F_q` or `F_q^(2)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ResidueMatrix {
    Real(Matrix<Residue>),
    Gaussian(Matrix<GaussianResidue>),
}

impl RationalMatrix {
    pub fn dim(&self) -> usize {
        match self {
            RationalMatrix::Real(m) => m.dim(),
            RationalMatrix::Gaussian(m) => m.dim(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, StructureError> {
        match (self, other) {
            (RationalMatrix::Real(a), RationalMatrix::Real(b)) => Ok(RationalMatrix::Real(a.mul(b)?)),
            (RationalMatrix::Gaussian(a), RationalMatrix::Gaussian(b)) => Ok(RationalMatrix::Gaussian(a.mul(b)?)),
            _ => Err(StructureError::Mismatch),
        }
    }

    /// Every rational component (real parts, then imaginary parts per entry).
    fn components(&self) -> Vec<&Q> {
        match self {
            RationalMatrix::Real(m) => m.entries().iter().collect(),
            RationalMatrix::Gaussian(m) => m.entries().iter().flat_map(|z| [&z.re, &z.im]).collect(),
        }
    }

    /// Least common denominator of all components.
    pub fn common_denominator(&self) -> BigInt {
        self.components().into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }

    /// `max(D, max |numerator|)` over the common denominator `D`.
    pub fn common_height(&self) -> BigInt {
        let d = self.common_denominator();
        let mut h = d.clone();
        for x in self.components() {
            let num = (x.numer() * (&d / x.denom())).abs();
            if num > h {
                h = num;
            }
        }
        h
    }

    pub fn check_height(&self, h: HeightBound) -> Result<(), StructureError> {
        let height = self.common_height();
        if height > BigInt::from(h.get()) {
            return Err(StructureError::HeightExceeded { height: height.to_string(), bound: h.get() });
        }
        Ok(())
    }

    /// Components as floats, for reporting distances only.
    pub fn to_f64(&self) -> Vec<f64> {
        self.components().into_iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = match self {
            RationalMatrix::Real(m) => m
                .rows()
                .map(|r| r.iter().map(q_to_string).collect::<Vec<_>>().join(", "))
                .collect(),
            RationalMatrix::Gaussian(m) => m
                .rows()
                .map(|r| r.iter().map(|z| z.to_string()).collect::<Vec<_>>().join(", "))
                .collect(),
        };
        write!(f, "[[{}]]", rows.join("], ["))
    }
}

impl ResidueMatrix {
    pub fn mul(&self, other: &Self) -> Result<Self, StructureError> {
        match (self, other) {
            (ResidueMatrix::Real(a), ResidueMatrix::Real(b)) => Ok(ResidueMatrix::Real(a.mul(b)?)),
            (ResidueMatrix::Gaussian(a), ResidueMatrix::Gaussian(b)) => Ok(ResidueMatrix::Gaussian(a.mul(b)?)),
            _ => Err(StructureError::Mismatch),
        }
    }

    pub fn modulus(&self) -> Option<Modulus> {
        match self {
            ResidueMatrix::Real(m) => m.entries().first().map(|r| r.modulus()),
            ResidueMatrix::Gaussian(m) => m.entries().first().map(|z| z.modulus()),
        }
    }
}

pub fn encode_matrix(m: &RationalMatrix, q: &Modulus) -> Result<ResidueMatrix, StructureError> {
    Ok(match m {
        RationalMatrix::Real(a) => ResidueMatrix::Real(a.try_map(|x| encode_q(x, q))?),
        RationalMatrix::Gaussian(a) => ResidueMatrix::Gaussian(
            a.try_map(|z| Ok::<_, MetricError>(GaussianResidue::new(encode_q(&z.re, q)?, encode_q(&z.im, q)?)?))?,
        ),
    })
}

/// Entrywise decode at scale `s`; `None` if any component is not local.
pub fn decode_matrix(a: &ResidueMatrix, s: &LocalityScale) -> Result<Option<RationalMatrix>, StructureError> {
    if let Some(q) = a.modulus() {
        s.check_window(&q)?;
    }
    let h = s.height() as u128;
    decode_matrix_bounded(a, h, h)
}

/// Entrywise reconstruction with separate numerator and denominator bounds.
pub fn decode_matrix_bounded(a: &ResidueMatrix, num: u128, den: u128) -> Result<Option<RationalMatrix>, StructureError> {
    let one = |z: &Residue| -> Result<Option<Q>, StructureError> {
        Ok(reconstruct(z, num, den)?.local().map(|r| r.to_q()))
    };
    Ok(match a {
        ResidueMatrix::Real(m) => {
            let mut out = Vec::with_capacity(m.entries().len());
            for z in m.entries() {
                match one(z)? {
                    Some(x) => out.push(x),
                    None => return Ok(None),
                }
            }
            Some(RationalMatrix::Real(from_entries(m.dim(), out)))
        }
        ResidueMatrix::Gaussian(m) => {
            let mut out = Vec::with_capacity(m.entries().len());
            for z in m.entries() {
                match (one(&z.re())?, one(&z.im())?) {
                    (Some(re), Some(im)) => out.push(GaussianRational::new(re, im)),
                    _ => return Ok(None),
                }
            }
            Some(RationalMatrix::Gaussian(from_entries(m.dim(), out)))
        }
    })
}

fn from_entries<T: Scalar>(n: usize, entries: Vec<T>) -> Matrix<T> {
    let mut it = entries.into_iter();
    Matrix::from_fn(n, |_, _| it.next().expect("n*n entries"))
}
