//! The emerging metric on a finite field.
//!
//! A residue `z` counts as *local* at scale `L = l^m` when `z = k1 * k2^-1`
//! for some `|k1| <= L`, `1 <= k2 <= L`. Inside the window `2L^2 < q` that
//! pair is unique, and decoding it by rational reconstruction is the
//! finite-scale standard-part map. Norm and distance are read off the
//! decoded pair, so they are exact rationals.

mod audit;

pub use audit::{audit_metric, AuditReport, AxiomTally, Sample};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::rational::{BoundedRational, Q};
use crate::residue::{project_ring_to_field, Modulus, Residue, ResidueError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("decoding bounds {num_bound}x{den_bound} violate the uniqueness window 2*N*D < {modulus}")]
    ScaleTooLargeForModulus { num_bound: u128, den_bound: u128, modulus: u64 },
    #[error("denominator {denominator} is not a unit modulo {modulus}")]
    DenominatorNotUnit { denominator: u64, modulus: u64 },
    #[error("residue {0} is not local at the requested scale")]
    NotLocal(u64),
    #[error("height bound l^{level} with l = {l} overflows 64 bits")]
    OverflowAtRequestedLevel { l: u64, level: u64 },
    #[error("enumeration exceeds the budget of {0} elements")]
    EnumerationBudgetExceeded(usize),
    #[error("invalid locality scale: {0}")]
    InvalidScale(String),
    #[error(transparent)]
    Residue(#[from] ResidueError),
}

/// Feasible unit `l` and sort level `m`, with height bound `L = l^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LocalityScale {
    l: u64,
    m: u64,
    height: u64,
}

impl LocalityScale {
    pub fn new(l: u64, m: u64) -> Result<Self, MetricError> {
        if l < 2 {
            return Err(MetricError::InvalidScale(format!("feasible unit l must be >= 2, got {l}")));
        }
        if m < 1 {
            return Err(MetricError::InvalidScale("sort level m must be >= 1".into()));
        }
        let height = checked_pow(l, m).ok_or(MetricError::OverflowAtRequestedLevel { l, level: m })?;
        Ok(LocalityScale { l, m, height })
    }

    /// The widest symmetric scale `(W, 1)` with `2W^2 < q`.
    pub fn widest_for(q: &Modulus) -> Result<Self, MetricError> {
        let w = widest_bound(q.value());
        Self::new(w, 1)
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    /// `L = l^m`.
    pub fn height(&self) -> u64 {
        self.height
    }

    /// Same feasible unit, different level.
    pub fn at_level(&self, m: u64) -> Result<Self, MetricError> {
        Self::new(self.l, m)
    }

    pub fn fits(&self, q: &Modulus) -> bool {
        window_fits(self.height as u128, self.height as u128, q.value())
    }

    pub fn check_window(&self, q: &Modulus) -> Result<(), MetricError> {
        check_window(self.height as u128, self.height as u128, q.value())
    }
}

fn checked_pow(base: u64, exp: u64) -> Option<u64> {
    let exp = u32::try_from(exp).ok()?;
    base.checked_pow(exp)
}

/// Largest `w` with `2w^2 < n`.
pub fn widest_bound(n: u64) -> u64 {
    let mut w = (((n as f64) / 2.0).sqrt()) as u64;
    while w > 0 && !window_fits(w as u128, w as u128, n) {
        w -= 1;
    }
    while window_fits((w + 1) as u128, (w + 1) as u128, n) {
        w += 1;
    }
    w
}

fn window_fits(num: u128, den: u128, n: u64) -> bool {
    match num.checked_mul(den).and_then(|p| p.checked_mul(2)) {
        Some(p) => p < n as u128,
        None => false,
    }
}

fn check_window(num: u128, den: u128, n: u64) -> Result<(), MetricError> {
    if window_fits(num, den, n) {
        Ok(())
    } else {
        Err(MetricError::ScaleTooLargeForModulus { num_bound: num, den_bound: den, modulus: n })
    }
}

/// Numerator/denominator bounds carried through ring operations.
///
/// `a/b + c/d = (ad + bc)/(bd)` and `(a/b)(c/d) = ac/(bd)`, so bounds
/// compose without looking at the values. `None` means a bound overflowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HeightBounds {
    pub num: u128,
    pub den: u128,
}

impl HeightBounds {
    pub fn of_scale(s: &LocalityScale) -> Self {
        HeightBounds { num: s.height as u128, den: s.height as u128 }
    }

    pub fn of_rational(r: &BoundedRational) -> Self {
        HeightBounds { num: r.numer().unsigned_abs() as u128, den: r.denom() as u128 }
    }

    pub fn add(&self, other: &Self) -> Option<Self> {
        let num = self.num.checked_mul(other.den)?.checked_add(other.num.checked_mul(self.den)?)?;
        let den = self.den.checked_mul(other.den)?;
        Some(HeightBounds { num, den })
    }

    pub fn mul(&self, other: &Self) -> Option<Self> {
        Some(HeightBounds { num: self.num.checked_mul(other.num)?, den: self.den.checked_mul(other.den)? })
    }

    pub fn height(&self) -> u128 {
        self.num.max(self.den)
    }

    pub fn fits(&self, q: &Modulus) -> bool {
        window_fits(self.num, self.den, q.value())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SortOp {
    Add,
    Mul,
}

/// Sort containing every `op(x, y)` with `x, y` in `S_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LevelBound {
    pub level: u64,
    /// `l^level`.
    pub height_bound: u64,
    /// Exact bound on `|k1|/k2` of the result: `2m` for sums, `m^2` for products.
    pub ratio_bound: u64,
    /// Exact bound on the heights of the result before rounding to a power of `l`.
    pub raw_height: u128,
}

/// Smallest level whose sort is guaranteed to hold `op` applied to two
/// elements of `S_m`.
///
/// Sums have numerators up to `2L^2`, products up to `L^2`; the level is
/// the least power of `l` dominating that height, raised if necessary to
/// cover the ratio bound.
pub fn sort_level_for(s: &LocalityScale, op: SortOp) -> Result<LevelBound, MetricError> {
    let b = HeightBounds::of_scale(s);
    let (raw, ratio) = match op {
        SortOp::Add => (b.add(&b), s.m.checked_mul(2)),
        SortOp::Mul => (b.mul(&b), s.m.checked_mul(s.m)),
    };
    let overflow = MetricError::OverflowAtRequestedLevel { l: s.l, level: s.m.saturating_mul(2) };
    let raw = raw.ok_or(overflow.clone())?.height();
    let ratio = ratio.ok_or(overflow.clone())?;
    let mut level = 1u64;
    let mut power = s.l as u128;
    while power < raw {
        power = power.checked_mul(s.l as u128).ok_or(overflow.clone())?;
        level += 1;
    }
    let level = level.max(ratio);
    let height_bound = checked_pow(s.l, level).ok_or(MetricError::OverflowAtRequestedLevel { l: s.l, level })?;
    Ok(LevelBound { level, height_bound, ratio_bound: ratio, raw_height: raw })
}

/// Encode an unbounded rational; same map as [`encode`].
pub fn encode_q(x: &Q, q: &Modulus) -> Result<Residue, MetricError> {
    let n = BigInt::from(q.value());
    let reduce = |v: &BigInt| v.mod_floor(&n).to_u64().expect("reduced below a u64 modulus");
    let den = q.residue(reduce(x.denom()));
    let inv = den.inv().map_err(|_| MetricError::DenominatorNotUnit {
        denominator: x.denom().to_u64().unwrap_or(u64::MAX),
        modulus: q.value(),
    })?;
    Ok(q.residue(reduce(x.numer())).mul(&inv)?)
}

/// `k1 * k2^-1 mod q`.
pub fn encode(r: &BoundedRational, q: &Modulus) -> Result<Residue, MetricError> {
    let den = q.residue(r.denom());
    let inv = den.inv().map_err(|_| MetricError::DenominatorNotUnit { denominator: r.denom(), modulus: q.value() })?;
    Ok(q.reduce(r.numer() as i128).mul(&inv)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecodeOutcome {
    Local(BoundedRational),
    NotLocal,
}

impl DecodeOutcome {
    pub fn local(self) -> Option<BoundedRational> {
        match self {
            DecodeOutcome::Local(r) => Some(r),
            DecodeOutcome::NotLocal => None,
        }
    }

    pub fn is_local(&self) -> bool {
        matches!(self, DecodeOutcome::Local(_))
    }
}

/// Rational reconstruction with separate numerator and denominator bounds.
///
/// Runs the extended Euclidean remainder sequence on `(n, z)` and stops at
/// the first remainder `<= num_bound`; the cofactor at that step is the
/// denominator. Requires `2 * num_bound * den_bound < n`, under which any
/// representation within the bounds is unique.
pub fn reconstruct(z: &Residue, num_bound: u128, den_bound: u128) -> Result<DecodeOutcome, MetricError> {
    let n = z.modulus().value();
    check_window(num_bound, den_bound, n)?;
    let (mut r0, mut r1) = (n as i128, z.value() as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 as u128 > num_bound {
        let quot = r0 / r1;
        (r0, r1) = (r1, r0 - quot * r1);
        (t0, t1) = (t1, t0 - quot * t1);
    }
    let k2 = t1.unsigned_abs();
    if k2 == 0 || k2 > den_bound || r1.gcd(&t1) != 1 || (n as i128).gcd(&t1) != 1 {
        return Ok(DecodeOutcome::NotLocal);
    }
    let k1 = if t1 < 0 { -r1 } else { r1 };
    match BoundedRational::from_i128(k1, k2 as i128) {
        Ok(r) => Ok(DecodeOutcome::Local(r)),
        Err(_) => Ok(DecodeOutcome::NotLocal),
    }
}

/// The minimal pair of `z` with heights at most `L`, if any.
pub fn decode(z: &Residue, s: &LocalityScale) -> Result<DecodeOutcome, MetricError> {
    reconstruct(z, s.height as u128, s.height as u128)
}

/// Membership in `S_m`: local at height `L` and `|k1|/k2 <= m`.
pub fn in_sort(z: &Residue, s: &LocalityScale) -> Result<bool, MetricError> {
    Ok(match decode(z, s)? {
        DecodeOutcome::Local(r) => r.ratio_at_most(s.m),
        DecodeOutcome::NotLocal => false,
    })
}

/// `|k1| / k2` of the minimal pair.
pub fn norm(z: &Residue, s: &LocalityScale) -> Result<BoundedRational, MetricError> {
    decode(z, s)?.local().map(|r| r.abs()).ok_or(MetricError::NotLocal(z.value()))
}

/// `||z1 - z2||`.
pub fn dist(z1: &Residue, z2: &Residue, s: &LocalityScale) -> Result<BoundedRational, MetricError> {
    norm(&z1.sub(z2)?, s)
}

/// Ring-mode decoding: project `Z_n -> F_q` first.
pub fn decode_ring(k: &Residue, q: &Modulus, s: &LocalityScale) -> Result<DecodeOutcome, MetricError> {
    decode(&project_ring_to_field(k, q)?, s)
}

/// The pulled-back pseudo-metric `d_K(x, y) = d_F(s(x), s(y))`.
pub fn dist_ring(x: &Residue, y: &Residue, q: &Modulus, s: &LocalityScale) -> Result<BoundedRational, MetricError> {
    dist(&project_ring_to_field(x, q)?, &project_ring_to_field(y, q)?, s)
}

/// One point of a sort: the rational and its encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SortElement {
    pub rational: BoundedRational,
    pub residue: Residue,
}

/// Reduced rationals of `S_m`, in ascending order, without encoding.
pub fn sort_rationals(s: &LocalityScale, budget: Option<usize>) -> Result<Vec<BoundedRational>, MetricError> {
    rationals_within(s.height, s.m, budget)
}

/// Reduced `k1/k2` with `|k1|, k2 <= height` and `|k1|/k2 <= ratio`, ascending.
pub fn rationals_within(height: u64, ratio: u64, budget: Option<usize>) -> Result<Vec<BoundedRational>, MetricError> {
    let mut out = Vec::new();
    for k2 in 1..=height {
        let reach = height.min(ratio.saturating_mul(k2));
        for a in 0..=reach {
            if a.gcd(&k2) != 1 {
                continue;
            }
            let a = a as i64;
            let candidates: &[i64] = if a == 0 { &[0] } else { &[a, -a] };
            for &k1 in candidates {
                out.push(BoundedRational::new(k1, k2 as i64).expect("reduced pair fits"));
                if budget.is_some_and(|b| out.len() > b) {
                    return Err(MetricError::EnumerationBudgetExceeded(budget.unwrap_or(0)));
                }
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Every element of `S_m(F_q)`, in ascending rational order.
pub fn enumerate_sort(s: &LocalityScale, q: &Modulus, budget: Option<usize>) -> Result<Vec<SortElement>, MetricError> {
    s.check_window(q)?;
    sort_rationals(s, budget)?
        .into_iter()
        .map(|r| Ok(SortElement { rational: r, residue: encode(&r, q)? }))
        .collect()
}
