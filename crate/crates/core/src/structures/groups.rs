use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Zero};
use rand::Rng;

use super::{GroupFamily, GroupKind, HeightBound, RationalMatrix, StructureError};
use crate::rational::{GaussianRational, Q};
use crate::residue::{Matrix, Scalar};

/// Tangent of half a rotation angle, `t = a/b`, reduced with `b >= 0`;
/// `b = 0` is the half-turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HalfAngle {
    a: i64,
    b: i64,
}

impl HalfAngle {
    pub fn new(a: i64, b: i64) -> Result<Self, StructureError> {
        if a == 0 && b == 0 {
            return Err(StructureError::DegenerateParams("half-angle 0/0".into()));
        }
        if b == 0 {
            return Ok(HalfAngle { a: 1, b: 0 });
        }
        let g = a.gcd(&b);
        let (a, b) = if b < 0 { (-a / g, -b / g) } else { (a / g, b / g) };
        Ok(HalfAngle { a, b })
    }

    pub(crate) fn parts(&self) -> (i64, i64) {
        (self.a, self.b)
    }

    pub fn half_turn() -> Self {
        HalfAngle { a: 1, b: 0 }
    }

    /// `(cos, sin) = ((b^2 - a^2), 2ab) / (a^2 + b^2)`.
    pub fn cos_sin(&self) -> (Q, Q) {
        let (a, b) = (self.a as i128, self.b as i128);
        let s = BigInt::from(a * a + b * b);
        (Q::new(BigInt::from(b * b - a * a), s.clone()), Q::new(BigInt::from(2 * a * b), s))
    }

    /// Reduced common denominator of `cos` and `sin`.
    pub fn denominator(&self) -> u64 {
        let (a, b) = (self.a as i128, self.b as i128);
        let s = a * a + b * b;
        let g = s.gcd(&(b * b - a * a)).gcd(&(2 * a * b));
        (s / g) as u64
    }
}

/// Seed data for [`generate_rational_point`].
#[derive(Debug, Clone, PartialEq)]
pub enum PointParams {
    /// One half-angle per coordinate plane `(i, j)`, `i < j`, in
    /// lexicographic order; the point is the ordered product.
    Rotations(Vec<HalfAngle>),
    /// Strict upper triangle of a skew-symmetric `A`, row by row; the point
    /// is `(I - A)(I + A)^-1`.
    Cayley(Vec<Q>),
    /// One exact unit quaternion `(a, b, c, d)` per block `(k, k+1)`; each
    /// block is `[[a + bi, -c + di], [c + di, a - bi]]`.
    Quaternions(Vec<[Q; 4]>),
    /// `[[1, a], [0, 1]] * [[1, 0], [b, 1]]`.
    Sl2 { a: GaussianRational, b: GaussianRational },
}

pub(crate) fn planes(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

fn rotation(n: usize, (i, j): (usize, usize), t: &HalfAngle) -> Matrix<Q> {
    let (c, s) = t.cos_sin();
    Matrix::from_fn(n, |r, k| match (r, k) {
        _ if (r, k) == (i, i) || (r, k) == (j, j) => c.clone(),
        _ if (r, k) == (i, j) => -s.clone(),
        _ if (r, k) == (j, i) => s.clone(),
        _ if r == k => Q::one(),
        _ => Q::zero(),
    })
}

pub(crate) fn rotation_product(n: usize, angles: &[HalfAngle]) -> Matrix<Q> {
    let mut acc = Matrix::identity(n, &Q::zero());
    for (p, t) in planes(n).into_iter().zip(angles) {
        acc = acc.mul(&rotation(n, p, t)).expect("same dimension");
    }
    acc
}

fn su2_block(n: usize, k: usize, quat: &[Q; 4]) -> Matrix<GaussianRational> {
    let [a, b, c, d] = quat;
    let alpha = GaussianRational::new(a.clone(), b.clone());
    let beta = GaussianRational::new(c.clone(), d.clone());
    let one = GaussianRational::real(Q::one());
    Matrix::from_fn(n, |r, col| match (r.wrapping_sub(k), col.wrapping_sub(k)) {
        (0, 0) => alpha.clone(),
        (0, 1) => beta.conj().negate(),
        (1, 0) => beta.clone(),
        (1, 1) => alpha.conj(),
        _ if r == col => one.clone(),
        _ => one.zero_like(),
    })
}

pub(crate) fn block_product(n: usize, quats: &[[Q; 4]]) -> Matrix<GaussianRational> {
    let mut acc = Matrix::identity(n, &GaussianRational::real(Q::zero()));
    for (k, quat) in quats.iter().enumerate() {
        acc = acc.mul(&su2_block(n, k, quat)).expect("same dimension");
    }
    acc
}

/// Inverse stereographic projection `R^3 -> S^3` from `(-1, 0, 0, 0)`:
/// `u -> ((1 - |u|^2), 2u) / (1 + |u|^2)`.
pub fn quaternion_from_stereographic(u: &[Q; 3]) -> [Q; 4] {
    let s: Q = u.iter().map(|x| x * x).sum();
    let den = Q::one() + &s;
    let two = Q::from_integer(BigInt::from(2));
    [(Q::one() - &s) / &den, &two * &u[0] / &den, &two * &u[1] / &den, &two * &u[2] / &den]
}

/// Cayley transform `(I - A)(I + A)^-1` of the skew-symmetric matrix with
/// the given strict upper triangle.
pub fn cayley(n: usize, upper: &[Q]) -> Result<Matrix<Q>, StructureError> {
    let ps = planes(n);
    if upper.len() != ps.len() {
        return Err(StructureError::DegenerateParams(format!(
            "Cayley transform in dimension {n} needs {} entries, got {}",
            ps.len(),
            upper.len()
        )));
    }
    let mut a = vec![Q::zero(); n * n];
    for ((i, j), x) in ps.into_iter().zip(upper) {
        a[i * n + j] = x.clone();
        a[j * n + i] = -x.clone();
    }
    let id = Matrix::identity(n, &Q::zero());
    let minus = Matrix::from_fn(n, |i, j| id.get(i, j) - &a[i * n + j]);
    let plus = Matrix::from_fn(n, |i, j| id.get(i, j) + &a[i * n + j]);
    let inv = invert(&plus).ok_or_else(|| StructureError::DegenerateParams("I + A is singular".into()))?;
    Ok(minus.mul(&inv)?)
}

/// Gauss-Jordan inverse over `Q`.
fn invert(m: &Matrix<Q>) -> Option<Matrix<Q>> {
    let n = m.dim();
    let mut a: Vec<Vec<Q>> = m.rows().map(|r| r.to_vec()).collect();
    let mut inv: Vec<Vec<Q>> = (0..n).map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !Zero::is_zero(&a[r][col]))?;
        a.swap(col, p);
        inv.swap(col, p);
        let piv = a[col][col].recip();
        for j in 0..n {
            a[col][j] = &a[col][j] * &piv;
            inv[col][j] = &inv[col][j] * &piv;
        }
        for r in 0..n {
            if r != col && !Zero::is_zero(&a[r][col]) {
                let f = a[r][col].clone();
                for j in 0..n {
                    a[r][j] = &a[r][j] - &f * &a[col][j];
                    inv[r][j] = &inv[r][j] - &f * &inv[col][j];
                }
            }
        }
    }
    Matrix::from_rows(inv).ok()
}

/// The defining equations of `family`, checked exactly over any scalar ring.
pub(crate) fn satisfies<T: Scalar>(family: &GroupFamily, m: &Matrix<T>) -> bool {
    if m.dim() != family.n() {
        return false;
    }
    let det_one = matches!(m.det(), Ok(d) if d == d.one_like());
    let orthogonal = !family.is_compact() || m.conj_transpose().mul(m).is_ok_and(|p| p.is_identity());
    det_one && orthogonal
}

/// `M^T M = I, det = 1` (SO), `M* M = I, det = 1` (SU) or `det = 1` (SL2).
pub fn verify_membership(family: &GroupFamily, m: &RationalMatrix) -> bool {
    match (family.kind(), m) {
        (GroupKind::So, RationalMatrix::Real(a)) => satisfies(family, a),
        (GroupKind::Su | GroupKind::Sl2Gaussian, RationalMatrix::Gaussian(a)) => satisfies(family, a),
        _ => false,
    }
}

pub fn generate_rational_point(
    family: &GroupFamily,
    params: &PointParams,
    bound: Option<HeightBound>,
) -> Result<RationalMatrix, StructureError> {
    let n = family.n();
    let degenerate = |msg: String| Err(StructureError::DegenerateParams(msg));
    let m = match (family.kind(), params) {
        (GroupKind::So, PointParams::Rotations(ts)) => {
            if ts.len() != n * (n - 1) / 2 {
                return degenerate(format!("{family} needs {} half-angles, got {}", n * (n - 1) / 2, ts.len()));
            }
            RationalMatrix::Real(rotation_product(n, ts))
        }
        (GroupKind::So, PointParams::Cayley(upper)) => RationalMatrix::Real(cayley(n, upper)?),
        (GroupKind::Su, PointParams::Quaternions(qs)) => {
            if qs.len() != n - 1 {
                return degenerate(format!("{family} needs {} quaternions, got {}", n - 1, qs.len()));
            }
            if let Some(bad) = qs.iter().find(|q| q.iter().map(|x| x * x).sum::<Q>() != Q::one()) {
                return degenerate(format!("quaternion {bad:?} is not a unit"));
            }
            RationalMatrix::Gaussian(block_product(n, qs))
        }
        (GroupKind::Sl2Gaussian, PointParams::Sl2 { a, b }) => RationalMatrix::Gaussian(sl2(a, b)),
        _ => return degenerate(format!("parameters do not match {family}")),
    };
    if !verify_membership(family, &m) {
        return degenerate(format!("generated matrix is not in {family}"));
    }
    if let Some(h) = bound {
        m.check_height(h)?;
    }
    Ok(m)
}

fn sl2(a: &GaussianRational, b: &GaussianRational) -> Matrix<GaussianRational> {
    let one = a.one_like();
    Matrix::from_rows(vec![vec![one.plus(&a.times(b)), a.clone()], vec![b.clone(), one]]).expect("2x2")
}

/// All half-angles whose rotation has denominator at most `budget`.
pub(crate) fn half_angles_up_to(budget: u64) -> Vec<(HalfAngle, u64)> {
    // Denominators are (a^2 + b^2) or half of it, so a^2 + b^2 <= 2 * budget.
    let r = (2 * budget as i64).sqrt();
    let mut out = Vec::new();
    for b in 0..=r {
        for a in -r..=r {
            if (a == 0 && b == 0) || a.gcd(&b) != 1 || (b == 0 && a != 1) {
                continue;
            }
            let t = HalfAngle { a, b };
            let d = t.denominator();
            if d <= budget {
                out.push((t, d));
            }
        }
    }
    out
}

/// Primitive integer points `(x0, x1, x2, x3, d)` with `sum x_i^2 = d^2` and
/// `d <= budget`: the rational unit quaternions `x / d`.
pub(crate) fn unit_quaternions_up_to(budget: u64, cap: usize) -> Result<Vec<([i64; 4], i64)>, StructureError> {
    let mut out = Vec::new();
    for d in 1..=budget as i64 {
        let dd = d * d;
        for x0 in -d..=d {
            let r0 = dd - x0 * x0;
            let b1 = r0.sqrt();
            for x1 in -b1..=b1 {
                let r1 = r0 - x1 * x1;
                let b2 = r1.sqrt();
                for x2 in -b2..=b2 {
                    let r2 = r1 - x2 * x2;
                    let x3 = r2.sqrt();
                    if x3 * x3 != r2 {
                        continue;
                    }
                    for x3 in if x3 == 0 { vec![0] } else { vec![x3, -x3] } {
                        if d.gcd(&x0).gcd(&x1).gcd(&x2).gcd(&x3) != 1 {
                            continue;
                        }
                        if out.len() >= cap {
                            return Err(StructureError::EnumerationBudgetExceeded(cap));
                        }
                        out.push(([x0, x1, x2, x3], d));
                    }
                }
            }
        }
    }
    Ok(out)
}

pub(crate) fn quaternions_up_to(budget: u64, cap: usize) -> Result<Vec<([Q; 4], u64)>, StructureError> {
    Ok(unit_quaternions_up_to(budget, cap)?
        .into_iter()
        .map(|(x, d)| (x.map(|v| Q::new(BigInt::from(v), BigInt::from(d))), d as u64))
        .collect())
}

fn random_half_angle<R: Rng>(budget: u64, rng: &mut R) -> (HalfAngle, u64) {
    let r = (2 * budget as i64).sqrt().max(1);
    loop {
        let (a, b) = (rng.gen_range(-r..=r), rng.gen_range(0..=r));
        if let Ok(t) = HalfAngle::new(a, b) {
            let d = t.denominator();
            if d <= budget {
                return (t, d);
            }
        }
    }
}

/// A random rational unit quaternion with denominator at most `budget`,
/// from an integer stereographic parameter `u / w`.
fn random_quaternion<R: Rng>(budget: u64, rng: &mut R) -> ([Q; 4], u64) {
    let r = (budget as i64).sqrt() + 1;
    loop {
        let w: i64 = rng.gen_range(0..=r);
        let u: [i64; 3] = [rng.gen_range(-r..=r), rng.gen_range(-r..=r), rng.gen_range(-r..=r)];
        let uu: i64 = u.iter().map(|x| x * x).sum();
        let den = w * w + uu;
        if den == 0 {
            continue;
        }
        let nums = [w * w - uu, 2 * w * u[0], 2 * w * u[1], 2 * w * u[2]];
        let g = nums.iter().fold(den, |g, x| g.gcd(x));
        let d = (den / g) as u64;
        if d <= budget {
            let c = |x: i64| Q::new(BigInt::from(x / g), BigInt::from(den / g));
            return ([c(nums[0]), c(nums[1]), c(nums[2]), c(nums[3])], d);
        }
    }
}

/// `floor(x^(1/k))`.
fn kth_root(x: u64, k: usize) -> u64 {
    (x as u128).nth_root(k as u32) as u64
}

/// A random point of `family` with common height at most `h`.
///
/// Compact families split the height budget across factors so the product
/// of per-factor denominators stays within `h`.
pub fn sample_point<R: Rng>(family: &GroupFamily, h: HeightBound, rng: &mut R) -> RationalMatrix {
    let n = family.n();
    match family.kind() {
        GroupKind::So => {
            let count = n * (n - 1) / 2;
            let mut remaining = h.get();
            let angles: Vec<HalfAngle> = (0..count)
                .map(|k| {
                    let (t, d) = random_half_angle(kth_root(remaining, count - k).max(1), rng);
                    remaining /= d;
                    t
                })
                .collect();
            RationalMatrix::Real(rotation_product(n, &angles))
        }
        GroupKind::Su => {
            let count = n - 1;
            let mut remaining = h.get();
            let quats: Vec<[Q; 4]> = (0..count)
                .map(|k| {
                    let (quat, d) = random_quaternion(kth_root(remaining, count - k).max(1), rng);
                    remaining /= d;
                    quat
                })
                .collect();
            RationalMatrix::Gaussian(block_product(n, &quats))
        }
        GroupKind::Sl2Gaussian => {
            let r = (h.get() / 3).sqrt().max(1) as i64;
            for _ in 0..10_000 {
                let mut g = || {
                    let d = rng.gen_range(1..=r);
                    GaussianRational::new(
                        Q::new(BigInt::from(rng.gen_range(-r..=r)), BigInt::from(d)),
                        Q::new(BigInt::from(rng.gen_range(-r..=r)), BigInt::from(d)),
                    )
                };
                let (a, b) = (g(), g());
                let m = RationalMatrix::Gaussian(sl2(&a, &b));
                if m.check_height(h).is_ok() {
                    return m;
                }
            }
            family.identity()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q_frac, q_int};
    use rand::SeedableRng;

    fn gq(re: i64, im: i64) -> GaussianRational {
        GaussianRational::new(q_int(re), q_int(im))
    }

    #[test]
    fn so2_from_half_angle() {
        let fam = GroupFamily::so(2).unwrap();
        let m = generate_rational_point(&fam, &PointParams::Rotations(vec![HalfAngle::new(1, 2).unwrap()]), None).unwrap();
        let expect = Matrix::from_rows(vec![vec![q_frac(3, 5), q_frac(-4, 5)], vec![q_frac(4, 5), q_frac(3, 5)]]).unwrap();
        assert_eq!(m, RationalMatrix::Real(expect.clone()));
        assert!(expect.transpose().mul(&expect).unwrap().is_identity());
        assert_eq!(expect.det().unwrap(), q_int(1));
    }

    #[test]
    fn su2_examples() {
        let fam = GroupFamily::su(2).unwrap();
        let quat = |a, b, c, d| PointParams::Quaternions(vec![[q_int(a), q_int(b), q_int(c), q_int(d)]]);
        assert_eq!(generate_rational_point(&fam, &quat(1, 0, 0, 0), None).unwrap(), fam.identity());
        let m = generate_rational_point(&fam, &quat(0, 1, 0, 0), None).unwrap();
        let expect = Matrix::from_rows(vec![vec![gq(0, 1), gq(0, 0)], vec![gq(0, 0), gq(0, -1)]]).unwrap();
        assert_eq!(m, RationalMatrix::Gaussian(expect.clone()));
        assert!(expect.conj_transpose().mul(&expect).unwrap().is_identity());
        assert_eq!(expect.det().unwrap(), gq(1, 0));
        assert!(matches!(
            generate_rational_point(&fam, &quat(1, 1, 0, 0), None),
            Err(StructureError::DegenerateParams(_))
        ));
    }

    #[test]
    fn stereographic_points_are_units() {
        for u in [[q_frac(1, 2), q_frac(-1, 3), q_int(2)], [q_int(0), q_int(0), q_int(0)], [q_frac(7, 5), q_int(1), q_frac(1, 9)]] {
            let quat = quaternion_from_stereographic(&u);
            assert_eq!(quat.iter().map(|x| x * x).sum::<Q>(), q_int(1));
        }
    }

    #[test]
    fn su3_block_product() {
        let fam = GroupFamily::su(3).unwrap();
        let qs = vec![
            quaternion_from_stereographic(&[q_frac(1, 2), q_int(0), q_frac(1, 3)]),
            quaternion_from_stereographic(&[q_int(1), q_frac(-2, 3), q_int(0)]),
        ];
        let m = generate_rational_point(&fam, &PointParams::Quaternions(qs), None).unwrap();
        assert!(verify_membership(&fam, &m));
    }

    #[test]
    fn cayley_gives_rotations() {
        let fam = GroupFamily::so(3).unwrap();
        let m = generate_rational_point(&fam, &PointParams::Cayley(vec![q_frac(1, 2), q_int(-1), q_frac(2, 3)]), None).unwrap();
        assert!(verify_membership(&fam, &m));
        let m = generate_rational_point(&fam, &PointParams::Cayley(vec![q_int(0); 3]), None).unwrap();
        assert_eq!(m, fam.identity());
        assert!(generate_rational_point(&fam, &PointParams::Cayley(vec![q_int(1)]), None).is_err());
    }

    #[test]
    fn sl2_product_form() {
        let fam = GroupFamily::sl2_gaussian();
        let (a, b) = (gq(1, 2), GaussianRational::new(q_frac(1, 3), q_int(-1)));
        let m = generate_rational_point(&fam, &PointParams::Sl2 { a: a.clone(), b: b.clone() }, None).unwrap();
        let upper = Matrix::from_rows(vec![vec![gq(1, 0), a], vec![gq(0, 0), gq(1, 0)]]).unwrap();
        let lower = Matrix::from_rows(vec![vec![gq(1, 0), gq(0, 0)], vec![b, gq(1, 0)]]).unwrap();
        assert_eq!(m, RationalMatrix::Gaussian(upper.mul(&lower).unwrap()));
    }

    #[test]
    fn height_bound_enforced() {
        let fam = GroupFamily::so(2).unwrap();
        let p = PointParams::Rotations(vec![HalfAngle::new(1, 2).unwrap()]);
        assert!(matches!(
            generate_rational_point(&fam, &p, Some(HeightBound::new(4).unwrap())),
            Err(StructureError::HeightExceeded { .. })
        ));
        assert!(generate_rational_point(&fam, &p, Some(HeightBound::new(5).unwrap())).is_ok());
    }

    #[test]
    fn mismatched_params() {
        let p = PointParams::Rotations(vec![HalfAngle::half_turn()]);
        assert!(generate_rational_point(&GroupFamily::so(3).unwrap(), &p, None).is_err());
        assert!(generate_rational_point(&GroupFamily::su(2).unwrap(), &p, None).is_err());
        assert!(HalfAngle::new(0, 0).is_err());
    }

    #[test]
    fn half_angle_denominators_match_matrices() {
        for (t, d) in half_angles_up_to(50) {
            let m = RationalMatrix::Real(rotation_product(2, &[t]));
            assert_eq!(m.common_denominator(), BigInt::from(d), "{t:?}");
        }
        // Height 1: the four quarter turns.
        assert_eq!(half_angles_up_to(1).len(), 4);
    }

    #[test]
    fn quaternion_enumeration_small() {
        // Denominator 1: the 8 units +-1, +-i, +-j, +-k.
        assert_eq!(quaternions_up_to(1, 1000).unwrap().len(), 8);
        for (quat, d) in quaternions_up_to(5, 10_000).unwrap() {
            assert_eq!(quat.iter().map(|x| x * x).sum::<Q>(), q_int(1));
            assert!(d <= 5);
        }
        assert!(quaternions_up_to(5, 10).is_err());
    }

    #[test]
    fn samples_are_members_within_height() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for fam in [
            GroupFamily::so(2).unwrap(),
            GroupFamily::so(3).unwrap(),
            GroupFamily::so(4).unwrap(),
            GroupFamily::su(2).unwrap(),
            GroupFamily::su(3).unwrap(),
            GroupFamily::sl2_gaussian(),
        ] {
            for h in [1, 10, 1000] {
                let h = HeightBound::new(h).unwrap();
                for _ in 0..10 {
                    let m = sample_point(&fam, h, &mut rng);
                    assert!(verify_membership(&fam, &m), "{fam} {m}");
                    assert!(m.check_height(h).is_ok(), "{fam} {m}");
                }
            }
        }
    }
}
