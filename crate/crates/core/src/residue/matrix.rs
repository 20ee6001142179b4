use std::fmt;

use super::{Residue, ResidueError};

/// Commutative ring element usable as a matrix entry.
///
/// Implemented for residues, Gaussian residues and their exact rational
/// counterparts, so the same matrix code serves both sides of an
/// encode/decode comparison.
pub trait Scalar: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn is_zero(&self) -> bool;
    fn try_inv(&self) -> Option<Self>;

    fn negate(&self) -> Self {
        self.zero_like().minus(self)
    }

    /// Involution used by the conjugate transpose; identity on real types.
    fn conj(&self) -> Self {
        self.clone()
    }

    /// Modulus of the entry, for residue types.
    fn modulus_value(&self) -> Option<u64> {
        None
    }
}

impl Scalar for Residue {
    fn zero_like(&self) -> Self {
        self.modulus.zero()
    }
    fn one_like(&self) -> Self {
        self.modulus.one()
    }
    fn plus(&self, other: &Self) -> Self {
        self.add_unchecked(other)
    }
    fn minus(&self, other: &Self) -> Self {
        self.sub_unchecked(other)
    }
    fn times(&self, other: &Self) -> Self {
        self.mul_unchecked(other)
    }
    fn is_zero(&self) -> bool {
        self.value == 0
    }
    fn try_inv(&self) -> Option<Self> {
        self.inv().ok()
    }
    fn modulus_value(&self) -> Option<u64> {
        Some(self.modulus.value)
    }
}

/// Square matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    entries: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, ResidueError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(ResidueError::DimensionMismatch(n, row.len()));
            }
            entries.extend(row);
        }
        let m = Matrix { n, entries };
        m.common_modulus()?;
        Ok(m)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        Matrix { n, entries }
    }

    /// Identity matrix whose entries share the ring of `sample`.
    pub fn identity(n: usize, sample: &T) -> Self {
        let (zero, one) = (sample.zero_like(), sample.one_like());
        Self::from_fn(n, |i, j| if i == j { one.clone() } else { zero.clone() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.entries.chunks(self.n.max(1))
    }

    pub fn map<U: Scalar>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { n: self.n, entries: self.entries.iter().map(f).collect() }
    }

    pub fn try_map<U: Scalar, E>(&self, f: impl FnMut(&T) -> Result<U, E>) -> Result<Matrix<U>, E> {
        let entries = self.entries.iter().map(f).collect::<Result<Vec<_>, E>>()?;
        Ok(Matrix { n: self.n, entries })
    }

    fn common_modulus(&self) -> Result<Option<u64>, ResidueError> {
        let mut seen = None;
        for e in &self.entries {
            match (seen, e.modulus_value()) {
                (None, m) => seen = m,
                (Some(a), Some(b)) if a != b => return Err(ResidueError::ModulusMismatch(a, b)),
                _ => {}
            }
        }
        Ok(seen)
    }

    fn check_compatible(&self, other: &Self) -> Result<(), ResidueError> {
        if self.n != other.n {
            return Err(ResidueError::DimensionMismatch(self.n, other.n));
        }
        if let (Some(a), Some(b)) = (self.common_modulus()?, other.common_modulus()?) {
            if a != b {
                return Err(ResidueError::ModulusMismatch(a, b));
            }
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, ResidueError> {
        self.check_compatible(other)?;
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = self.get(i, 0).times(other.get(0, j));
                for k in 1..n {
                    acc = acc.plus(&self.get(i, k).times(other.get(k, j)));
                }
                entries.push(acc);
            }
        }
        Ok(Matrix { n, entries })
    }

    pub fn add(&self, other: &Self) -> Result<Self, ResidueError> {
        self.check_compatible(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.plus(b)).collect();
        Ok(Matrix { n: self.n, entries })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| {
                let e = self.get(i, j);
                if i == j {
                    *e == e.one_like()
                } else {
                    e.is_zero()
                }
            })
        })
    }

    /// Determinant: cofactor expansion up to 4x4, unit-pivot elimination
    /// beyond.
    ///
    /// In a ring with zero divisors elimination can stall on a column with
    /// no unit entry; that surfaces as [`ResidueError::SingularPivot`].
    pub fn det(&self) -> Result<T, ResidueError> {
        self.common_modulus()?;
        if self.n == 0 {
            return Err(ResidueError::DimensionMismatch(0, 0));
        }
        if self.n <= 4 {
            let idx: Vec<usize> = (0..self.n).collect();
            return Ok(self.expand(0, &idx));
        }
        self.det_elimination()
    }

    fn expand(&self, row: usize, cols: &[usize]) -> T {
        if cols.len() == 1 {
            return self.get(row, cols[0]).clone();
        }
        let mut acc = self.get(0, 0).zero_like();
        let mut rest = Vec::with_capacity(cols.len() - 1);
        for (pos, &c) in cols.iter().enumerate() {
            let e = self.get(row, c);
            if e.is_zero() {
                continue;
            }
            rest.clear();
            rest.extend(cols.iter().copied().filter(|&x| x != c));
            let term = e.times(&self.expand(row + 1, &rest));
            acc = if pos % 2 == 0 { acc.plus(&term) } else { acc.minus(&term) };
        }
        acc
    }

    fn det_elimination(&self) -> Result<T, ResidueError> {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut det = self.get(0, 0).one_like();
        for col in 0..n {
            let mut pivot = None;
            let mut all_zero = true;
            for r in col..n {
                let e = &a[r * n + col];
                if !e.is_zero() {
                    all_zero = false;
                    if let Some(inv) = e.try_inv() {
                        pivot = Some((r, inv));
                        break;
                    }
                }
            }
            if all_zero {
                return Ok(det.zero_like());
            }
            let (r, inv) = pivot.ok_or(ResidueError::SingularPivot(col))?;
            if r != col {
                for k in 0..n {
                    a.swap(r * n + k, col * n + k);
                }
                det = det.negate();
            }
            det = det.times(&a[col * n + col]);
            for r2 in col + 1..n {
                let factor = a[r2 * n + col].times(&inv);
                if factor.is_zero() {
                    continue;
                }
                for k in col..n {
                    let sub = factor.times(&a[col * n + k]);
                    a[r2 * n + k] = a[r2 * n + k].minus(&sub);
                }
            }
        }
        Ok(det)
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[T]> = self.entries.chunks(self.n.max(1)).collect();
        f.debug_list().entries(rows).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::Modulus;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat(q: &Modulus, rows: &[&[i128]]) -> Matrix<Residue> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| q.reduce(v)).collect()).collect())
            .unwrap()
    }

    fn random(q: &Modulus, n: usize, rng: &mut ChaCha8Rng) -> Matrix<Residue> {
        Matrix::from_fn(n, |_, _| q.residue(rng.gen_range(0..q.value())))
    }

    #[test]
    fn identity_and_small_determinants() {
        let q = Modulus::field(257).unwrap();
        let m = mat(&q, &[&[1, 2], &[3, 4]]);
        let id = Matrix::identity(2, &q.one());
        assert_eq!(id.mul(&m).unwrap(), m);
        assert_eq!(id.det().unwrap(), q.one());
        assert_eq!(mat(&q, &[&[0, 1], &[-1, 0]]).det().unwrap(), q.one());
        assert_eq!(m.det().unwrap(), q.reduce(-2));
    }

    #[test]
    fn det_is_multiplicative_3x3() {
        let q = Modulus::field(257).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let a = random(&q, 3, &mut rng);
            let b = random(&q, 3, &mut rng);
            let lhs = a.mul(&b).unwrap().det().unwrap();
            let rhs = a.det().unwrap().mul(&b.det().unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn elimination_agrees_with_expansion() {
        let q = Modulus::field(1009).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=4 {
            for _ in 0..50 {
                let a = random(&q, n, &mut rng);
                assert_eq!(a.det().unwrap(), a.det_elimination().unwrap());
            }
        }
        for _ in 0..20 {
            let a = random(&q, 6, &mut rng);
            let b = random(&q, 6, &mut rng);
            let lhs = a.mul(&b).unwrap().det().unwrap();
            let rhs = a.det().unwrap().mul(&b.det().unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn ring_elimination_can_stall() {
        let z = Modulus::ring(4).unwrap();
        // First column holds only the zero divisor 2.
        let rows: Vec<Vec<i128>> = (0..5)
            .map(|i| (0..5).map(|j| if j == 0 { 2 } else { ((i + 1) * (j + 1)) as i128 }).collect())
            .collect();
        let refs: Vec<&[i128]> = rows.iter().map(|r| r.as_slice()).collect();
        assert_eq!(mat(&z, &refs).det(), Err(ResidueError::SingularPivot(0)));
    }

    #[test]
    fn mismatches() {
        let a = Matrix::identity(2, &Modulus::field(257).unwrap().one());
        let b = Matrix::identity(2, &Modulus::field(101).unwrap().one());
        let c = Matrix::identity(3, &Modulus::field(257).unwrap().one());
        assert_eq!(a.mul(&b), Err(ResidueError::ModulusMismatch(257, 101)));
        assert_eq!(a.mul(&c), Err(ResidueError::DimensionMismatch(2, 3)));
        let ragged = vec![vec![*a.get(0, 0)], vec![]];
        assert!(Matrix::from_rows(ragged).is_err());
    }
}
