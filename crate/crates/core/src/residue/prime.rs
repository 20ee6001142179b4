//! Deterministic primality for the full `u64` range.

use super::ResidueError;

/// Witness set that makes Miller-Rabin exact for every n < 2^64.
const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime `>= lower`.
pub fn next_prime(lower: u64) -> Result<u64, ResidueError> {
    if lower < 2 {
        return Err(ResidueError::ValueTooSmall(lower));
    }
    let mut n = lower;
    loop {
        if is_prime(n) {
            return Ok(n);
        }
        n = n.checked_add(1).ok_or(ResidueError::RangeExhausted(lower))?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2u64;
        while d * d <= n {
            if n.is_multiple_of(d) {
                return false;
            }
            d += 1;
        }
        true
    }

    #[test]
    fn agrees_with_trial_division_below_100k() {
        for n in 0..100_000u64 {
            assert_eq!(is_prime(n), trial_division(n), "n = {n}");
        }
    }

    #[test]
    fn next_prime_examples() {
        // Frozen from the trial-division oracle above.
        let oracle = |lo: u64| (lo..).find(|&n| trial_division(n)).unwrap();
        assert_eq!(oracle(10_000), 10_007);
        assert_eq!(oracle(1_000_000), 1_000_003);
        assert_eq!(next_prime(10_000).unwrap(), 10_007);
        assert_eq!(next_prime(1_000_000).unwrap(), 1_000_003);
        assert_eq!(next_prime(2).unwrap(), 2);
    }

    #[test]
    fn large_known_values() {
        assert!(is_prime((1 << 61) - 1));
        assert!(is_prime((1 << 31) - 1));
        assert!(is_prime(18_446_744_073_709_551_557)); // largest 64-bit prime
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2,3,5,7
        assert!(!is_prime(3_825_123_056_546_413_051));
    }

    #[test]
    fn range_exhausted_past_last_prime() {
        assert!(matches!(
            next_prime(18_446_744_073_709_551_558),
            Err(ResidueError::RangeExhausted(_))
        ));
        assert!(matches!(next_prime(1), Err(ResidueError::ValueTooSmall(1))));
    }
}
