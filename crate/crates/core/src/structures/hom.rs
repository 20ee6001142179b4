use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::groups::{sample_point, satisfies};
use super::{decode_matrix, encode_matrix, GroupFamily, HeightBound, RationalMatrix, ResidueMatrix, StructureError};
use crate::metric::LocalityScale;
use crate::residue::Modulus;

const MAX_WITNESSES: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomFailure {
    pub pair: usize,
    pub check: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomReport {
    pub family: String,
    pub modulus: u64,
    pub l: u64,
    pub m: u64,
    pub height_bound: u64,
    pub num_required: u128,
    pub den_required: u128,
    pub pairs: usize,
    pub membership_failures: usize,
    pub product_failures: usize,
    pub witnesses: Vec<HomFailure>,
}

impl HomReport {
    pub fn total_failures(&self) -> usize {
        self.membership_failures + self.product_failures
    }

    pub fn passed(&self) -> bool {
        self.total_failures() == 0
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["check", "checked", "failed"])?;
        w.write_record(["membership", &(2 * self.pairs).to_string(), &self.membership_failures.to_string()])?;
        w.write_record(["product", &self.pairs.to_string(), &self.product_failures.to_string()])?;
        w.flush()
    }
}

/// Numerator and denominator bounds on entries of a product of two points
/// with common height `h`.
///
/// Over the common denominator `D1 D2 <= h^2`, compact groups keep every
/// component in `[-1, 1]`, so numerators are also at most `h^2`. For SL2
/// each component is a sum of `2n` products of numerators.
pub fn required_bounds(family: &GroupFamily, h: HeightBound) -> (u128, u128) {
    let hh = h.get() as u128 * h.get() as u128;
    if family.is_compact() {
        (hh, hh)
    } else {
        (2 * family.n() as u128 * hh, hh)
    }
}

/// Check the defining equations of each encoded point and
/// `decode(encode(M1) encode(M2)) = M1 M2` for every pair.
pub fn group_hom_check_pairs(
    family: &GroupFamily,
    pairs: &[(RationalMatrix, RationalMatrix)],
    h: HeightBound,
    q: &Modulus,
    s: &LocalityScale,
) -> Result<HomReport, StructureError> {
    let (num_required, den_required) = required_bounds(family, h);
    let available = s.height() as u128;
    if available < num_required || available < den_required || !s.fits(q) {
        return Err(StructureError::WindowTooSmall {
            num_required,
            den_required,
            available: s.height(),
            modulus: q.value(),
        });
    }
    let mut report = HomReport {
        family: family.to_string(),
        modulus: q.value(),
        l: s.l(),
        m: s.m(),
        height_bound: h.get(),
        num_required,
        den_required,
        pairs: pairs.len(),
        membership_failures: 0,
        product_failures: 0,
        witnesses: Vec::new(),
    };
    let witness = |report: &mut HomReport, pair, check, detail: String| {
        if report.witnesses.len() < MAX_WITNESSES {
            report.witnesses.push(HomFailure { pair, check, detail });
        }
    };
    for (idx, (m1, m2)) in pairs.iter().enumerate() {
        m1.check_height(h)?;
        m2.check_height(h)?;
        let a1 = encode_matrix(m1, q)?;
        let a2 = encode_matrix(m2, q)?;
        for (a, m) in [(&a1, m1), (&a2, m2)] {
            if !residue_member(family, a) {
                report.membership_failures += 1;
                witness(&mut report, idx, "membership", format!("image of {m} fails the equations mod {}", q.value()));
            }
        }
        let exact = m1.mul(m2)?;
        match decode_matrix(&a1.mul(&a2)?, s)? {
            Some(d) if d == exact => {}
            Some(d) => {
                report.product_failures += 1;
                witness(&mut report, idx, "product", format!("decoded {d}, exact {exact}"));
            }
            None => {
                report.product_failures += 1;
                witness(&mut report, idx, "product", format!("product of {m1} and {m2} is not local"));
            }
        }
    }
    Ok(report)
}

fn residue_member(family: &GroupFamily, a: &ResidueMatrix) -> bool {
    match a {
        ResidueMatrix::Real(m) => !family.is_gaussian() && satisfies(family, m),
        ResidueMatrix::Gaussian(m) => family.is_gaussian() && satisfies(family, m),
    }
}

/// [`group_hom_check_pairs`] on `sample_size` seeded random pairs.
pub fn group_hom_check(
    family: &GroupFamily,
    sample_size: usize,
    h: HeightBound,
    q: &Modulus,
    s: &LocalityScale,
    seed: u64,
) -> Result<HomReport, StructureError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<_> = (0..sample_size)
        .map(|_| (sample_point(family, h, &mut rng), sample_point(family, h, &mut rng)))
        .collect();
    group_hom_check_pairs(family, &pairs, h, q, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mersenne61() -> Modulus {
        Modulus::field((1 << 61) - 1).unwrap()
    }

    #[test]
    fn so3_hundred_pairs_at_h100() {
        let fam = GroupFamily::so(3).unwrap();
        let s = LocalityScale::new(10, 4).unwrap();
        let r = group_hom_check(&fam, 100, HeightBound::new(100).unwrap(), &mersenne61(), &s, 11).unwrap();
        assert_eq!(r.pairs, 100);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn identity_pair_passes() {
        let fam = GroupFamily::su(2).unwrap();
        let q = Modulus::field(257).unwrap();
        let s = LocalityScale::new(2, 1).unwrap();
        let r = group_hom_check_pairs(&fam, &[(fam.identity(), fam.identity())], HeightBound::new(1).unwrap(), &q, &s).unwrap();
        assert!(r.passed());
        assert_eq!(r.pairs, 1);
    }

    #[test]
    fn undersized_window() {
        let fam = GroupFamily::so(3).unwrap();
        let q = Modulus::field(1009).unwrap();
        let s = LocalityScale::new(22, 1).unwrap();
        let err = group_hom_check(&fam, 5, HeightBound::new(100).unwrap(), &q, &s, 0).unwrap_err();
        assert!(matches!(err, StructureError::WindowTooSmall { num_required: 10_000, .. }));
        // Scale large enough for the products but not for the modulus.
        let s = LocalityScale::new(10, 4).unwrap();
        assert!(matches!(
            group_hom_check(&fam, 5, HeightBound::new(100).unwrap(), &q, &s, 0),
            Err(StructureError::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn non_compact_bounds_and_check() {
        let fam = GroupFamily::sl2_gaussian();
        let h = HeightBound::new(30).unwrap();
        assert_eq!(required_bounds(&fam, h), (3600, 900));
        let s = LocalityScale::new(60, 2).unwrap();
        let r = group_hom_check(&fam, 50, h, &mersenne61(), &s, 3).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn reports_serialize() {
        let fam = GroupFamily::so(2).unwrap();
        let s = LocalityScale::new(10, 2).unwrap();
        let r = group_hom_check(&fam, 3, HeightBound::new(10).unwrap(), &mersenne61(), &s, 0).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "check,checked,failed\nmembership,6,0\nproduct,3,0\n");
        assert_eq!(r.to_json()["family"], "SO(2)");
    }
}
