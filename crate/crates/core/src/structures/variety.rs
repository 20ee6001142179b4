use std::io::{self, Write};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::StructureError;
use crate::metric::{enumerate_sort, LocalityScale, SortElement};
use crate::poly::PolySystem;
use crate::rational::{BoundedRational, Q};
use crate::residue::{Modulus, Residue};

const MAX_WITNESSES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarietyScan {
    /// Every tuple of `S_m^k`, refusing more than `budget` tuples.
    Exhaustive { budget: usize },
    /// `count` uniform tuples drawn with a seeded generator.
    Sampled { count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VarietyReport {
    pub vars: Vec<String>,
    pub modulus: u64,
    pub l: u64,
    pub m: u64,
    pub scanned: usize,
    pub points: Vec<Vec<BoundedRational>>,
    pub spurious: usize,
    pub spurious_witnesses: Vec<Vec<BoundedRational>>,
    /// Largest `|N|` and `D` of a polynomial value `N/D` written over
    /// `D = prod den(x_i)^maxdeg_i`: exact over the box when exhaustive, the
    /// a priori bound otherwise.
    #[serde(serialize_with = "as_string")]
    pub value_num_bound: BigInt,
    #[serde(serialize_with = "as_string")]
    pub value_den_bound: BigInt,
    pub bounds_exact: bool,
    /// `2 * N * D < q`: a mod-q zero inside these bounds is a true zero.
    pub certified: bool,
}

fn as_string<S: serde::Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}

impl VarietyReport {
    pub fn contains(&self, point: &[BoundedRational]) -> bool {
        self.points.iter().any(|p| p.as_slice() == point)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// One row per decoded point, coordinates as `num/den`.
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.vars)?;
        for p in &self.points {
            w.write_record(p.iter().map(|x| x.to_string()))?;
        }
        w.flush()
    }
}

/// Points of `V` among tuples of `S_m(F_q)`, decoded and checked over `Q`.
pub fn variety_points(
    v: &PolySystem,
    q: &Modulus,
    s: &LocalityScale,
    scan: VarietyScan,
) -> Result<VarietyReport, StructureError> {
    let sort = enumerate_sort(s, q, None)?;
    let k = v.vars.len();
    let mut report = VarietyReport {
        vars: v.vars.clone(),
        modulus: q.value(),
        l: s.l(),
        m: s.m(),
        scanned: 0,
        points: Vec::new(),
        spurious: 0,
        spurious_witnesses: Vec::new(),
        value_num_bound: BigInt::zero(),
        value_den_bound: BigInt::zero(),
        bounds_exact: matches!(scan, VarietyScan::Exhaustive { .. }),
        certified: false,
    };
    let visit = |tuple: &[&SortElement], report: &mut VarietyReport| {
        report.scanned += 1;
        let residues: Vec<Residue> = tuple.iter().map(|e| e.residue).collect();
        let rationals: Vec<BoundedRational> = tuple.iter().map(|e| e.rational).collect();
        let point: Vec<Q> = rationals.iter().map(|r| r.to_q()).collect();
        let mut exact_zero = true;
        for p in &v.polys {
            let value = p.eval_q(&point);
            if report.bounds_exact {
                let den = p
                    .max_degrees()
                    .iter()
                    .zip(&rationals)
                    .fold(BigInt::from(1), |acc, (&d, r)| acc * BigInt::from(r.denom()).pow(d));
                let num = (&value * Q::from_integer(den.clone())).to_integer().abs();
                report.value_num_bound = report.value_num_bound.clone().max(num);
                report.value_den_bound = report.value_den_bound.clone().max(den);
            }
            exact_zero &= value.is_zero();
        }
        let mod_zero = v.polys.iter().all(|p| p.eval_residue(q, &residues).is_zero());
        if mod_zero && exact_zero {
            report.points.push(rationals);
        } else if mod_zero {
            report.spurious += 1;
            if report.spurious_witnesses.len() < MAX_WITNESSES {
                report.spurious_witnesses.push(rationals);
            }
        }
    };
    match scan {
        VarietyScan::Exhaustive { budget } => {
            let total = (sort.len() as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
            if total > budget as u128 {
                return Err(StructureError::EnumerationBudgetExceeded(budget));
            }
            let mut idx = vec![0usize; k];
            loop {
                let tuple: Vec<&SortElement> = idx.iter().map(|&i| &sort[i]).collect();
                visit(&tuple, &mut report);
                // Odometer, last coordinate fastest.
                let mut pos = k;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < sort.len() {
                        break;
                    }
                    idx[pos] = 0;
                }
                if k == 0 || idx.iter().all(|&i| i == 0) {
                    break;
                }
            }
        }
        VarietyScan::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let tuple: Vec<&SortElement> = (0..k).map(|_| &sort[rng.gen_range(0..sort.len())]).collect();
                visit(&tuple, &mut report);
            }
            let (mut n, mut d) = (BigInt::zero(), BigInt::zero());
            for p in &v.polys {
                let (pn, pd) = p.value_height_bounds(s.height());
                n = n.max(pn);
                d = d.max(pd);
            }
            report.value_num_bound = n;
            report.value_den_bound = d;
        }
    }
    let window = BigInt::from(2) * &report.value_num_bound * &report.value_den_bound;
    report.certified = window < BigInt::from(q.value());
    Ok(report)
}
