//! Runnable checks of the emerging-metric axioms on one sort `S_m(F_q)`.
//!
//! Distances are always measured on the residue side: the difference of two
//! residues is decoded in the widest uniqueness window of `q`. A distance
//! whose exact value does not fit that window cannot be measured and is
//! counted as skipped, never as passed.

use std::collections::BTreeMap;
use std::io;

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    in_sort, reconstruct, sort_level_for, widest_bound, DecodeOutcome, LocalityScale, MetricError,
    SortElement, SortOp,
};
use crate::poly::Polynomial;
use crate::rational::{q_frac, q_height, q_int, q_to_string, BoundedRational, Q};
use crate::residue::{Modulus, Residue};

/// Cap on the number of exhaustive checks per axiom.
const EXHAUSTIVE_CAP: usize = 20_000_000;

/// Tolerances for the continuity check.
const EPSILONS: [(i64, i64); 3] = [(1, 2), (1, 4), (1, 8)];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sample {
    Exhaustive,
    Random { count: usize, seed: u64 },
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct AxiomTally {
    pub checked: u64,
    pub failed: u64,
    pub skipped: u64,
    pub worst_witness: Option<String>,
    #[serde(skip)]
    worst_score: Option<Q>,
}

impl AxiomTally {
    /// Record one check. `score > 0` means violated; the largest score seen
    /// is kept as the witness.
    fn record(&mut self, score: Q, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if score.is_positive() {
            self.failed += 1;
        }
        if self.worst_score.as_ref().is_none_or(|w| score > *w) {
            self.worst_witness = Some(format!("{} (score {})", witness(), q_to_string(&score)));
            self.worst_score = Some(score);
        }
    }

    fn skip(&mut self) {
        self.skipped += 1;
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub l: u64,
    pub m: u64,
    pub modulus: u64,
    pub sort_size: usize,
    /// Height bound used to decode distances.
    pub distance_window: u64,
    pub axioms: BTreeMap<&'static str, AxiomTally>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.axioms.values().all(AxiomTally::passed)
    }

    pub fn axiom(&self, name: &str) -> Option<&AxiomTally> {
        self.axioms.get(name)
    }

    pub fn total_failures(&self) -> u64 {
        self.axioms.values().map(|t| t.failed).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// Rows `axiom,checked,failed`.
    pub fn write_csv<W: io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["axiom", "checked", "failed"])?;
        for (name, t) in &self.axioms {
            w.write_record([name.to_string(), t.checked.to_string(), t.failed.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Audit the metric axioms on `S_m(F_q)` at scale `s`.
///
/// `predicates` are zero-sets `P(x) = 0` whose complements are checked for
/// openness; each polynomial's arity sets the tuple length.
pub fn audit_metric(
    s: &LocalityScale,
    q: &Modulus,
    sample: Sample,
    predicates: &[Polynomial],
) -> Result<AuditReport, MetricError> {
    s.check_window(q)?;
    let sort = super::enumerate_sort(s, q, Some(EXHAUSTIVE_CAP))?;
    let mut auditor = Auditor::new(s, q, &sort, sample);
    auditor.nesting()?;
    auditor.pairs()?;
    auditor.triangle()?;
    auditor.closure()?;
    auditor.continuity()?;
    for p in predicates {
        auditor.predicate_open(p)?;
    }
    Ok(auditor.finish())
}

struct Auditor<'a> {
    s: LocalityScale,
    q: Modulus,
    sort: &'a [SortElement],
    sample: Sample,
    rng: ChaCha8Rng,
    window: u64,
    axioms: BTreeMap<&'static str, AxiomTally>,
}

impl<'a> Auditor<'a> {
    fn new(s: &LocalityScale, q: &Modulus, sort: &'a [SortElement], sample: Sample) -> Self {
        let seed = match sample {
            Sample::Random { seed, .. } => seed,
            Sample::Exhaustive => 0,
        };
        Auditor {
            s: *s,
            q: *q,
            sort,
            sample,
            rng: ChaCha8Rng::seed_from_u64(seed),
            window: widest_bound(q.value()),
            axioms: BTreeMap::new(),
        }
    }

    fn finish(self) -> AuditReport {
        AuditReport {
            l: self.s.l(),
            m: self.s.m(),
            modulus: self.q.value(),
            sort_size: self.sort.len(),
            distance_window: self.window,
            axioms: self.axioms,
        }
    }

    fn tally(&mut self, name: &'static str) -> &mut AxiomTally {
        self.axioms.entry(name).or_default()
    }

    /// Distance between two residues whose exact rationals are known, or
    /// `None` when the exact difference is too tall to decode.
    fn measure(&self, a: &Residue, ra: &Q, b: &Residue, rb: &Q) -> Result<Option<Q>, MetricError> {
        let exact = (ra - rb).abs();
        if q_height(&exact) > self.window.into() {
            return Ok(None);
        }
        let diff = a.sub(b)?;
        let w = self.window as u128;
        Ok(match reconstruct(&diff, w, w)? {
            DecodeOutcome::Local(r) => Some(r.abs().to_q()),
            DecodeOutcome::NotLocal => Some(Q::from_integer((-1).into())),
        })
    }

    fn elem_dist(&self, i: usize, j: usize) -> Result<Option<Q>, MetricError> {
        let (a, b) = (&self.sort[i], &self.sort[j]);
        self.measure(&a.residue, &a.rational.to_q(), &b.residue, &b.rational.to_q())
    }

    fn index_tuples(&mut self, arity: usize) -> Result<Vec<Vec<usize>>, MetricError> {
        let n = self.sort.len();
        match self.sample {
            Sample::Exhaustive => {
                let total = n.checked_pow(arity as u32).filter(|&t| t <= EXHAUSTIVE_CAP);
                let total = total.ok_or(MetricError::EnumerationBudgetExceeded(EXHAUSTIVE_CAP))?;
                Ok((0..total)
                    .map(|mut k| {
                        let mut t = vec![0; arity];
                        for slot in t.iter_mut().rev() {
                            *slot = k % n;
                            k /= n;
                        }
                        t
                    })
                    .collect())
            }
            Sample::Random { count, .. } => {
                Ok((0..count).map(|_| (0..arity).map(|_| self.rng.gen_range(0..n)).collect()).collect())
            }
        }
    }

    /// `S_m` subset of `S_{m+1}`, tested on residues.
    fn nesting(&mut self) -> Result<(), MetricError> {
        let next = self.s.at_level(self.s.m() + 1);
        let next = next.ok().filter(|n| n.fits(&self.q));
        for e in self.sort {
            match &next {
                Some(n) => {
                    let inside = in_sort(&e.residue, n)?;
                    let score = if inside { -Q::one() } else { Q::one() };
                    self.tally("nesting").record(score, || format!("x={}", e.rational));
                }
                None => self.tally("nesting").skip(),
            }
        }
        Ok(())
    }

    /// Coherence with the decoded values, identity of indiscernibles and
    /// the diameter bound, over pairs.
    fn pairs(&mut self) -> Result<(), MetricError> {
        let m = q_int(self.s.m() as i64);
        for t in self.index_tuples(2)? {
            let (i, j) = (t[0], t[1]);
            let (x, y) = (self.sort[i], self.sort[j]);
            let Some(d) = self.elem_dist(i, j)? else {
                for name in ["coherence", "identity", "diameter"] {
                    self.tally(name).skip();
                }
                continue;
            };
            let exact = (x.rational.to_q() - y.rational.to_q()).abs();
            let incoherent = if d == exact { -Q::one() } else { Q::one() };
            self.tally("coherence").record(incoherent, || format!("x={} y={} d={}", x.rational, y.rational, q_to_string(&d)));
            let indiscernible = d.is_zero() && x.residue != y.residue;
            let score = if indiscernible { Q::one() } else { -d.clone() };
            self.tally("identity").record(score, || format!("x={} y={}", x.rational, y.rational));
            let excess = &d - &m;
            self.tally("diameter").record(excess, || format!("x={} y={} d={}", x.rational, y.rational, q_to_string(&d)));
        }
        Ok(())
    }

    fn triangle(&mut self) -> Result<(), MetricError> {
        for t in self.index_tuples(3)? {
            let (i, j, k) = (t[0], t[1], t[2]);
            let (Some(dxy), Some(dyz), Some(dxz)) = (self.elem_dist(i, j)?, self.elem_dist(j, k)?, self.elem_dist(i, k)?)
            else {
                self.tally("triangle").skip();
                continue;
            };
            let excess = &dxz - (&dxy + &dyz);
            let (x, y, z) = (self.sort[i].rational, self.sort[j].rational, self.sort[k].rational);
            self.tally("triangle").record(excess, || format!("x={x} y={y} z={z}"));
        }
        Ok(())
    }

    /// `x + y` lands in the add level and `x * y` in the mul level.
    fn closure(&mut self) -> Result<(), MetricError> {
        let add = sort_level_for(&self.s, SortOp::Add)?;
        let mul = sort_level_for(&self.s, SortOp::Mul)?;
        for t in self.index_tuples(2)? {
            let (x, y) = (self.sort[t[0]].rational.to_q(), self.sort[t[1]].rational.to_q());
            for (op, bound, value) in [("+", add, &x + &y), ("*", mul, &x * &y)] {
                let height_excess = Q::from_integer(q_height(&value)) - q_int(bound.height_bound as i64);
                let ratio_excess = value.abs() - q_int(bound.level as i64);
                let score = if height_excess.is_positive() || ratio_excess.is_positive() {
                    Q::one()
                } else {
                    -Q::one()
                };
                self.tally("closure").record(score, || {
                    format!("{} {op} {} outside S_{}", q_to_string(&x), q_to_string(&y), bound.level)
                });
            }
        }
        Ok(())
    }

    /// Indices `j` with `|x_j - x_i| < delta`; the sort is ascending so this
    /// is a contiguous run.
    fn neighbours(&self, i: usize, delta: &Q) -> std::ops::Range<usize> {
        let center = self.sort[i].rational.to_q();
        let lo = self.sort.partition_point(|e| &center - e.rational.to_q() >= *delta);
        let hi = self.sort.partition_point(|e| e.rational.to_q() - &center < *delta);
        lo..hi
    }

    /// Uniform continuity of `+` (delta = eps/2) and `*` (delta = eps/(2m+1)).
    fn continuity(&mut self) -> Result<(), MetricError> {
        let m = self.s.m() as i64;
        for (en, ed) in EPSILONS {
            let eps = q_frac(en, ed);
            for (op, delta) in [("+", q_frac(en, 2 * ed)), ("*", q_frac(en, (2 * m + 1) * ed))] {
                let close: Vec<(usize, usize)> = match self.sample {
                    Sample::Exhaustive => {
                        let v: Vec<_> =
                            (0..self.sort.len()).flat_map(|i| self.neighbours(i, &delta).map(move |j| (i, j))).collect();
                        if v.len().saturating_mul(v.len()) > EXHAUSTIVE_CAP {
                            return Err(MetricError::EnumerationBudgetExceeded(EXHAUSTIVE_CAP));
                        }
                        v
                    }
                    Sample::Random { count, .. } => (0..count)
                        .map(|_| {
                            let i = self.rng.gen_range(0..self.sort.len());
                            let run: Vec<usize> = self.neighbours(i, &delta).collect();
                            (i, *run.choose(&mut self.rng).expect("i is its own neighbour"))
                        })
                        .collect(),
                };
                let combos: Vec<((usize, usize), (usize, usize))> = match self.sample {
                    Sample::Exhaustive => close.iter().flat_map(|&a| close.iter().map(move |&b| (a, b))).collect(),
                    Sample::Random { .. } => {
                        let mut shuffled = close.clone();
                        shuffled.shuffle(&mut self.rng);
                        close.iter().copied().zip(shuffled).collect()
                    }
                };
                for ((x1, y1), (x2, y2)) in combos {
                    self.continuity_case(op, &eps, [x1, x2], [y1, y2])?;
                }
            }
        }
        Ok(())
    }

    fn continuity_case(&mut self, op: &str, eps: &Q, xs: [usize; 2], ys: [usize; 2]) -> Result<(), MetricError> {
        let get = |i: usize| (self.sort[i].residue, self.sort[i].rational.to_q());
        let ((xr1, xq1), (xr2, xq2)) = (get(xs[0]), get(xs[1]));
        let ((yr1, yq1), (yr2, yq2)) = (get(ys[0]), get(ys[1]));
        let (fx, fy, fxq, fyq) = if op == "+" {
            (xr1.add(&xr2)?, yr1.add(&yr2)?, &xq1 + &xq2, &yq1 + &yq2)
        } else {
            (xr1.mul(&xr2)?, yr1.mul(&yr2)?, &xq1 * &xq2, &yq1 * &yq2)
        };
        let name = if op == "+" { "continuity_add" } else { "continuity_mul" };
        match self.measure(&fx, &fxq, &fy, &fyq)? {
            Some(d) => {
                let excess = if d >= *eps { Q::one() + (&d - eps) } else { &d - eps };
                self.tally(name).record(excess, || {
                    format!(
                        "x=({}, {}) y=({}, {}) eps={}",
                        q_to_string(&xq1),
                        q_to_string(&xq2),
                        q_to_string(&yq1),
                        q_to_string(&yq2),
                        q_to_string(eps)
                    )
                });
            }
            None => self.tally(name).skip(),
        }
        Ok(())
    }

    /// Openness of the complement of `P(x) = 0`: around each point off the
    /// zero set, a certified radius from a Lipschitz bound must contain no
    /// point the finite structure places on the zero set.
    fn predicate_open(&mut self, p: &Polynomial) -> Result<(), MetricError> {
        let k = p.nvars();
        let radius = q_int(self.s.m() as i64 + 1);
        let lip = p.lipschitz_bound(&radius);
        for centre in self.index_tuples(k)? {
            let residues: Vec<Residue> = centre.iter().map(|&i| self.sort[i].residue).collect();
            if p.eval_residue(&self.q, &residues).is_zero() {
                continue;
            }
            let rationals: Vec<Q> = centre.iter().map(|&i| self.sort[i].rational.to_q()).collect();
            let value = p.eval_q(&rationals).abs();
            let delta = if lip.is_zero() { Q::one() } else { (&value / &lip).min(Q::one()) };
            let runs: Vec<Vec<usize>> = centre.iter().map(|&i| self.neighbours(i, &delta).collect()).collect();
            let count: usize = runs.iter().map(Vec::len).product();
            if count > EXHAUSTIVE_CAP {
                return Err(MetricError::EnumerationBudgetExceeded(EXHAUSTIVE_CAP));
            }
            let mut worst_hit: Option<Vec<BoundedRational>> = None;
            for idx in 0..count {
                let mut rem = idx;
                let pick: Vec<usize> = runs
                    .iter()
                    .map(|r| {
                        let j = r[rem % r.len()];
                        rem /= r.len();
                        j
                    })
                    .collect();
                let point: Vec<Residue> = pick.iter().map(|&j| self.sort[j].residue).collect();
                if p.eval_residue(&self.q, &point).is_zero() {
                    worst_hit = Some(pick.iter().map(|&j| self.sort[j].rational).collect());
                    break;
                }
            }
            let score = if worst_hit.is_some() { Q::one() } else { -delta.clone() };
            let centre_r: Vec<String> = centre.iter().map(|&i| self.sort[i].rational.to_string()).collect();
            self.tally("predicate_open").record(score, || match &worst_hit {
                Some(hit) => format!("centre {:?} has zero-set point {:?} within {}", centre_r, hit, q_to_string(&delta)),
                None => format!("centre {:?} radius {}", centre_r, q_to_string(&delta)),
            });
        }
        Ok(())
    }
}

/// Audit an explicit point list; used for degenerate sorts in tests.
#[cfg(test)]
fn audit_points(s: &LocalityScale, q: &Modulus, points: &[SortElement]) -> Result<AuditReport, MetricError> {
    let mut a = Auditor::new(s, q, points, Sample::Exhaustive);
    a.pairs()?;
    a.triangle()?;
    a.continuity()?;
    Ok(a.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::PolySystem;

    fn f(q: u64) -> Modulus {
        Modulus::field(q).unwrap()
    }

    /// Independent count of diameter violations over ordered pairs of
    /// `S_m`: pairs with `|x - y| > m`.
    fn brute_diameter_violations(l: i64, m: i64) -> u64 {
        let mut pts: Vec<(i64, i64)> = Vec::new();
        for k2 in 1..=l {
            for k1 in -l..=l {
                if k1.abs() <= m * k2 && num_integer::Integer::gcd(&k1, &k2) == 1 {
                    pts.push((k1, k2));
                }
            }
        }
        let mut n = 0;
        for &(a, b) in &pts {
            for &(c, d) in &pts {
                if (a * d - c * b).abs() > m * b * d {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn exhaustive_l3_m1_q257() {
        let s = LocalityScale::new(3, 1).unwrap();
        let circle: PolySystem = "vars: x y\nx^2 + y^2 - 1".parse().unwrap();
        let r = audit_metric(&s, &f(257), Sample::Exhaustive, &circle.polys).unwrap();
        assert_eq!(r.sort_size, 9);
        assert_eq!(r.distance_window, 11);
        for name in ["coherence", "triangle", "identity", "nesting", "closure", "continuity_add", "continuity_mul"] {
            let t = r.axiom(name).unwrap();
            assert_eq!(t.failed, 0, "{name}: {t:?}");
        }
        let tri = r.axiom("triangle").unwrap();
        assert_eq!((tri.checked, tri.skipped), (729, 0));
        // S_1 spans [-1, 1], so pairs at distance above 1 exist.
        let diam = r.axiom("diameter").unwrap();
        assert_eq!(diam.checked, 81);
        assert_eq!(diam.failed, brute_diameter_violations(3, 1));
        assert_eq!(r.axiom("predicate_open").unwrap().failed, 0);
    }

    #[test]
    fn random_mode_is_reproducible() {
        let s = LocalityScale::new(4, 1).unwrap();
        let q = f(1009);
        let a = audit_metric(&s, &q, Sample::Random { count: 500, seed: 9 }, &[]).unwrap();
        let b = audit_metric(&s, &q, Sample::Random { count: 500, seed: 9 }, &[]).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.axiom("triangle").unwrap().failed, 0);
        assert_eq!(a.axiom("triangle").unwrap().checked + a.axiom("triangle").unwrap().skipped, 500);
    }

    #[test]
    fn broken_window_is_rejected() {
        let s = LocalityScale::new(12, 1).unwrap();
        assert!(matches!(
            audit_metric(&s, &f(257), Sample::Exhaustive, &[]),
            Err(MetricError::ScaleTooLargeForModulus { .. })
        ));
    }

    #[test]
    fn single_point_sort_passes() {
        let q = f(257);
        let s = LocalityScale::new(2, 1).unwrap();
        let pt = [SortElement { rational: BoundedRational::ZERO, residue: q.zero() }];
        let r = audit_points(&s, &q, &pt).unwrap();
        assert!(r.passed());
        assert_eq!(r.axiom("triangle").unwrap().checked, 1);
    }

    #[test]
    fn csv_has_header_and_one_row_per_axiom() {
        let s = LocalityScale::new(2, 1).unwrap();
        let r = audit_metric(&s, &f(257), Sample::Exhaustive, &[]).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "axiom,checked,failed");
        assert_eq!(lines.len(), 1 + r.axioms.len());
        assert!(text.ends_with('\n') && !text.contains('\r'));
    }
}
