use std::io::{self, Write};

use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use super::ast::{Formula, Term};
use super::eval::{eval_finite, eval_limit, EvalMode};
use super::LogicError;
use crate::metric::{HeightBounds, LocalityScale};
use crate::rational::{q_to_string, BoundedRational, Q};
use crate::residue::{next_prime, Modulus};
use crate::structures::HeightBound;

/// Rungs `(q, s)` with `q` strictly increasing, `2L^2 < q` and `L`
/// non-decreasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeLadder {
    rungs: Vec<(Modulus, LocalityScale)>,
}

impl PrimeLadder {
    pub fn new(rungs: Vec<(Modulus, LocalityScale)>) -> Result<Self, LogicError> {
        for (q, s) in &rungs {
            if !q.is_field() {
                return Err(LogicError::InvalidLadder(format!("rung modulus {} is not a prime field", q.value())));
            }
            s.check_window(q)?;
        }
        for w in rungs.windows(2) {
            let ((q0, s0), (q1, s1)) = (&w[0], &w[1]);
            if q1.value() <= q0.value() {
                return Err(LogicError::InvalidLadder(format!("moduli not increasing: {} then {}", q0.value(), q1.value())));
            }
            if s1.height() < s0.height() {
                return Err(LogicError::InvalidLadder(format!("scales decrease: L = {} then {}", s0.height(), s1.height())));
            }
        }
        Ok(PrimeLadder { rungs })
    }

    /// One rung per feasible unit in `ls`, each with the least prime that
    /// keeps every quantifier sort and every term of `f` inside its window.
    pub fn windowed(f: &Formula, ls: &[u64]) -> Result<Self, LogicError> {
        let m = f.max_quantifier_level().unwrap_or(1);
        let mut rungs = Vec::with_capacity(ls.len());
        let mut floor = 2u64;
        for &l in ls {
            let need = required_modulus(f, l)?.max(floor);
            let q = Modulus::field(next_prime(need)?)?;
            floor = q.value() + 1;
            rungs.push((q, LocalityScale::new(l, m)?));
        }
        Self::new(rungs)
    }

    /// `count` rungs with feasible units `start * growth^i`.
    pub fn geometric(f: &Formula, start: u64, count: usize, growth: u64) -> Result<Self, LogicError> {
        if start < 2 || growth < 1 {
            return Err(LogicError::InvalidLadder("need start >= 2 and growth >= 1".into()));
        }
        let mut ls = Vec::with_capacity(count);
        let mut l = start;
        for _ in 0..count {
            ls.push(l);
            l = l.checked_mul(growth).ok_or_else(|| LogicError::InvalidLadder("feasible unit overflows".into()))?;
        }
        Self::windowed(f, &ls)
    }

    pub fn rungs(&self) -> &[(Modulus, LocalityScale)] {
        &self.rungs
    }
}

fn term_bounds(t: &Term, scope: &[(String, HeightBounds)]) -> Option<HeightBounds> {
    match t {
        Term::Var(v) => scope.iter().rev().find(|(n, _)| n == v).map(|(_, b)| *b),
        Term::Int(n) => Some(HeightBounds::of_rational(&BoundedRational::integer(*n))),
        Term::Rat(r) => Some(HeightBounds::of_rational(r)),
        Term::Add(a, b) | Term::Sub(a, b) => term_bounds(a, scope)?.add(&term_bounds(b, scope)?),
        Term::Mul(a, b) => term_bounds(a, scope)?.mul(&term_bounds(b, scope)?),
    }
}

fn need(num: u128, den: u128) -> Option<u128> {
    num.checked_mul(den)?.checked_mul(2)?.checked_add(1)
}

fn walk(f: &Formula, l: u64, scope: &mut Vec<(String, HeightBounds)>, acc: &mut u128) -> Result<(), LogicError> {
    let overflow = || LogicError::InvalidLadder(format!("window for `{f}` at l = {l} overflows 64 bits"));
    match f {
        Formula::Const(_) => {}
        Formula::Dist { lhs, rhs, .. } => {
            let b = term_bounds(lhs, scope).zip(term_bounds(rhs, scope)).and_then(|(x, y)| x.add(&y)).ok_or_else(overflow)?;
            *acc = (*acc).max(need(b.num, b.den).ok_or_else(overflow)?);
        }
        Formula::ZeroPred { term, .. } => {
            let b = term_bounds(term, scope).ok_or_else(overflow)?;
            *acc = (*acc).max(need(b.num, b.den).ok_or_else(overflow)?);
        }
        Formula::Neg(a) => walk(a, l, scope, acc)?,
        Formula::Min(a, b) | Formula::Max(a, b) | Formula::PlusTrunc(a, b) | Formula::MinusTrunc(a, b) => {
            walk(a, l, scope, acc)?;
            walk(b, l, scope, acc)?;
        }
        Formula::Sup { var, level, body } | Formula::Inf { var, level, body } => {
            let s = LocalityScale::new(l, *level)?;
            let h = s.height() as u128;
            *acc = (*acc).max(need(h, h).ok_or_else(overflow)?);
            scope.push((var.clone(), HeightBounds::of_scale(&s)));
            let r = walk(body, l, scope, acc);
            scope.pop();
            r?;
        }
    }
    Ok(())
}

/// Least modulus at which every quantifier sort of `f` at unit `l` and
/// every `Dist`/`ZeroPred` term decodes uniquely.
pub fn required_modulus(f: &Formula, l: u64) -> Result<u64, LogicError> {
    let base = LocalityScale::new(l, f.max_quantifier_level().unwrap_or(1))?.height() as u128;
    let mut acc = need(base, base).ok_or_else(|| LogicError::InvalidLadder(format!("window for `{f}` at l = {l} overflows 64 bits")))?;
    walk(f, l, &mut Vec::new(), &mut acc)?;
    u64::try_from(acc).map_err(|_| LogicError::InvalidLadder(format!("window for `{f}` at l = {l} overflows 64 bits")))
}

fn ser_q<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(&q_to_string(x))
}

fn ser_opt_q<S: Serializer>(x: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.collect_str(&q_to_string(v)),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub q: u64,
    pub l: u64,
    pub m: u64,
    #[serde(serialize_with = "ser_q")]
    pub value: Q,
    /// `value - previous value`; absent on the first rung.
    #[serde(serialize_with = "ser_opt_q")]
    pub diff: Option<Q>,
    /// `|value - limit|`.
    #[serde(serialize_with = "ser_q")]
    pub gap: Q,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub formula: String,
    pub limit_height: u64,
    #[serde(serialize_with = "ser_q")]
    pub limit: Q,
    pub rows: Vec<ScanRow>,
    #[serde(serialize_with = "ser_q")]
    pub final_gap: Q,
    pub non_convergent: bool,
}

impl ScanReport {
    pub fn values(&self) -> Vec<Q> {
        self.rows.iter().map(|r| r.value.clone()).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    /// Columns `q,l,m,value_num,value_den,gap_num,gap_den`.
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["q", "l", "m", "value_num", "value_den", "gap_num", "gap_den"])?;
        for r in &self.rows {
            w.write_record([
                r.q.to_string(),
                r.l.to_string(),
                r.m.to_string(),
                r.value.numer().to_string(),
                r.value.denom().to_string(),
                r.gap.numer().to_string(),
                r.gap.denom().to_string(),
            ])?;
        }
        w.flush()
    }
}

/// Evaluate `f` exhaustively at every rung and once at the limit.
///
/// The scan is flagged non-convergent when the last gap is positive and no
/// smaller than the first.
pub fn los_scan(f: &Formula, ladder: &PrimeLadder, limit_h: HeightBound) -> Result<ScanReport, LogicError> {
    let limit = eval_limit(f, limit_h)?;
    let mut rows: Vec<ScanRow> = Vec::with_capacity(ladder.rungs.len());
    for (q, s) in &ladder.rungs {
        let value = eval_finite(f, q, s.l(), EvalMode::Exhaustive)?;
        let diff = rows.last().map(|p| &value - &p.value);
        let gap = (&value - &limit).abs();
        rows.push(ScanRow { q: q.value(), l: s.l(), m: s.m(), value, diff, gap });
    }
    let first = rows.first().map(|r| r.gap.clone()).unwrap_or_else(Q::zero);
    let final_gap = rows.last().map(|r| r.gap.clone()).unwrap_or_else(Q::zero);
    let non_convergent = !final_gap.is_zero() && final_gap >= first;
    Ok(ScanReport { formula: f.to_string(), limit_height: limit_h.get(), limit, rows, final_gap, non_convergent })
}

#[cfg(test)]
mod tests {
    use super::super::parse_formula;
    use super::*;
    use crate::rational::q_frac;

    fn f(text: &str) -> Formula {
        parse_formula(text).unwrap()
    }

    #[test]
    fn required_modulus_of_square_formula() {
        // y*y - x at L = 8: bounds (64*8 + 8*64, 512) = (1024, 512).
        let form = f("sup x:S1 . inf y:S1 . d2((y*y), x)");
        assert_eq!(required_modulus(&form, 8).unwrap(), 2 * 1024 * 512 + 1);
        assert_eq!(required_modulus(&f("1/2"), 8).unwrap(), 2 * 64 + 1);
    }

    #[test]
    fn windowed_ladder_is_valid() {
        let form = f("sup x:S1 . inf y:S1 . d2((y*y), x)");
        let ladder = PrimeLadder::windowed(&form, &[2, 4, 8]).unwrap();
        let qs: Vec<u64> = ladder.rungs().iter().map(|(q, _)| q.value()).collect();
        assert!(qs.windows(2).all(|w| w[0] < w[1]));
        for ((q, s), l) in ladder.rungs().iter().zip([2u64, 4, 8]) {
            assert_eq!(s.l(), l);
            assert!(q.value() >= required_modulus(&form, l).unwrap());
        }
    }

    #[test]
    fn ladder_validation() {
        let s = LocalityScale::new(3, 1).unwrap();
        let q = |v| Modulus::field(v).unwrap();
        assert!(PrimeLadder::new(vec![(q(101), s), (q(97), s)]).is_err());
        assert!(PrimeLadder::new(vec![(q(13), s)]).is_err());
        let big = LocalityScale::new(4, 1).unwrap();
        assert!(PrimeLadder::new(vec![(q(101), big), (q(103), s)]).is_err());
        assert!(PrimeLadder::new(vec![(q(97), s), (q(101), big)]).is_ok());
        assert!(PrimeLadder::new(vec![(Modulus::ring(100).unwrap(), s)]).is_err());
    }

    #[test]
    fn constant_has_zero_gap() {
        let form = f("1/3");
        let ladder = PrimeLadder::geometric(&form, 2, 4, 2).unwrap();
        let r = los_scan(&form, &ladder, HeightBound::new(5).unwrap()).unwrap();
        assert!(r.rows.iter().all(|row| row.gap.is_zero() && row.value == q_frac(1, 3)));
        assert!(!r.non_convergent);
        assert_eq!(r.rows[1].diff, Some(Q::zero()));
    }

    #[test]
    fn square_formula_scan() {
        let form = f("sup x:S1 . inf y:S1 . d2((y*y), x)");
        let ladder = PrimeLadder::windowed(&form, &[2, 4, 8]).unwrap();
        let r = los_scan(&form, &ladder, HeightBound::new(8).unwrap()).unwrap();
        assert_eq!(r.limit, q_frac(1, 2));
        assert!(r.rows.iter().all(|row| row.value == q_frac(1, 2) && row.gap.is_zero()));
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("q,l,m,value_num,value_den,gap_num,gap_den\n"));
        assert!(text.lines().nth(1).unwrap().ends_with(",2,1,1,2,0,1"));
    }

    #[test]
    fn persistent_gap_is_flagged() {
        // The limit side sees 1/3 at H = 3; the rungs at l = 2 never do.
        let form = f("inf x:S1 . d1(x, 1/3)");
        let s = LocalityScale::new(2, 1).unwrap();
        let ladder = PrimeLadder::new(vec![(Modulus::field(101).unwrap(), s), (Modulus::field(103).unwrap(), s)]).unwrap();
        let r = los_scan(&form, &ladder, HeightBound::new(3).unwrap()).unwrap();
        assert_eq!(r.final_gap, q_frac(1, 6));
        assert!(r.non_convergent);
    }
}
