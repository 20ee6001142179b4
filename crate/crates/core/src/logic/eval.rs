use std::collections::HashMap;
use std::rc::Rc;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ast::{Formula, Term};
use super::LogicError;
use crate::metric::{encode, rationals_within, reconstruct, enumerate_sort, HeightBounds, LocalityScale, SortElement};
use crate::rational::{BoundedRational, Q};
use crate::residue::{Modulus, Residue};
use crate::structures::HeightBound;

/// Largest sort either evaluator will enumerate for one quantifier.
pub const DEFAULT_BUDGET: usize = 5_000_000;

/// How quantifiers range over a sort.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Exhaustive,
    /// `count` uniform draws per quantifier evaluation.
    Sampled { count: usize, seed: u64 },
}

fn clamp01(x: Q) -> Q {
    if x < Q::zero() {
        Q::zero()
    } else if x > Q::one() {
        Q::one()
    } else {
        x
    }
}

fn scaled(x: Q, level: u64) -> Q {
    clamp01(x.abs() / Q::from_integer(level.into()))
}

/// Connectives shared by both evaluators.
fn combine(f: &Formula, a: Q, b: impl FnOnce() -> Result<Q, LogicError>) -> Result<Q, LogicError> {
    Ok(match f {
        Formula::Min(..) => a.min(b()?),
        Formula::Max(..) => a.max(b()?),
        Formula::PlusTrunc(..) => clamp01(a + b()?),
        Formula::MinusTrunc(..) => clamp01(a - b()?),
        _ => unreachable!("binary connective"),
    })
}

/// Fold a quantifier's values, stopping once the extreme truth value is reached.
fn quantify(is_sup: bool, values: impl Iterator<Item = Result<Q, LogicError>>) -> Result<Q, LogicError> {
    let (mut acc, stop) = if is_sup { (Q::zero(), Q::one()) } else { (Q::one(), Q::zero()) };
    for v in values {
        let v = v?;
        acc = if is_sup { acc.max(v) } else { acc.min(v) };
        if acc == stop {
            break;
        }
    }
    Ok(acc)
}

struct Binding {
    name: String,
    residue: Residue,
    bounds: HeightBounds,
}

struct Finite<'a> {
    q: &'a Modulus,
    l: u64,
    mode: EvalMode,
    budget: usize,
    sorts: HashMap<u64, Rc<Vec<SortElement>>>,
    rng: Option<ChaCha8Rng>,
    env: Vec<Binding>,
}

impl Finite<'_> {
    fn sort(&mut self, level: u64) -> Result<Rc<Vec<SortElement>>, LogicError> {
        if !self.sorts.contains_key(&level) {
            let s = LocalityScale::new(self.l, level)?;
            let els = enumerate_sort(&s, self.q, Some(self.budget))?;
            self.sorts.insert(level, Rc::new(els));
        }
        Ok(Rc::clone(&self.sorts[&level]))
    }

    /// Residue value and numerator/denominator bounds of the decoded value;
    /// `None` bounds mean they overflowed.
    fn term(&self, t: &Term) -> Result<(Residue, Option<HeightBounds>), LogicError> {
        Ok(match t {
            Term::Var(v) => {
                let b = self.env.iter().rev().find(|b| &b.name == v).ok_or_else(|| LogicError::UnboundVariable {
                    name: v.clone(),
                    line: 0,
                    column: 0,
                })?;
                (b.residue, Some(b.bounds))
            }
            Term::Int(n) => (self.q.reduce(*n as i128), Some(HeightBounds::of_rational(&BoundedRational::integer(*n)))),
            Term::Rat(r) => (encode(r, self.q)?, Some(HeightBounds::of_rational(r))),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
                let (x, bx) = self.term(a)?;
                let (y, by) = self.term(b)?;
                let both = bx.zip(by);
                match t {
                    Term::Add(..) => (x.add(&y)?, both.and_then(|(p, q)| p.add(&q))),
                    Term::Sub(..) => (x.sub(&y)?, both.and_then(|(p, q)| p.add(&q))),
                    _ => (x.mul(&y)?, both.and_then(|(p, q)| p.mul(&q))),
                }
            }
        })
    }

    /// Decode a term value; `Ok(None)` when it cannot be read back.
    fn decoded(&self, z: &Residue, bounds: Option<HeightBounds>) -> Result<Option<BoundedRational>, LogicError> {
        let Some(b) = bounds else { return Ok(None) };
        Ok(reconstruct(z, b.num, b.den)?.local())
    }

    fn eval(&mut self, f: &Formula) -> Result<Q, LogicError> {
        match f {
            Formula::Const(c) => Ok(c.to_q()),
            Formula::Dist { level, lhs, rhs } => {
                let (x, bx) = self.term(lhs)?;
                let (y, by) = self.term(rhs)?;
                let bounds = bx.zip(by).and_then(|(p, q)| p.add(&q));
                match self.decoded(&x.sub(&y)?, bounds)? {
                    Some(d) => Ok(scaled(d.to_q(), *level)),
                    None => Err(LogicError::TermEscapesSorts(format!("({lhs} - {rhs})"))),
                }
            }
            Formula::ZeroPred { level, term } => {
                let (z, b) = self.term(term)?;
                let fits = b.is_some_and(|b| b.fits(self.q));
                match if fits { self.decoded(&z, b)? } else { None } {
                    Some(v) => Ok(scaled(v.to_q(), *level)),
                    None => Ok(Q::one()),
                }
            }
            Formula::Neg(a) => Ok(Q::one() - self.eval(a)?),
            Formula::Min(a, b) | Formula::Max(a, b) | Formula::PlusTrunc(a, b) | Formula::MinusTrunc(a, b) => {
                let x = self.eval(a)?;
                combine(f, x, || self.eval(b))
            }
            Formula::Sup { var, level, body } | Formula::Inf { var, level, body } => {
                let is_sup = matches!(f, Formula::Sup { .. });
                let scale = LocalityScale::new(self.l, *level)?;
                let bounds = HeightBounds::of_scale(&scale);
                let sort = self.sort(*level)?;
                let domain = match self.mode {
                    EvalMode::Exhaustive => sort,
                    EvalMode::Sampled { count, .. } => {
                        let rng = self.rng.as_mut().expect("sampled mode has a generator");
                        Rc::new((0..count).map(|_| sort[rng.gen_range(0..sort.len())]).collect())
                    }
                };
                let values = domain.iter().map(|e| {
                    self.env.push(Binding { name: var.clone(), residue: e.residue, bounds });
                    let v = self.eval(body);
                    self.env.pop();
                    v
                });
                quantify(is_sup, values)
            }
        }
    }
}

/// Evaluate over `F_q`, quantifier `S_k` ranging over the sort at scale
/// `(l, k)`.
///
/// Term values carry numerator/denominator bounds through `+`, `-`, `*`;
/// `Dist` decodes the difference under those bounds, so its value is the
/// exact rational distance whenever the window `2 N D < q` holds.
pub fn eval_finite(f: &Formula, q: &Modulus, l: u64, mode: EvalMode) -> Result<Q, LogicError> {
    eval_finite_with_budget(f, q, l, mode, DEFAULT_BUDGET)
}

pub fn eval_finite_with_budget(f: &Formula, q: &Modulus, l: u64, mode: EvalMode, budget: usize) -> Result<Q, LogicError> {
    let rng = match mode {
        EvalMode::Sampled { seed, .. } => Some(ChaCha8Rng::seed_from_u64(seed)),
        EvalMode::Exhaustive => None,
    };
    let mut ev = Finite { q, l, mode, budget, sorts: HashMap::new(), rng, env: Vec::new() };
    ev.eval(f)
}

struct Limit {
    h: u64,
    budget: usize,
    domains: HashMap<u64, Rc<Vec<Q>>>,
    env: Vec<(String, Q)>,
}

impl Limit {
    fn term(&self, t: &Term) -> Result<Q, LogicError> {
        Ok(match t {
            Term::Var(v) => self
                .env
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|(_, x)| x.clone())
                .ok_or_else(|| LogicError::UnboundVariable { name: v.clone(), line: 0, column: 0 })?,
            Term::Int(n) => Q::from_integer((*n).into()),
            Term::Rat(r) => r.to_q(),
            Term::Add(a, b) => self.term(a)? + self.term(b)?,
            Term::Sub(a, b) => self.term(a)? - self.term(b)?,
            Term::Mul(a, b) => self.term(a)? * self.term(b)?,
        })
    }

    fn eval(&mut self, f: &Formula) -> Result<Q, LogicError> {
        match f {
            Formula::Const(c) => Ok(c.to_q()),
            Formula::Dist { level, lhs, rhs } => Ok(scaled(self.term(lhs)? - self.term(rhs)?, *level)),
            Formula::ZeroPred { level, term } => Ok(scaled(self.term(term)?, *level)),
            Formula::Neg(a) => Ok(Q::one() - self.eval(a)?),
            Formula::Min(a, b) | Formula::Max(a, b) | Formula::PlusTrunc(a, b) | Formula::MinusTrunc(a, b) => {
                let x = self.eval(a)?;
                combine(f, x, || self.eval(b))
            }
            Formula::Sup { var, level, body } | Formula::Inf { var, level, body } => {
                let is_sup = matches!(f, Formula::Sup { .. });
                if !self.domains.contains_key(level) {
                    let d = rationals_within(self.h, *level, Some(self.budget))?;
                    self.domains.insert(*level, Rc::new(d.iter().map(|r| r.to_q()).collect()));
                }
                let domain = Rc::clone(&self.domains[level]);
                let values = domain.iter().map(|x| {
                    self.env.push((var.clone(), x.clone()));
                    let v = self.eval(body);
                    self.env.pop();
                    v
                });
                quantify(is_sup, values)
            }
        }
    }
}

/// Evaluate over exact rationals: `S_k` ranges over reduced rationals with
/// height at most `h` and absolute value at most `k`.
pub fn eval_limit(f: &Formula, h: HeightBound) -> Result<Q, LogicError> {
    eval_limit_with_budget(f, h, DEFAULT_BUDGET)
}

pub fn eval_limit_with_budget(f: &Formula, h: HeightBound, budget: usize) -> Result<Q, LogicError> {
    Limit { h: h.get(), budget, domains: HashMap::new(), env: Vec::new() }.eval(f)
}

#[cfg(test)]
mod tests {
    use super::super::parse_formula;
    use super::*;
    use crate::metric::MetricError;
    use crate::rational::q_frac;

    fn f(text: &str) -> Formula {
        parse_formula(text).unwrap()
    }

    fn field(q: u64) -> Modulus {
        Modulus::field(q).unwrap()
    }

    fn h(x: u64) -> HeightBound {
        HeightBound::new(x).unwrap()
    }

    #[test]
    fn distance_to_self_is_zero() {
        let v = eval_finite(&f("inf x:S1 . d1(x,x)"), &field(331), 3, EvalMode::Exhaustive).unwrap();
        assert_eq!(v, Q::zero());
    }

    /// Brute-force `sup_x inf_y min(1, |y^2 - x| / 2)` over the sort.
    fn square_oracle(l: u64) -> Q {
        let s = LocalityScale::new(l, 1).unwrap();
        let els: Vec<Q> = crate::metric::sort_rationals(&s, None).unwrap().iter().map(|r| r.to_q()).collect();
        let mut best = Q::zero();
        for x in &els {
            let mut inner = Q::one();
            for y in &els {
                let d = scaled(y * y - x, 2);
                if d < inner {
                    inner = d;
                }
            }
            if inner > best {
                best = inner;
            }
        }
        best
    }

    #[test]
    fn sup_inf_square_is_one_half() {
        let form = f("sup x:S1 . inf y:S1 . d2((y*y), x)");
        for l in [2, 3, 4] {
            let v = eval_finite(&form, &field(1_000_003), l, EvalMode::Exhaustive).unwrap();
            assert_eq!(v, q_frac(1, 2));
            assert_eq!(v, square_oracle(l));
        }
        for hh in [1, 2, 5] {
            assert_eq!(eval_limit(&form, h(hh)).unwrap(), q_frac(1, 2));
        }
    }

    #[test]
    fn limit_examples() {
        assert_eq!(eval_limit(&f("inf x:S1 . d1(x, 1/3)"), h(3)).unwrap(), Q::zero());
        assert_eq!(eval_limit(&f("inf x:S1 . d1(x, 1/3)"), h(2)).unwrap(), q_frac(1, 6));
        assert_eq!(eval_limit(&f("2/7"), h(1)).unwrap(), q_frac(2, 7));
    }

    #[test]
    fn connectives() {
        let q = field(101);
        let cases = [
            ("neg(1/3)", q_frac(2, 3)),
            ("min(1/3, 1/2)", q_frac(1, 3)),
            ("max(1/3, 1/2)", q_frac(1, 2)),
            ("plus(2/3, 1/2)", Q::one()),
            ("minus(1/3, 1/2)", Q::zero()),
            ("minus(1/2, 1/3)", q_frac(1, 6)),
            ("d4(3, 1/2)", q_frac(5, 8)),
            ("d1(3, -3)", Q::one()),
            ("zero2((1/2 - 1))", q_frac(1, 4)),
        ];
        for (text, want) in cases {
            assert_eq!(eval_finite(&f(text), &q, 2, EvalMode::Exhaustive).unwrap(), want, "{text}");
            assert_eq!(eval_limit(&f(text), h(1)).unwrap(), want, "{text}");
        }
    }

    #[test]
    fn escaping_terms() {
        let q = field(101);
        // (x*x*x*x) at L = 3 has bounds 81/81: 2*81*81 > 101.
        let form = f("sup x:S1 . d1((((x*x)*x)*x), 0)");
        assert!(matches!(
            eval_finite(&form, &q, 3, EvalMode::Exhaustive),
            Err(LogicError::Metric(MetricError::ScaleTooLargeForModulus { .. }))
        ));
        let form = f("sup x:S1 . zero1((((x*x)*x)*x))");
        assert_eq!(eval_finite(&form, &q, 3, EvalMode::Exhaustive).unwrap(), Q::one());
        let form = f("sup x:S1 . d1(x, 0)");
        assert!(matches!(
            eval_finite(&form, &q, 8, EvalMode::Exhaustive),
            Err(LogicError::Metric(MetricError::ScaleTooLargeForModulus { .. }))
        ));
    }

    #[test]
    fn sampled_bounds_exhaustive() {
        let q = field(1_000_003);
        for text in ["sup x:S1 . inf y:S1 . d2((y*y), x)", "sup x:S2 . d2(x, 1/3)", "inf x:S1 . d1((x*x), 1/2)"] {
            let form = f(text);
            let exact = eval_finite(&form, &q, 5, EvalMode::Exhaustive).unwrap();
            let sampled = eval_finite(&form, &q, 5, EvalMode::Sampled { count: 7, seed: 1 }).unwrap();
            let again = eval_finite(&form, &q, 5, EvalMode::Sampled { count: 7, seed: 1 }).unwrap();
            assert_eq!(sampled, again);
            if text.starts_with("sup x:S2") {
                assert!(sampled <= exact);
            } else if text.starts_with("inf") {
                assert!(sampled >= exact);
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let form = f("sup x:S1 . d1(x, 0)");
        assert!(matches!(
            eval_finite_with_budget(&form, &field(1_000_003), 100, EvalMode::Exhaustive, 100),
            Err(LogicError::EnumerationBudgetExceeded(100))
        ));
        assert!(matches!(
            eval_limit_with_budget(&form, h(100), 100),
            Err(LogicError::EnumerationBudgetExceeded(100))
        ));
    }
}
