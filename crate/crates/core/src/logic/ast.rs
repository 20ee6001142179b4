use std::fmt;

use crate::rational::BoundedRational;

/// Ring terms over the field sort: no division.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Int(i64),
    Rat(BoundedRational),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
}

/// Continuous-logic formulas with values in `[0, 1]`, `0` meaning true.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(BoundedRational),
    Dist { level: u64, lhs: Term, rhs: Term },
    ZeroPred { level: u64, term: Term },
    Neg(Box<Formula>),
    Min(Box<Formula>, Box<Formula>),
    Max(Box<Formula>, Box<Formula>),
    PlusTrunc(Box<Formula>, Box<Formula>),
    MinusTrunc(Box<Formula>, Box<Formula>),
    Sup { var: String, level: u64, body: Box<Formula> },
    Inf { var: String, level: u64, body: Box<Formula> },
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(name.to_string())
    }

    pub fn add(a: Term, b: Term) -> Self {
        Term::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Term, b: Term) -> Self {
        Term::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Term, b: Term) -> Self {
        Term::Mul(Box::new(a), Box::new(b))
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Int(_) | Term::Rat(_) => 1,
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

impl Formula {
    pub fn dist(level: u64, lhs: Term, rhs: Term) -> Self {
        Formula::Dist { level, lhs, rhs }
    }

    pub fn sup(var: &str, level: u64, body: Formula) -> Self {
        Formula::Sup { var: var.to_string(), level, body: Box::new(body) }
    }

    pub fn inf(var: &str, level: u64, body: Formula) -> Self {
        Formula::Inf { var: var.to_string(), level, body: Box::new(body) }
    }

    /// Nesting depth, counting term nodes below atomic formulas.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Const(_) => 1,
            Formula::Dist { lhs, rhs, .. } => 1 + lhs.depth().max(rhs.depth()),
            Formula::ZeroPred { term, .. } => 1 + term.depth(),
            Formula::Neg(f) | Formula::Sup { body: f, .. } | Formula::Inf { body: f, .. } => 1 + f.depth(),
            Formula::Min(a, b) | Formula::Max(a, b) | Formula::PlusTrunc(a, b) | Formula::MinusTrunc(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    /// Largest sort level mentioned by a quantifier.
    pub fn max_quantifier_level(&self) -> Option<u64> {
        match self {
            Formula::Const(_) | Formula::Dist { .. } | Formula::ZeroPred { .. } => None,
            Formula::Neg(f) => f.max_quantifier_level(),
            Formula::Sup { level, body, .. } | Formula::Inf { level, body, .. } => {
                Some(body.max_quantifier_level().map_or(*level, |l| l.max(*level)))
            }
            Formula::Min(a, b) | Formula::Max(a, b) | Formula::PlusTrunc(a, b) | Formula::MinusTrunc(a, b) => {
                match (a.max_quantifier_level(), b.max_quantifier_level()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        self.max_quantifier_level().is_none()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Int(n) => write!(f, "{n}"),
            Term::Rat(r) => write!(f, "{r}"),
            Term::Add(a, b) => write!(f, "({a} + {b})"),
            Term::Sub(a, b) => write!(f, "({a} - {b})"),
            Term::Mul(a, b) => write!(f, "({a} * {b})"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Const(c) if c.denom() == 1 => write!(f, "{}", c.numer()),
            Formula::Const(c) => write!(f, "{c}"),
            Formula::Dist { level, lhs, rhs } => write!(f, "d{level}({lhs}, {rhs})"),
            Formula::ZeroPred { level, term } => write!(f, "zero{level}({term})"),
            Formula::Neg(a) => write!(f, "neg({a})"),
            Formula::Min(a, b) => write!(f, "min({a}, {b})"),
            Formula::Max(a, b) => write!(f, "max({a}, {b})"),
            Formula::PlusTrunc(a, b) => write!(f, "plus({a}, {b})"),
            Formula::MinusTrunc(a, b) => write!(f, "minus({a}, {b})"),
            Formula::Sup { var, level, body } => write!(f, "sup {var}:S{level} . {body}"),
            Formula::Inf { var, level, body } => write!(f, "inf {var}:S{level} . {body}"),
        }
    }
}
