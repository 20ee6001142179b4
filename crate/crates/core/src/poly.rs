//! Multivariate integer polynomials and the `vars:` text format for
//! polynomial systems.
//!
//! ```text
//! # unit circle
//! vars: x y
//! x^2 + y^2 - 1
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::rational::Q;
use crate::residue::{Modulus, Residue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: undeclared variable {name:?}")]
    UndeclaredVariable { line: usize, name: String },
    #[error("missing `vars:` header line")]
    MissingHeader,
    #[error("coefficient overflow on line {0}")]
    Overflow(usize),
}

/// Exponent vector (one slot per declared variable) to coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, i64>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    /// Build from `(coefficient, exponents)` pairs; like terms are merged
    /// and zero coefficients dropped.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (i64, Vec<u32>)>) -> Option<Self> {
        let mut p = Polynomial::zero(nvars);
        for (c, e) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            let slot = p.terms.entry(e).or_insert(0);
            *slot = slot.checked_add(c)?;
        }
        p.terms.retain(|_, c| *c != 0);
        Some(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, i64)> {
        self.terms.iter().map(|(e, c)| (e, *c))
    }

    /// Highest exponent of each variable.
    pub fn max_degrees(&self) -> Vec<u32> {
        let mut out = vec![0; self.nvars];
        for e in self.terms.keys() {
            for (o, &d) in out.iter_mut().zip(e) {
                *o = (*o).max(d);
            }
        }
        out
    }

    pub fn eval_q(&self, point: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (e, &c) in &self.terms {
            let mut t = Q::from_integer(BigInt::from(c));
            for (x, &d) in point.iter().zip(e) {
                for _ in 0..d {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_residue(&self, modulus: &Modulus, point: &[Residue]) -> Residue {
        let mut acc = modulus.zero();
        for (e, &c) in &self.terms {
            let mut t = modulus.reduce(c as i128);
            for (x, &d) in point.iter().zip(e) {
                t = t.mul(&x.pow(d as u64)).expect("point lives over the same modulus");
            }
            acc = acc.add(&t).expect("same modulus");
        }
        acc
    }

    /// Bound on `|P(x) - P(y)| / max_i |x_i - y_i|` over the box `[-r, r]^n`.
    pub fn lipschitz_bound(&self, r: &Q) -> Q {
        let mut acc = Q::zero();
        for (e, &c) in &self.terms {
            let deg: u32 = e.iter().sum();
            if deg == 0 {
                continue;
            }
            let mut t = Q::from_integer(BigInt::from(c).abs() * BigInt::from(deg));
            for _ in 1..deg {
                t *= r;
            }
            acc += t;
        }
        acc
    }

    /// Bounds `(numerator, denominator)` on `P(x)` written over the common
    /// denominator `prod_i den(x_i)^{maxdeg_i}`, when every coordinate has
    /// `|num| <= height` and `den <= height`.
    pub fn value_height_bounds(&self, height: u64) -> (BigInt, BigInt) {
        let total: u32 = self.max_degrees().iter().sum();
        let scale = BigInt::from(height).pow(total);
        let coeffs: BigInt = self.terms.values().map(|&c| BigInt::from(c).abs()).sum();
        (coeffs * &scale, scale)
    }

    pub fn display_with<'a>(&'a self, vars: &'a [String]) -> impl fmt::Display + 'a {
        PolyDisplay { poly: self, vars }
    }
}

struct PolyDisplay<'a> {
    poly: &'a Polynomial,
    vars: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.terms.is_empty() {
            return write!(f, "0");
        }
        // Highest total degree first.
        let mut terms: Vec<_> = self.poly.terms.iter().collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        for (i, (e, &c)) in terms.into_iter().enumerate() {
            let sign = if c < 0 { "-" } else { "+" };
            if i == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.unsigned_abs();
            let factors: Vec<String> = e
                .iter()
                .zip(self.vars)
                .filter(|(&d, _)| d > 0)
                .map(|(&d, v)| if d == 1 { v.clone() } else { format!("{v}^{d}") })
                .collect();
            if factors.is_empty() {
                write!(f, "{mag}")?;
            } else if mag == 1 {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{mag}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// A list of polynomials over named variables, defining an affine variety.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySystem {
    pub vars: Vec<String>,
    pub polys: Vec<Polynomial>,
}

impl PolySystem {
    pub fn new(vars: Vec<String>, polys: Vec<Polynomial>) -> Self {
        PolySystem { vars, polys }
    }

    /// Parse one polynomial line against a fixed variable list.
    pub fn parse_poly(vars: &[String], text: &str, line: usize) -> Result<Polynomial, PolyError> {
        let syntax = |message: String| PolyError::Syntax { line, message };
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(syntax("empty polynomial".into()));
        }
        let mut terms = Vec::new();
        let mut rest = cleaned.as_str();
        let mut first = true;
        while !rest.is_empty() {
            let mut sign = 1i64;
            if let Some(r) = rest.strip_prefix('+') {
                rest = r;
            } else if let Some(r) = rest.strip_prefix('-') {
                sign = -1;
                rest = r;
            } else if !first {
                return Err(syntax(format!("expected '+' or '-' before {rest:?}")));
            }
            first = false;
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let (monomial, tail) = rest.split_at(end);
            rest = tail;
            if monomial.is_empty() {
                return Err(syntax("dangling sign".into()));
            }
            let mut coeff = sign;
            let mut exps = vec![0u32; vars.len()];
            for factor in monomial.split('*') {
                if factor.is_empty() {
                    return Err(syntax(format!("empty factor in {monomial:?}")));
                }
                if factor.chars().all(|c| c.is_ascii_digit()) {
                    let v: i64 = factor.parse().map_err(|_| PolyError::Overflow(line))?;
                    coeff = coeff.checked_mul(v).ok_or(PolyError::Overflow(line))?;
                    continue;
                }
                let (name, exp) = match factor.split_once('^') {
                    Some((n, e)) => {
                        let e: u32 = e.parse().map_err(|_| syntax(format!("bad exponent in {factor:?}")))?;
                        (n, e)
                    }
                    None => (factor, 1),
                };
                if !name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                    || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                {
                    return Err(syntax(format!("bad factor {factor:?}")));
                }
                let idx = vars.iter().position(|v| v == name).ok_or_else(|| PolyError::UndeclaredVariable {
                    line,
                    name: name.to_string(),
                })?;
                exps[idx] += exp;
            }
            terms.push((coeff, exps));
        }
        Polynomial::from_terms(vars.len(), terms).ok_or(PolyError::Overflow(line))
    }
}

impl FromStr for PolySystem {
    type Err = PolyError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut vars: Option<Vec<String>> = None;
        let mut polys = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match &vars {
                None => {
                    let list = line.strip_prefix("vars:").ok_or(PolyError::MissingHeader)?;
                    let names: Vec<String> = list.split_whitespace().map(str::to_string).collect();
                    if names.is_empty() {
                        return Err(PolyError::Syntax { line: line_no, message: "no variables declared".into() });
                    }
                    vars = Some(names);
                }
                Some(v) => polys.push(PolySystem::parse_poly(v, line, line_no)?),
            }
        }
        let vars = vars.ok_or(PolyError::MissingHeader)?;
        Ok(PolySystem { vars, polys })
    }
}

impl fmt::Display for PolySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars: {}", self.vars.join(" "))?;
        for p in &self.polys {
            writeln!(f, "{}", p.display_with(&self.vars))?;
        }
        Ok(())
    }
}
