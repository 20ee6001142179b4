//! Random well-scoped formulas for property tests and fuzzing.

use rand::seq::SliceRandom;
use rand::Rng;

use super::ast::{Formula, Term};
use crate::rational::BoundedRational;

const VARS: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

fn term<R: Rng>(rng: &mut R, depth: usize, scope: &[&str]) -> Term {
    let leaf = depth <= 1 || rng.gen_bool(0.4);
    if leaf {
        return match (scope.is_empty(), rng.gen_range(0..3)) {
            (false, 0 | 1) => Term::var(scope.choose(rng).expect("nonempty")),
            (_, 2) => Term::Rat(BoundedRational::new(rng.gen_range(-3..=3), rng.gen_range(1..=3)).expect("nonzero den")),
            _ => Term::Int(rng.gen_range(-2..=2)),
        };
    }
    let a = term(rng, depth - 1, scope);
    let b = term(rng, depth - 1, scope);
    match rng.gen_range(0..3) {
        0 => Term::add(a, b),
        1 => Term::sub(a, b),
        _ => Term::mul(a, b),
    }
}

fn formula<R: Rng>(rng: &mut R, depth: usize, scope: &mut Vec<&'static str>) -> Formula {
    if depth <= 2 {
        return match rng.gen_range(0..4) {
            0 => Formula::Const(BoundedRational::new(rng.gen_range(0..=2), 2).expect("nonzero den")),
            1 => Formula::ZeroPred { level: rng.gen_range(1..=2), term: term(rng, depth - 1, scope) },
            _ => Formula::dist(rng.gen_range(1..=2), term(rng, depth - 1, scope), term(rng, depth - 1, scope)),
        };
    }
    let free: Vec<&'static str> = VARS.iter().copied().filter(|v| !scope.contains(v)).collect();
    let pick = rng.gen_range(0..7);
    if pick < 2 && !free.is_empty() {
        let var = *free.choose(rng).expect("nonempty");
        let level = rng.gen_range(1..=2);
        scope.push(var);
        let body = formula(rng, depth - 1, scope);
        scope.pop();
        return if pick == 0 { Formula::sup(var, level, body) } else { Formula::inf(var, level, body) };
    }
    let a = Box::new(formula(rng, depth - 1, scope));
    match pick {
        2 => Formula::Neg(a),
        3 => Formula::Min(a, Box::new(formula(rng, depth - 1, scope))),
        4 => Formula::Max(a, Box::new(formula(rng, depth - 1, scope))),
        5 => Formula::PlusTrunc(a, Box::new(formula(rng, depth - 1, scope))),
        _ => Formula::MinusTrunc(a, Box::new(formula(rng, depth - 1, scope))),
    }
}

/// A closed formula of depth at most `max_depth.max(2)`.
pub fn random_formula<R: Rng>(rng: &mut R, max_depth: usize) -> Formula {
    formula(rng, max_depth.max(2), &mut Vec::new())
}
