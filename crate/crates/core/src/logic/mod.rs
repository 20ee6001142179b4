//! Continuous-logic formulas over the locality sorts: parsing, finite and
//! limit evaluation, and convergence scans along prime ladders.

mod ast;
mod eval;
pub mod gen;
mod parser;
mod scan;

use thiserror::Error;

use crate::metric::MetricError;
use crate::residue::ResidueError;

pub use ast::{Formula, Term};
pub use eval::{eval_finite, eval_finite_with_budget, eval_limit, eval_limit_with_budget, EvalMode, DEFAULT_BUDGET};
pub use parser::parse_formula;
pub use scan::{los_scan, required_modulus, PrimeLadder, ScanReport, ScanRow};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("parse error at line {line}, column {column}: expected {}, found {found}", expected.join(" or "))]
    Parse { line: usize, column: usize, expected: Vec<String>, found: String },
    #[error("unbound variable `{name}` at line {line}, column {column}")]
    UnboundVariable { name: String, line: usize, column: usize },
    #[error("variable `{name}` at line {line}, column {column} shadows an enclosing binder")]
    ShadowedVariable { name: String, line: usize, column: usize },
    #[error("malformed sort level at line {line}, column {column}: {text}")]
    MalformedLevel { line: usize, column: usize, text: String },
    #[error("constant {value} at line {line}, column {column} is outside [0, 1]")]
    ConstantOutOfRange { line: usize, column: usize, value: String },
    #[error("term {0} escapes every decodable sort")]
    TermEscapesSorts(String),
    #[error("enumeration exceeds the budget of {0} elements")]
    EnumerationBudgetExceeded(usize),
    #[error("invalid prime ladder: {0}")]
    InvalidLadder(String),
    #[error(transparent)]
    Metric(MetricError),
    #[error(transparent)]
    Residue(#[from] ResidueError),
}

impl From<MetricError> for LogicError {
    fn from(e: MetricError) -> Self {
        match e {
            MetricError::EnumerationBudgetExceeded(n) => LogicError::EnumerationBudgetExceeded(n),
            other => LogicError::Metric(other),
        }
    }
}
