//! Branch-and-bound certificates: a problem section followed by a list of
//! derived inequalities, each justified by aggregation (`lin`), aggregation
//! with rounding (`rnd`), a branching assumption (`asm`), or resolution of a
//! disjunction (`uns`).
//!
//! The checker only adds, multiplies, and compares rationals. Assumption sets
//! are recomputed from the rule structure and never read from the file.

mod check;
mod input;
mod parse;
mod write;

use std::fmt;

use crate::modelgen::{LinearConstraint, Problem};
use crate::rational::Rational;

pub use check::{check_certificate, Refutation, Verdict};
pub use input::{compare_problems, rebuild_problem, verify_input, InputVerdict};
pub use parse::{parse_certificate, parse_certificate_with_lines, parse_problem, LineMap, ParseError, ParseErrorKind};
pub use write::write_certificate;

/// Reference to a constraint usable in an aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ref {
    /// Row `i` of the problem section.
    Con(usize),
    /// `x_j >= lb_j`.
    Lb(usize),
    /// `x_j <= ub_j`.
    Ub(usize),
    /// An earlier derivation.
    Der(usize),
}

impl fmt::Display for Ref {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ref::Con(i) => write!(f, "C{i}"),
            Ref::Lb(j) => write!(f, "LB{j}"),
            Ref::Ub(j) => write!(f, "UB{j}"),
            Ref::Der(i) => write!(f, "D{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    Asm,
    Lin(Vec<(Ref, Rational)>),
    Rnd(Vec<(Ref, Rational)>),
    /// Resolves the assumptions `a1` (used by `r1`) and `a2` (used by `r2`).
    Uns { r1: Ref, a1: Ref, r2: Ref, a2: Ref },
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Asm => "asm",
            Rule::Lin(_) => "lin",
            Rule::Rnd(_) => "rnd",
            Rule::Uns { .. } => "uns",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub stated: LinearConstraint,
    pub rule: Rule,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Goal {
    Infeasible,
    /// `lb <= optimum <= ub`.
    Range(Rational, Rational),
}

/// Sparse assignment; omitted variables are zero.
pub type Solution = Vec<(usize, Rational)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub problem: Problem,
    pub goal: Goal,
    pub solutions: Vec<Solution>,
    pub derivations: Vec<Derivation>,
}

impl Certificate {
    pub fn dense_solution(&self, i: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.problem.variables.len()];
        for (j, v) in &self.solutions[i] {
            x[*j] = v.clone();
        }
        x
    }
}
