//! Integer programs whose infeasibility or zero optimum certifies the star
//! property for every downset over `[n]`.
//!
//! Variables are `x_S` (the downset), `y_S` (the intersecting family), and, in
//! the optimality-based forms, an integer `z` bounding every star. The empty
//! set carries no variable. Variable order is all `x_S` by ascending subset
//! code, then all `y_S`, then `z`.

mod emit;

use std::fmt;

use thiserror::Error;

use crate::rational::Rational;
use crate::setcore::{self, Family, SubsetCode};

pub use emit::{emit, emit_problem, emit_readable, Format};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("ground set size {n} outside {min}..=10 for {form}")]
    GroundSetSize { n: usize, min: usize, form: Form },
    #[error("level-fixing size m={m} outside 4..={max}")]
    LevelSize { m: usize, max: usize },
    #[error("member {set} of the fixing family does not have size {m}")]
    WrongMemberSize { set: SubsetCode, m: usize },
    #[error("fixing family is over [{got}] but the model is over [{want}]")]
    FamilyGround { got: usize, want: usize },
    #[error("fixing {var} = {new} conflicts with existing fixing {var} = {old}")]
    FixingConflict { var: String, old: Rational, new: Rational },
    #[error("level fixings apply only to RED models")]
    NotRed,
    #[error("partition cuts need 2 <= max_parts <= n, got {0}")]
    MaxParts(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn token(self) -> &'static str {
        match self {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Binary,
    Integer,
}

impl VarKind {
    pub fn token(self) -> &'static str {
        match self {
            VarKind::Binary => "bin",
            VarKind::Integer => "int",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lb: Rational,
    /// `None` is `+inf`.
    pub ub: Option<Rational>,
}

impl Variable {
    pub fn binary(name: impl Into<String>) -> Self {
        Variable { name: name.into(), kind: VarKind::Binary, lb: Rational::zero(), ub: Some(Rational::one()) }
    }

    pub fn is_fixed(&self) -> bool {
        self.ub.as_ref() == Some(&self.lb)
    }
}

/// A sparse row `Σ coef * var (sense) rhs`. Term indices are strictly
/// increasing and no coefficient is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub label: String,
    pub sense: Sense,
    pub rhs: Rational,
    pub terms: Vec<(usize, Rational)>,
}

impl LinearConstraint {
    /// Sorts terms, merges duplicates, and drops zeros.
    pub fn new(label: impl Into<String>, sense: Sense, rhs: Rational, terms: Vec<(usize, Rational)>) -> Self {
        LinearConstraint { label: label.into(), sense, rhs, terms: normalize_terms(terms) }
    }

    pub fn activity(&self, values: &[Rational]) -> Rational {
        self.terms.iter().map(|(j, c)| c * &values[*j]).sum()
    }

    pub fn is_satisfied(&self, values: &[Rational]) -> bool {
        let a = self.activity(values);
        match self.sense {
            Sense::Le => a <= self.rhs,
            Sense::Ge => a >= self.rhs,
            Sense::Eq => a == self.rhs,
        }
    }
}

pub fn normalize_terms(mut terms: Vec<(usize, Rational)>) -> Vec<(usize, Rational)> {
    terms.sort_by_key(|(j, _)| *j);
    let mut out: Vec<(usize, Rational)> = Vec::with_capacity(terms.len());
    for (j, c) in terms {
        match out.last_mut() {
            Some((k, acc)) if *k == j => *acc += c,
            _ => out.push((j, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

/// A maximization problem over bounded integer variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Problem {
    pub variables: Vec<Variable>,
    /// Maximized.
    pub objective: Vec<(usize, Rational)>,
    pub constraints: Vec<LinearConstraint>,
}

impl Problem {
    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn objective_value(&self, values: &[Rational]) -> Rational {
        self.objective.iter().map(|(j, c)| c * &values[*j]).sum()
    }

    /// Bounds, integrality, and every row, checked exactly.
    pub fn is_feasible(&self, values: &[Rational]) -> bool {
        values.len() == self.variables.len()
            && self.variables.iter().zip(values).all(|(v, x)| {
                x.is_integer() && *x >= v.lb && v.ub.as_ref().is_none_or(|u| x <= u)
            })
            && self.constraints.iter().all(|c| c.is_satisfied(values))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Form {
    Inf,
    Opt,
    Red,
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Form::Inf => "INF",
            Form::Opt => "OPT",
            Form::Red => "RED",
        })
    }
}

impl std::str::FromStr for Form {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "inf" => Ok(Form::Inf),
            "opt" => Ok(Form::Opt),
            "red" => Ok(Form::Red),
            _ => Err(format!("unknown formulation `{s}` (expected inf, opt, or red)")),
        }
    }
}

/// Role of a model variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarRole {
    X(SubsetCode),
    Y(SubsetCode),
    Z,
}

/// Which level-fixing scheme to layer onto RED(n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelFixing {
    pub m: usize,
    pub family: Family,
}

/// Everything needed to regenerate a model deterministically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSpec {
    pub form: Form,
    pub n: usize,
    pub level: Option<LevelFixing>,
}

impl ModelSpec {
    pub fn new(form: Form, n: usize) -> Self {
        ModelSpec { form, n, level: None }
    }

    pub fn with_level(mut self, m: usize, family: Family) -> Self {
        self.level = Some(LevelFixing { m, family });
        self
    }

    pub fn build(&self) -> Result<Model, ModelError> {
        let base = match self.form {
            Form::Inf => build_inf(self.n)?,
            Form::Opt => build_opt(self.n)?,
            Form::Red => build_red(self.n)?,
        };
        match &self.level {
            None => Ok(base),
            Some(_) if self.form != Form::Red => Err(ModelError::NotRed),
            Some(l) => apply_level_fixings(&base, l.m, &l.family),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub name: String,
    pub n: usize,
    pub form: Form,
    pub problem: Problem,
}

impl Model {
    fn num_sets(&self) -> usize {
        (1 << self.n) - 1
    }

    pub fn index_of(&self, role: VarRole) -> Option<usize> {
        let sets = self.num_sets();
        match role {
            VarRole::X(s) if !s.is_empty() && s.fits(self.n) => Some(s.0 as usize - 1),
            VarRole::Y(s) if !s.is_empty() && s.fits(self.n) => Some(sets + s.0 as usize - 1),
            VarRole::Z if self.form != Form::Inf => Some(2 * sets),
            _ => None,
        }
    }

    pub fn role_of(&self, index: usize) -> Option<VarRole> {
        let sets = self.num_sets();
        if index < sets {
            Some(VarRole::X(SubsetCode(index as u32 + 1)))
        } else if index < 2 * sets {
            Some(VarRole::Y(SubsetCode((index - sets) as u32 + 1)))
        } else if index == 2 * sets && self.form != Form::Inf {
            Some(VarRole::Z)
        } else {
            None
        }
    }

    pub fn x(&self, s: SubsetCode) -> usize {
        self.index_of(VarRole::X(s)).expect("x variable exists for nonempty in-range sets")
    }

    pub fn y(&self, s: SubsetCode) -> usize {
        self.index_of(VarRole::Y(s)).expect("y variable exists for nonempty in-range sets")
    }

    pub fn z(&self) -> Option<usize> {
        self.index_of(VarRole::Z)
    }

    /// Downset and intersecting family encoded by a 0/1 assignment.
    pub fn decode(&self, values: &[Rational]) -> (Family, Family) {
        let pick = |f: &dyn Fn(SubsetCode) -> usize| {
            setcore::nonempty_subsets(self.n).filter(|s| values[f(*s)].is_one()).collect::<Vec<_>>()
        };
        let x = Family::new(self.n, pick(&|s| self.x(s))).expect("codes are in range");
        let y = Family::new(self.n, pick(&|s| self.y(s))).expect("codes are in range");
        (x, y)
    }

    /// Appends constraints (e.g. partition cuts) after the existing rows.
    pub fn with_constraints(mut self, extra: Vec<LinearConstraint>) -> Self {
        self.problem.constraints.extend(extra);
        self
    }
}

pub fn var_name(role: VarRole) -> String {
    match role {
        VarRole::X(s) => format!("x{s}"),
        VarRole::Y(s) => format!("y{s}"),
        VarRole::Z => "z".to_string(),
    }
}

fn check_n(n: usize, min: usize, form: Form) -> Result<(), ModelError> {
    if n < min || n > setcore::MAX_N {
        return Err(ModelError::GroundSetSize { n, min, form });
    }
    Ok(())
}

fn skeleton(n: usize, form: Form, name: String) -> Model {
    let mut variables = Vec::new();
    for s in setcore::nonempty_subsets(n) {
        variables.push(Variable::binary(var_name(VarRole::X(s))));
    }
    for s in setcore::nonempty_subsets(n) {
        variables.push(Variable::binary(var_name(VarRole::Y(s))));
    }
    if form != Form::Inf {
        variables.push(Variable { name: "z".into(), kind: VarKind::Integer, lb: Rational::zero(), ub: None });
    }
    Model { name, n, form, problem: Problem { variables, objective: Vec::new(), constraints: Vec::new() } }
}

fn one() -> Rational {
    Rational::one()
}

fn minus_one() -> Rational {
    Rational::from_int(-1)
}

fn push(m: &mut Model, label: String, sense: Sense, rhs: Rational, terms: Vec<(usize, Rational)>) {
    m.problem.constraints.push(LinearConstraint::new(label, sense, rhs, terms));
}

/// `y_T + y_S <= 1` for every ordered pair of distinct disjoint nonempty sets.
fn add_intersecting(m: &mut Model) {
    let n = m.n;
    for t in setcore::nonempty_subsets(n) {
        for s in setcore::nonempty_subsets(n) {
            if !t.intersects(s) {
                let terms = vec![(m.y(t), one()), (m.y(s), one())];
                push(m, format!("int{t}{s}"), Sense::Le, one(), terms);
            }
        }
    }
}

/// Infeasibility-based formulation INF(n).
pub fn build_inf(n: usize) -> Result<Model, ModelError> {
    check_n(n, 1, Form::Inf)?;
    let mut m = skeleton(n, Form::Inf, format!("INF({n})"));
    m.problem.objective = setcore::nonempty_subsets(n).map(|s| (m.x(s), one())).collect();
    // downset: x_T <= x_S for nonempty S strictly inside T
    for t in setcore::nonempty_subsets(n) {
        for s in setcore::nonempty_subsets(n) {
            if s != t && s.is_subset_of(t) {
                let terms = vec![(m.x(t), one()), (m.x(s), minus_one())];
                push(&mut m, format!("down{t}{s}"), Sense::Le, Rational::zero(), terms);
            }
        }
    }
    add_intersecting(&mut m);
    for s in setcore::nonempty_subsets(n) {
        let terms = vec![(m.y(s), one()), (m.x(s), minus_one())];
        push(&mut m, format!("cont{s}"), Sense::Le, Rational::zero(), terms);
    }
    // star: Σ_{S∋i} x_S - Σ_S y_S <= -1
    for i in 1..=n {
        let mut terms: Vec<(usize, Rational)> =
            setcore::nonempty_subsets(n).filter(|s| s.contains(i)).map(|s| (m.x(s), one())).collect();
        terms.extend(setcore::nonempty_subsets(n).map(|s| (m.y(s), minus_one())));
        push(&mut m, format!("star{i}"), Sense::Le, minus_one(), terms);
    }
    Ok(m)
}

/// Optimality-based formulation OPT(n).
pub fn build_opt(n: usize) -> Result<Model, ModelError> {
    check_n(n, 1, Form::Opt)?;
    let mut m = skeleton(n, Form::Opt, format!("OPT({n})"));
    opt_body(&mut m);
    Ok(m)
}

fn opt_body(m: &mut Model) {
    let n = m.n;
    let z = m.z().expect("OPT and RED models carry z");
    let mut obj: Vec<(usize, Rational)> = setcore::nonempty_subsets(n).map(|s| (m.y(s), one())).collect();
    obj.push((z, minus_one()));
    m.problem.objective = obj;
    add_intersecting(m);
    for i in 1..=n {
        let mut terms: Vec<(usize, Rational)> =
            setcore::nonempty_subsets(n).filter(|s| s.contains(i)).map(|s| (m.x(s), one())).collect();
        terms.push((z, minus_one()));
        push(m, format!("star{i}"), Sense::Le, Rational::zero(), terms);
    }
    // generation: y_T <= x_S for nonempty S ⊆ T, S = T included
    for t in setcore::nonempty_subsets(n) {
        for s in setcore::nonempty_subsets(n) {
            if s.is_subset_of(t) {
                let terms = vec![(m.y(t), one()), (m.x(s), minus_one())];
                push(m, format!("gen{t}{s}"), Sense::Le, Rational::zero(), terms);
            }
        }
    }
}

/// Sets `lb = ub = value`, rejecting a conflicting earlier fixing.
fn fix(m: &mut Model, j: usize, value: Rational) -> Result<(), ModelError> {
    let var = &mut m.problem.variables[j];
    if var.is_fixed() && var.lb != value {
        return Err(ModelError::FixingConflict { var: var.name.clone(), old: var.lb.clone(), new: value });
    }
    var.lb = value.clone();
    var.ub = Some(value);
    Ok(())
}

fn four_set() -> SubsetCode {
    SubsetCode(0b1111)
}

/// OPT(n) strengthened by the Berge cut and the standard fixings.
pub fn build_red(n: usize) -> Result<Model, ModelError> {
    check_n(n, 4, Form::Red)?;
    let mut m = skeleton(n, Form::Red, format!("RED({n})"));
    opt_body(&mut m);
    // Berge cut 2|Y| <= |D|; D always contains the empty set, which has no
    // variable, so it contributes the 1 on the right
    let mut terms: Vec<(usize, Rational)> =
        setcore::nonempty_subsets(n).map(|s| (m.y(s), Rational::from_int(2))).collect();
    terms.extend(setcore::nonempty_subsets(n).map(|s| (m.x(s), minus_one())));
    push(&mut m, "berge".to_string(), Sense::Le, Rational::one(), terms);
    for s in setcore::nonempty_subsets(n) {
        let (xs, ys) = (m.x(s), m.y(s));
        if s.len() <= 2 {
            fix(&mut m, ys, Rational::zero())?;
        }
        if s.len() == 1 || s.is_subset_of(four_set()) {
            fix(&mut m, xs, Rational::one())?;
        }
    }
    Ok(m)
}

/// Layers the symmetry-partition fixings for level `m` onto a RED model.
///
/// `x_S` is fixed to 1 for members of `fix_family` and to 0 for the other
/// `m`-sets and for every set with `m < |S| <= n-1`. A nonempty family drops
/// the fixing of all subsets of `{1,2,3,4}` to one (singletons stay fixed).
pub fn apply_level_fixings(base: &Model, m: usize, fix_family: &Family) -> Result<Model, ModelError> {
    if base.form != Form::Red {
        return Err(ModelError::NotRed);
    }
    let n = base.n;
    if m < 4 || m + 1 > n {
        return Err(ModelError::LevelSize { m, max: n.saturating_sub(1) });
    }
    if fix_family.n() != n {
        return Err(ModelError::FamilyGround { got: fix_family.n(), want: n });
    }
    if let Some(bad) = fix_family.members().iter().find(|s| s.len() != m) {
        return Err(ModelError::WrongMemberSize { set: *bad, m });
    }
    let k = fix_family.len();
    let mut out = base.clone();
    if k >= 1 {
        for s in setcore::nonempty_subsets(n) {
            if s.is_subset_of(four_set()) && s.len() > 1 {
                let j = out.x(s);
                let var = &mut out.problem.variables[j];
                var.lb = Rational::zero();
                var.ub = Some(Rational::one());
            }
        }
    }
    for s in setcore::nonempty_subsets(n) {
        let j = out.x(s);
        if s.len() == m {
            let v = if fix_family.contains(s) { Rational::one() } else { Rational::zero() };
            fix(&mut out, j, v)?;
        } else if s.len() > m && s.len() < n {
            fix(&mut out, j, Rational::zero())?;
        }
    }
    out.name = if m + 1 == n { format!("RED({n})^{k}") } else { format!("RED({n})^{{{k},{m}}}") };
    if k > 0 {
        out.name.push_str(&format!("[{fix_family}]"));
    }
    Ok(out)
}

/// Set partitions of `[n]` into between 2 and `max_parts` blocks, as restricted
/// growth strings.
fn set_partitions(n: usize, max_parts: usize) -> Vec<Vec<SubsetCode>> {
    fn rec(i: usize, n: usize, max_parts: usize, blocks: &mut Vec<u32>, out: &mut Vec<Vec<SubsetCode>>) {
        if i == n {
            if blocks.len() >= 2 {
                out.push(blocks.iter().map(|&b| SubsetCode(b)).collect());
            }
            return;
        }
        for b in 0..blocks.len() {
            blocks[b] |= 1 << i;
            rec(i + 1, n, max_parts, blocks, out);
            blocks[b] &= !(1 << i);
        }
        if blocks.len() < max_parts {
            blocks.push(1 << i);
            rec(i + 1, n, max_parts, blocks, out);
            blocks.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, max_parts, &mut Vec::new(), &mut out);
    out
}

/// `Σ_{S ∈ P} y_S <= 1` for every partition `P` of `[n]` into 2..=max_parts blocks.
/// Indices follow the standard variable order of a model over `[n]`.
pub fn partition_cuts(n: usize, max_parts: usize) -> Result<Vec<LinearConstraint>, ModelError> {
    if max_parts < 2 || max_parts > n {
        return Err(ModelError::MaxParts(max_parts));
    }
    let sets = (1usize << n) - 1;
    Ok(set_partitions(n, max_parts)
        .into_iter()
        .map(|blocks| {
            let label: String = std::iter::once("part".to_string()).chain(blocks.iter().map(|b| b.to_string())).collect();
            let terms = blocks.iter().map(|b| (sets + b.0 as usize - 1, one())).collect();
            LinearConstraint::new(label, Sense::Le, one(), terms)
        })
        .collect())
}

/// Model sizes under the Table-style counting convention: `vars` counts every
/// variable; `ineqs` counts every emitted row plus one explicit `x_S <= 1` row
/// per unfixed `x` variable (the `y` upper bounds are the diagonal rows
/// `y_S <= x_S`). Fixed variables are reported separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelStats {
    pub vars: usize,
    pub ineqs: usize,
    pub fixings: usize,
    /// Unfixed variables excluding `z`.
    pub free_vars: usize,
}

impl fmt::Display for ModelStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vars={} ineqs={} fixings={} free_vars={}", self.vars, self.ineqs, self.fixings, self.free_vars)
    }
}

pub fn stats(model: &Model) -> ModelStats {
    let p = &model.problem;
    let sets = (1usize << model.n) - 1;
    let unfixed_x = (0..sets).filter(|&j| !p.variables[j].is_fixed()).count();
    let fixings = p.variables.iter().filter(|v| v.is_fixed()).count();
    let z = model.z().map_or(0, |_| 1);
    ModelStats {
        vars: p.variables.len(),
        ineqs: p.constraints.iter().filter(|c| c.sense != Sense::Eq).count() + unfixed_x,
        fixings,
        free_vars: p.variables.len() - fixings - z,
    }
}
