use std::collections::BTreeMap;
use std::fmt;

use super::parse::LineMap;
use super::{Certificate, Derivation, Goal, Ref, Rule};
use crate::modelgen::{Sense, VarKind};
use crate::rational::Rational;

/// Where a refutation was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Item {
    Solution(usize),
    Derivation(usize),
    Goal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refutation {
    pub item: Item,
    /// `sol`, `asm`, `lin`, `rnd`, `uns`, or `goal`.
    pub rule: &'static str,
    pub reason: String,
}

impl Refutation {
    /// Source line of the failing item; the canonical layout is assumed
    /// when no map is given.
    pub fn line(&self, map: Option<&LineMap>, c: &Certificate) -> usize {
        let (nv, nc, ns) = (c.problem.variables.len(), c.problem.constraints.len(), c.solutions.len());
        // CERT, VARS, v vars, OBJ, CONS, c rows, RTP, SOLS, s sols, DERS
        let goal = 5 + nv + nc;
        match (self.item, map) {
            (Item::Solution(i), Some(m)) => m.solutions[i],
            (Item::Derivation(i), Some(m)) => m.derivations[i],
            (Item::Goal, Some(m)) => m.goal,
            (Item::Solution(i), None) => goal + 2 + i,
            (Item::Derivation(i), None) => goal + 3 + ns + i,
            (Item::Goal, None) => goal,
        }
    }
}

impl fmt::Display for Refutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.item {
            Item::Solution(i) => format!("solution {i}"),
            Item::Derivation(i) => format!("derivation D{i}"),
            Item::Goal => "goal".to_string(),
        };
        write!(f, "{what} ({}): {}", self.rule, self.reason)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    Refuted(Refutation),
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified)
    }
}

/// A constraint as used during checking.
struct Row<'a> {
    sense: Sense,
    terms: std::borrow::Cow<'a, [(usize, Rational)]>,
    rhs: Rational,
}

fn is_contradiction(sense: Sense, terms: &[(usize, Rational)], rhs: &Rational) -> bool {
    terms.is_empty()
        && match sense {
            Sense::Le => rhs.is_negative(),
            Sense::Ge => rhs.is_positive(),
            Sense::Eq => !rhs.is_zero(),
        }
}

/// Whether `derived` implies `stated`: a contradiction implies anything;
/// otherwise coefficients must agree exactly and the rhs must dominate.
fn dominates(sense: Sense, terms: &[(usize, Rational)], rhs: &Rational, stated: &Derivation) -> Result<(), String> {
    if is_contradiction(sense, terms, rhs) {
        return Ok(());
    }
    let s = &stated.stated;
    if terms != s.terms.as_slice() {
        return Err("derived coefficients differ from the stated constraint".into());
    }
    let ok = match (s.sense, sense) {
        (Sense::Le, Sense::Le | Sense::Eq) => rhs <= &s.rhs,
        (Sense::Ge, Sense::Ge | Sense::Eq) => rhs >= &s.rhs,
        (Sense::Eq, Sense::Eq) => rhs == &s.rhs,
        _ => return Err(format!("a {} constraint cannot imply a {} constraint", sense.token(), s.sense.token())),
    };
    if ok {
        Ok(())
    } else {
        Err(format!("derived rhs {rhs} does not dominate stated rhs {}", s.rhs))
    }
}

fn union(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            out.push(b[j]);
            j += 1;
        } else {
            out.push(a[i]);
            i += 1;
            j += 1;
        }
    }
    out
}

struct Checker<'a> {
    c: &'a Certificate,
    /// Assumption sets of checked derivations, sorted.
    assumptions: Vec<Vec<u32>>,
}

impl<'a> Checker<'a> {
    fn resolve(&self, r: Ref, current: usize) -> Result<Row<'a>, String> {
        let p = &self.c.problem;
        let nv = p.variables.len();
        match r {
            Ref::Con(i) => p
                .constraints
                .get(i)
                .map(|c| Row { sense: c.sense, terms: (&c.terms[..]).into(), rhs: c.rhs.clone() })
                .ok_or_else(|| format!("{r} does not exist")),
            Ref::Lb(j) if j < nv => {
                Ok(Row { sense: Sense::Ge, terms: vec![(j, Rational::one())].into(), rhs: p.variables[j].lb.clone() })
            }
            Ref::Ub(j) if j < nv => match &p.variables[j].ub {
                Some(u) => Ok(Row { sense: Sense::Le, terms: vec![(j, Rational::one())].into(), rhs: u.clone() }),
                None => Err(format!("{r} refers to an infinite bound")),
            },
            Ref::Der(i) if i < current => {
                let s = &self.c.derivations[i].stated;
                Ok(Row { sense: s.sense, terms: (&s.terms[..]).into(), rhs: s.rhs.clone() })
            }
            _ => Err(format!("{r} is not an earlier constraint, bound, or derivation")),
        }
    }

    /// Aggregates `Σ mult · ref` in direction `dir`; the multiplier signs must
    /// keep every reference pointing the same way.
    fn aggregate(
        &self,
        refs: &[(Ref, Rational)],
        dir: Sense,
        current: usize,
    ) -> Result<(Vec<(usize, Rational)>, Rational, Vec<u32>), String> {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        let mut rhs = Rational::zero();
        let mut asm: Vec<u32> = Vec::new();
        for (r, mult) in refs {
            if mult.is_zero() {
                continue;
            }
            let row = self.resolve(*r, current)?;
            let ok = match (dir, row.sense) {
                (_, Sense::Eq) => true,
                (Sense::Eq, _) => false,
                (d, s) if d == s => mult.is_positive(),
                _ => mult.is_negative(),
            };
            if !ok {
                return Err(format!("multiplier {mult} on {r} ({}) has the wrong sign", row.sense.token()));
            }
            for (j, a) in row.terms.iter() {
                *acc.entry(*j).or_insert_with(Rational::zero) += mult * a;
            }
            rhs += mult * &row.rhs;
            if let Ref::Der(k) = r {
                asm = union(&asm, &self.assumptions[*k]);
            }
        }
        let terms = acc.into_iter().filter(|(_, a)| !a.is_zero()).collect();
        Ok((terms, rhs, asm))
    }

    /// The bound `x_j <= k` or `x_j >= k` stated by an assumption derivation.
    fn branch(&self, a: Ref, current: usize) -> Result<(usize, Sense, Rational), String> {
        let Ref::Der(k) = a else {
            return Err(format!("{a} is not an assumption"));
        };
        if k >= current || self.c.derivations[k].rule != Rule::Asm {
            return Err(format!("{a} is not an earlier assumption"));
        }
        let s = &self.c.derivations[k].stated;
        match s.terms.as_slice() {
            [(j, one)] if one.is_one() && s.sense != Sense::Eq && s.rhs.is_integer() => Ok((*j, s.sense, s.rhs.clone())),
            _ => Err(format!("{a} is not a single integral variable bound")),
        }
    }

    fn check_derivation(&self, i: usize) -> Result<Vec<u32>, String> {
        let d = &self.c.derivations[i];
        let nv = self.c.problem.variables.len();
        let s = &d.stated;
        if s.terms.iter().any(|(j, a)| *j >= nv || a.is_zero()) || s.terms.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err("stated constraint is not in normal form".into());
        }
        match &d.rule {
            Rule::Asm => Ok(vec![i as u32]),
            Rule::Lin(refs) => {
                let (terms, rhs, asm) = self.aggregate(refs, s.sense, i)?;
                dominates(s.sense, &terms, &rhs, d)?;
                Ok(asm)
            }
            Rule::Rnd(refs) => {
                if s.sense == Sense::Eq {
                    return Err("cannot round an equation".into());
                }
                let (terms, rhs, asm) = self.aggregate(refs, s.sense, i)?;
                if let Some((j, a)) = terms.iter().find(|(j, a)| {
                    !a.is_integer()
                        || !matches!(self.c.problem.variables[*j].kind, VarKind::Binary | VarKind::Integer)
                }) {
                    return Err(format!("coefficient {a} on variable {j} is not integral"));
                }
                let rounded = if s.sense == Sense::Le { rhs.floor() } else { rhs.ceil() };
                dominates(s.sense, &terms, &rounded, d)?;
                Ok(asm)
            }
            Rule::Uns { r1, a1, r2, a2 } => {
                let (j1, s1, k1) = self.branch(*a1, i)?;
                let (j2, s2, k2) = self.branch(*a2, i)?;
                let complementary = j1 == j2
                    && match (s1, s2) {
                        (Sense::Le, Sense::Ge) => k2 == &k1 + &Rational::one(),
                        (Sense::Ge, Sense::Le) => k1 == &k2 + &Rational::one(),
                        _ => false,
                    };
                if !complementary {
                    return Err(format!("{a1} and {a2} are not complementary bounds on one integer variable"));
                }
                if !matches!(self.c.problem.variables[j1].kind, VarKind::Binary | VarKind::Integer) {
                    return Err(format!("variable {j1} is not integer"));
                }
                let mut asm = Vec::new();
                for (r, a) in [(r1, a1), (r2, a2)] {
                    let row = self.resolve(*r, i)?;
                    dominates(row.sense, &row.terms, &row.rhs, d).map_err(|e| format!("{r}: {e}"))?;
                    let drop = match a {
                        Ref::Der(k) => *k as u32,
                        _ => unreachable!("branch() accepts derivation refs only"),
                    };
                    let own: Vec<u32> = match r {
                        Ref::Der(k) => self.assumptions[*k].iter().copied().filter(|&x| x != drop).collect(),
                        _ => Vec::new(),
                    };
                    asm = union(&asm, &own);
                }
                Ok(asm)
            }
        }
    }
}

/// Checks every solution, every derivation, and the goal, in that order;
/// the first failure is reported.
pub fn check_certificate(c: &Certificate) -> Verdict {
    let refute = |item, rule, reason: String| Verdict::Refuted(Refutation { item, rule, reason });
    let p = &c.problem;
    let nv = p.variables.len();
    for (i, sol) in c.solutions.iter().enumerate() {
        if sol.iter().any(|(j, _)| *j >= nv) || sol.windows(2).any(|w| w[0].0 >= w[1].0) {
            return refute(Item::Solution(i), "sol", "malformed assignment".into());
        }
        let x = c.dense_solution(i);
        for (j, v) in p.variables.iter().enumerate() {
            if !x[j].is_integer() || x[j] < v.lb || v.ub.as_ref().is_some_and(|u| x[j] > *u) {
                return refute(Item::Solution(i), "sol", format!("{} = {} violates its bounds or integrality", v.name, x[j]));
            }
        }
        if let Some(row) = p.constraints.iter().find(|r| !r.is_satisfied(&x)) {
            return refute(Item::Solution(i), "sol", format!("violates constraint {}", row.label));
        }
    }
    let mut checker = Checker { c, assumptions: Vec::with_capacity(c.derivations.len()) };
    for i in 0..c.derivations.len() {
        match checker.check_derivation(i) {
            Ok(asm) => checker.assumptions.push(asm),
            Err(reason) => return refute(Item::Derivation(i), c.derivations[i].rule.name(), reason),
        }
    }
    let Some(last) = c.derivations.last() else {
        return refute(Item::Goal, "goal", "no derivations".into());
    };
    if !checker.assumptions.last().unwrap().is_empty() {
        return refute(Item::Goal, "goal", "final derivation depends on assumptions".into());
    }
    let s = &last.stated;
    match &c.goal {
        Goal::Infeasible => {
            if !is_contradiction(s.sense, &s.terms, &s.rhs) {
                return refute(Item::Goal, "goal", "final derivation is not a contradiction".into());
            }
        }
        Goal::Range(lb, ub) => {
            let contradiction = is_contradiction(s.sense, &s.terms, &s.rhs);
            let bounds_objective = s.terms == p.objective
                && matches!(s.sense, Sense::Le | Sense::Eq)
                && s.rhs <= *ub;
            if !contradiction && !bounds_objective {
                return refute(Item::Goal, "goal", format!("final derivation does not prove objective <= {ub}"));
            }
            if !(0..c.solutions.len()).any(|i| p.objective_value(&c.dense_solution(i)) >= *lb) {
                return refute(Item::Goal, "goal", format!("no listed solution attains objective {lb}"));
            }
        }
    }
    Verdict::Verified
}
