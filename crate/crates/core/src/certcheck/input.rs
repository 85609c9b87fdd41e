//! Input verification: the problem section of a certificate is compared with
//! a model rebuilt here from the combinatorial definitions. Nothing in this
//! file calls the model generator's builders.

use std::fmt::Write;

use super::Certificate;
use crate::modelgen::{Form, LinearConstraint, ModelSpec, Problem, Sense, VarKind, Variable};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputVerdict {
    Match,
    Mismatch(String),
}

fn set_literal(bits: u32) -> String {
    let mut s = String::from("{");
    let mut first = true;
    for e in 0..32 {
        if bits >> e & 1 == 1 {
            if !first {
                s.push(',');
            }
            write!(s, "{}", e + 1).unwrap();
            first = false;
        }
    }
    s.push('}');
    s
}

fn int(v: i64) -> Rational {
    Rational::from_int(v)
}

/// Row with terms sorted by variable index.
fn row(label: String, sense: Sense, rhs: i64, mut terms: Vec<(usize, i64)>) -> LinearConstraint {
    terms.sort_unstable_by_key(|t| t.0);
    LinearConstraint { label, sense, rhs: int(rhs), terms: terms.into_iter().map(|(j, c)| (j, int(c))).collect() }
}

/// The problem a certificate for `spec` must contain.
pub fn rebuild_problem(spec: &ModelSpec) -> Result<Problem, String> {
    let n = spec.n;
    let min_n = if spec.form == Form::Red { 4 } else { 1 };
    if n < min_n || n > crate::setcore::MAX_N {
        return Err(format!("ground set size {n} is not supported for {}", spec.form));
    }
    let full: u32 = (1 << n) - 1;
    let sets = full as usize;
    let xi = |s: u32| s as usize - 1;
    let yi = |s: u32| sets + s as usize - 1;
    let zi = 2 * sets;

    let mut variables: Vec<Variable> = Vec::new();
    for prefix in ["x", "y"] {
        for s in 1..=full {
            variables.push(Variable {
                name: format!("{prefix}{}", set_literal(s)),
                kind: VarKind::Binary,
                lb: int(0),
                ub: Some(int(1)),
            });
        }
    }
    let with_z = spec.form != Form::Inf;
    if with_z {
        variables.push(Variable { name: "z".into(), kind: VarKind::Integer, lb: int(0), ub: None });
    }

    let objective: Vec<(usize, Rational)> = if with_z {
        (1..=full).map(|s| (yi(s), int(1))).chain([(zi, int(-1))]).collect()
    } else {
        (1..=full).map(|s| (xi(s), int(1))).collect()
    };

    let mut rows = Vec::new();
    let disjoint_pairs = |rows: &mut Vec<LinearConstraint>| {
        for t in 1..=full {
            for s in 1..=full {
                if t & s == 0 {
                    rows.push(row(format!("int{}{}", set_literal(t), set_literal(s)), Sense::Le, 1, vec![(yi(t), 1), (yi(s), 1)]));
                }
            }
        }
    };
    let star_x = |i: u32| (1..=full).filter(move |s| s >> i & 1 == 1).map(|s| (xi(s), 1i64));
    match spec.form {
        Form::Inf => {
            for t in 1..=full {
                for s in 1..=full {
                    if s != t && s & t == s {
                        rows.push(row(format!("down{}{}", set_literal(t), set_literal(s)), Sense::Le, 0, vec![(xi(t), 1), (xi(s), -1)]));
                    }
                }
            }
            disjoint_pairs(&mut rows);
            for s in 1..=full {
                rows.push(row(format!("cont{}", set_literal(s)), Sense::Le, 0, vec![(yi(s), 1), (xi(s), -1)]));
            }
            for i in 0..n as u32 {
                let terms = star_x(i).chain((1..=full).map(|s| (yi(s), -1))).collect();
                rows.push(row(format!("star{}", i + 1), Sense::Le, -1, terms));
            }
        }
        Form::Opt | Form::Red => {
            disjoint_pairs(&mut rows);
            for i in 0..n as u32 {
                let terms = star_x(i).chain([(zi, -1)]).collect();
                rows.push(row(format!("star{}", i + 1), Sense::Le, 0, terms));
            }
            for t in 1..=full {
                // every nonempty subset of t, in increasing code order
                for s in 1..=t {
                    if s & t == s {
                        rows.push(row(format!("gen{}{}", set_literal(t), set_literal(s)), Sense::Le, 0, vec![(yi(t), 1), (xi(s), -1)]));
                    }
                }
            }
            if spec.form == Form::Red {
                let terms = (1..=full).map(|s| (yi(s), 2)).chain((1..=full).map(|s| (xi(s), -1))).collect();
                rows.push(row("berge".into(), Sense::Le, 1, terms));
            }
        }
    }

    if spec.form == Form::Red {
        let mut fixed: Vec<Option<i64>> = vec![None; variables.len()];
        let level_k = spec.level.as_ref().map_or(0, |l| l.family.len());
        for s in 1..=full {
            let size = s.count_ones();
            if size <= 2 {
                fixed[yi(s)] = Some(0);
            }
            if size == 1 || (s & !0b1111 == 0 && level_k == 0) {
                fixed[xi(s)] = Some(1);
            }
        }
        if let Some(level) = &spec.level {
            let m = level.m as u32;
            if level.m < 4 || level.m + 1 > n || level.family.n() != n {
                return Err(format!("invalid level parameters m={} for n={n}", level.m));
            }
            if level.family.members().iter().any(|s| s.len() != level.m) {
                return Err(format!("level family members must have size {m}"));
            }
            for s in 1..=full {
                let size = s.count_ones();
                let want = if size == m {
                    Some(level.family.members().iter().any(|t| t.0 == s) as i64)
                } else if size > m && size < n as u32 {
                    Some(0)
                } else {
                    None
                };
                if let Some(v) = want {
                    if fixed[xi(s)].is_some_and(|old| old != v) {
                        return Err(format!("level fixing x{} = {v} conflicts with an earlier fixing", set_literal(s)));
                    }
                    fixed[xi(s)] = Some(v);
                }
            }
        }
        for (var, f) in variables.iter_mut().zip(fixed) {
            if let Some(v) = f {
                var.lb = int(v);
                var.ub = Some(int(v));
            }
        }
    }
    Ok(Problem { variables, objective, constraints: rows })
}

fn describe_terms(terms: &[(usize, Rational)], vars: &[Variable]) -> String {
    terms
        .iter()
        .map(|(j, c)| format!("{c}*{}", vars.get(*j).map_or("?", |v| v.name.as_str())))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// First difference between two rows, naming the column for coefficient errors.
fn row_difference(got: &LinearConstraint, want: &LinearConstraint, vars: &[Variable]) -> Option<String> {
    if got.label != want.label {
        return Some(format!("label `{}`, expected `{}`", got.label, want.label));
    }
    if got.sense != want.sense {
        return Some(format!("sense {}, expected {}", got.sense.token(), want.sense.token()));
    }
    if got.rhs != want.rhs {
        return Some(format!("rhs {}, expected {}", got.rhs, want.rhs));
    }
    if got.terms == want.terms {
        return None;
    }
    let col = |j: usize| vars.get(j).map_or(format!("column {j}"), |v| format!("column {j} ({})", v.name));
    let coef = |terms: &[(usize, Rational)], j: usize| {
        terms.iter().find(|t| t.0 == j).map_or_else(Rational::zero, |t| t.1.clone())
    };
    let mut cols: Vec<usize> = got.terms.iter().chain(&want.terms).map(|t| t.0).collect();
    cols.sort_unstable();
    cols.dedup();
    for j in cols {
        let (g, w) = (coef(&got.terms, j), coef(&want.terms, j));
        if g != w {
            return Some(format!("{} has coefficient {g}, expected {w}", col(j)));
        }
    }
    Some(format!("terms {}, expected {}", describe_terms(&got.terms, vars), describe_terms(&want.terms, vars)))
}

/// Compares a problem against the expected one: variable names and kinds,
/// the objective, every row in order, then bounds.
pub fn compare_problems(got: &Problem, want: &Problem) -> InputVerdict {
    let mismatch = |s: String| InputVerdict::Mismatch(s);
    if got.variables.len() != want.variables.len() {
        return mismatch(format!("{} variables, expected {}", got.variables.len(), want.variables.len()));
    }
    for (j, (g, w)) in got.variables.iter().zip(&want.variables).enumerate() {
        if g.name != w.name || g.kind != w.kind {
            return mismatch(format!("variable {j} is `{} {}`, expected `{} {}`", g.name, g.kind.token(), w.name, w.kind.token()));
        }
    }
    if got.objective != want.objective {
        return mismatch(format!(
            "objective {}, expected {}",
            describe_terms(&got.objective, &got.variables),
            describe_terms(&want.objective, &want.variables)
        ));
    }
    for (i, (g, w)) in got.constraints.iter().zip(&want.constraints).enumerate() {
        if let Some(d) = row_difference(g, w, &want.variables) {
            return mismatch(format!("row {i} `{}`: {d}", g.label));
        }
    }
    let common = got.constraints.len().min(want.constraints.len());
    if let Some(extra) = got.constraints.get(common) {
        return mismatch(format!(
            "row {common} `{}` is not part of the model ({} rows, expected {})",
            extra.label,
            got.constraints.len(),
            want.constraints.len()
        ));
    }
    if let Some(missing) = want.constraints.get(common) {
        return mismatch(format!(
            "row {common} `{}` is missing ({} rows, expected {})",
            missing.label,
            got.constraints.len(),
            want.constraints.len()
        ));
    }
    let show = |u: &Option<Rational>| u.as_ref().map_or("inf".to_string(), |v| v.to_string());
    for (j, (g, w)) in got.variables.iter().zip(&want.variables).enumerate() {
        if g.lb != w.lb || g.ub != w.ub {
            return mismatch(format!(
                "variable {j} `{}` has bounds [{}, {}], expected [{}, {}]",
                g.name,
                g.lb,
                show(&g.ub),
                w.lb,
                show(&w.ub)
            ));
        }
    }
    InputVerdict::Match
}

pub fn verify_input(c: &Certificate, spec: &ModelSpec) -> Result<InputVerdict, String> {
    Ok(compare_problems(&c.problem, &rebuild_problem(spec)?))
}
