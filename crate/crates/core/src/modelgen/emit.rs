use std::fmt::Write;

use super::{LinearConstraint, Model, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// Problem section of the certificate grammar.
    CertProblem,
    /// Commented, one constraint per line.
    Readable,
}

pub fn emit(model: &Model, format: Format) -> String {
    match format {
        Format::CertProblem => emit_problem(&model.problem),
        Format::Readable => emit_readable(model),
    }
}

fn push_terms(out: &mut String, terms: &[(usize, crate::Rational)]) {
    write!(out, "{}", terms.len()).unwrap();
    for (j, c) in terms {
        write!(out, " {j} {c}").unwrap();
    }
}

pub(crate) fn push_row(out: &mut String, c: &LinearConstraint) {
    write!(out, "{} {} {} ", c.label, c.sense.token(), c.rhs).unwrap();
    push_terms(out, &c.terms);
}

/// `CERT`, `VARS`, `OBJ`, and `CONS` sections, newline terminated.
pub fn emit_problem(p: &Problem) -> String {
    let mut out = String::with_capacity(64 * (p.variables.len() + p.constraints.len()));
    out.push_str("CERT 1\n");
    writeln!(out, "VARS {}", p.variables.len()).unwrap();
    for v in &p.variables {
        let ub = v.ub.as_ref().map_or_else(|| "inf".to_string(), |u| u.to_string());
        writeln!(out, "{} {} {} {}", v.name, v.kind.token(), v.lb, ub).unwrap();
    }
    out.push_str("OBJ max ");
    push_terms(&mut out, &p.objective);
    out.push('\n');
    writeln!(out, "CONS {}", p.constraints.len()).unwrap();
    for c in &p.constraints {
        push_row(&mut out, c);
        out.push('\n');
    }
    out
}

pub fn emit_readable(model: &Model) -> String {
    let p = &model.problem;
    let name = |j: usize| p.variables[j].name.as_str();
    let linear = |terms: &[(usize, crate::Rational)]| {
        if terms.is_empty() {
            return "0".to_string();
        }
        terms.iter().map(|(j, c)| format!("{c}*{}", name(*j))).collect::<Vec<_>>().join(" + ")
    };
    let mut out = String::new();
    writeln!(out, "# {} over [{}]", model.name, model.n).unwrap();
    writeln!(out, "# {} variables, {} constraints", p.variables.len(), p.constraints.len()).unwrap();
    writeln!(out, "maximize: {}", linear(&p.objective)).unwrap();
    out.push_str("# variables: name kind [lb, ub]\n");
    for v in &p.variables {
        let ub = v.ub.as_ref().map_or_else(|| "inf".to_string(), |u| u.to_string());
        writeln!(out, "{} {} [{}, {}]", v.name, v.kind.token(), v.lb, ub).unwrap();
    }
    out.push_str("# constraints\n");
    for c in &p.constraints {
        writeln!(out, "{}: {} {} {}", c.label, linear(&c.terms), c.sense.symbol(), c.rhs).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelgen::{build_opt, LinearConstraint, Sense};
    use crate::Rational;

    #[test]
    fn opt_one_problem_text() {
        let text = emit_problem(&build_opt(1).unwrap().problem);
        let expected = "CERT 1\nVARS 3\nx{1} bin 0 1\ny{1} bin 0 1\nz int 0 inf\nOBJ max 2 1 1 2 -1\nCONS 2\n\
                        star1 L 0 2 0 1 2 -1\ngen{1}{1} L 0 2 0 -1 1 1\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn rationals_print_reduced() {
        let c = LinearConstraint::new("r", Sense::Le, Rational::new(2, 4), vec![(0, Rational::new(6, 4))]);
        let mut s = String::new();
        push_row(&mut s, &c);
        assert_eq!(s, "r L 1/2 1 0 3/2");
    }

    #[test]
    fn readable_lists_rows() {
        let text = emit_readable(&build_opt(1).unwrap());
        assert!(text.contains("maximize: 1*y{1} + -1*z"));
        assert!(text.contains("star1: 1*x{1} + -1*z <= 0"));
        assert!(text.contains("z int [0, inf]"));
    }
}
