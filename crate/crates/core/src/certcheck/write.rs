use std::fmt::Write;

use super::{Certificate, Goal, Rule};
use crate::modelgen::emit_problem;

/// Serializes a certificate in the canonical, bit-exact layout.
pub fn write_certificate(c: &Certificate) -> String {
    let mut out = emit_problem(&c.problem);
    match &c.goal {
        Goal::Infeasible => out.push_str("RTP infeas\n"),
        Goal::Range(lb, ub) => writeln!(out, "RTP range {lb} {ub}").unwrap(),
    }
    writeln!(out, "SOLS {}", c.solutions.len()).unwrap();
    for sol in &c.solutions {
        write!(out, "{}", sol.len()).unwrap();
        for (j, v) in sol {
            write!(out, " {j} {v}").unwrap();
        }
        out.push('\n');
    }
    writeln!(out, "DERS {}", c.derivations.len()).unwrap();
    for d in &c.derivations {
        let s = &d.stated;
        write!(out, "{} {} {} {}", s.label, s.sense.token(), s.rhs, s.terms.len()).unwrap();
        for (j, a) in &s.terms {
            write!(out, " {j} {a}").unwrap();
        }
        match &d.rule {
            Rule::Asm => out.push_str(" asm"),
            Rule::Lin(refs) | Rule::Rnd(refs) => {
                write!(out, " {} {}", d.rule.name(), refs.len()).unwrap();
                for (r, m) in refs {
                    write!(out, " {r} {m}").unwrap();
                }
            }
            Rule::Uns { r1, a1, r2, a2 } => write!(out, " uns {r1} {a1} {r2} {a2}").unwrap(),
        }
        out.push('\n');
    }
    out
}
