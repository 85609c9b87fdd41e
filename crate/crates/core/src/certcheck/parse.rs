use std::collections::HashSet;

use thiserror::Error;

use super::{Certificate, Derivation, Goal, Ref, Rule, Solution};
use crate::modelgen::{LinearConstraint, Problem, Sense, VarKind, Variable};
use crate::rational::{ParseRationalError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Grammar(String),
    #[error("{what} index {index} out of range (limit {limit})")]
    IndexOutOfRange { what: &'static str, index: usize, limit: usize },
    #[error("rational literal {0} is not in lowest terms")]
    NotReduced(String),
    #[error("duplicate variable name {0}")]
    DuplicateName(String),
    #[error("section {section} declares {declared} entries but {found} are present")]
    CountMismatch { section: &'static str, declared: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    /// 1-based; 0 for end of input.
    pub line: usize,
    pub kind: ParseErrorKind,
}

/// Source line of every parsed item, 1-based.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LineMap {
    pub variables: Vec<usize>,
    pub objective: usize,
    pub constraints: Vec<usize>,
    pub goal: usize,
    pub solutions: Vec<usize>,
    pub derivations: Vec<usize>,
}

const KEYWORDS: [&str; 7] = ["CERT", "VARS", "OBJ", "CONS", "RTP", "SOLS", "DERS"];

struct Cursor<'a> {
    lines: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .filter_map(|(i, raw)| {
                let body = raw.split('#').next().unwrap_or("");
                let toks: Vec<&str> = body.split_whitespace().collect();
                (!toks.is_empty()).then_some((i + 1, toks))
            })
            .collect();
        Cursor { lines, pos: 0 }
    }

    fn peek(&self) -> Option<&(usize, Vec<&'a str>)> {
        self.lines.get(self.pos)
    }

    fn at_keyword(&self) -> bool {
        self.peek().is_some_and(|(_, t)| KEYWORDS.contains(&t[0]))
    }

    fn end_line(&self) -> usize {
        self.lines.last().map_or(0, |(l, _)| *l)
    }

    /// Header line `KEYWORD args...`.
    fn header(&mut self, keyword: &'static str) -> Result<(usize, Vec<&'a str>), ParseError> {
        match self.lines.get(self.pos) {
            Some((line, toks)) if toks[0] == keyword => {
                self.pos += 1;
                Ok((*line, toks[1..].to_vec()))
            }
            Some((line, toks)) => Err(grammar(*line, format!("expected {keyword} section, found `{}`", toks[0]))),
            None => Err(grammar(self.end_line(), format!("unexpected end of input, expected {keyword} section"))),
        }
    }

    /// The `declared` body lines of a section; a count mismatch is reported
    /// when a section keyword or the end of input arrives early, or when body
    /// lines continue past the declared count.
    fn body(&mut self, section: &'static str, declared: usize) -> Result<Vec<(usize, Vec<&'a str>)>, ParseError> {
        let mut out = Vec::with_capacity(declared);
        for found in 0..declared {
            if self.peek().is_none() || self.at_keyword() {
                let line = self.peek().map_or(self.end_line(), |(l, _)| *l);
                return Err(ParseError { line, kind: ParseErrorKind::CountMismatch { section, declared, found } });
            }
            out.push(self.lines[self.pos].clone());
            self.pos += 1;
        }
        if self.peek().is_some() && !self.at_keyword() {
            let line = self.peek().unwrap().0;
            let mut extra = 0;
            while self.peek().is_some() && !self.at_keyword() {
                extra += 1;
                self.pos += 1;
            }
            return Err(ParseError {
                line,
                kind: ParseErrorKind::CountMismatch { section, declared, found: declared + extra },
            });
        }
        Ok(out)
    }
}

fn grammar(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError { line, kind: ParseErrorKind::Grammar(msg.into()) }
}

fn rational(line: usize, tok: &str) -> Result<Rational, ParseError> {
    Rational::parse_reduced(tok).map_err(|e| match e {
        ParseRationalError::NotReduced(s) => ParseError { line, kind: ParseErrorKind::NotReduced(s) },
        other => grammar(line, other.to_string()),
    })
}

fn count(line: usize, tok: &str) -> Result<usize, ParseError> {
    match tok.parse::<usize>() {
        Ok(v) if v.to_string() == tok => Ok(v),
        _ => Err(grammar(line, format!("expected a count, found `{tok}`"))),
    }
}

fn index(line: usize, tok: &str, what: &'static str, limit: usize) -> Result<usize, ParseError> {
    let v = count(line, tok)?;
    if v >= limit {
        return Err(ParseError { line, kind: ParseErrorKind::IndexOutOfRange { what, index: v, limit } });
    }
    Ok(v)
}

fn arity(line: usize, toks: &[&str], want: usize, what: &str) -> Result<(), ParseError> {
    if toks.len() != want {
        return Err(grammar(line, format!("{what}: expected {want} tokens, found {}", toks.len())));
    }
    Ok(())
}

/// `<t> { <idx> <val> }*t` starting at `toks[0]`; returns the pairs and the rest.
fn sparse<'t>(
    line: usize,
    toks: &'t [&'t str],
    num_vars: usize,
) -> Result<(Vec<(usize, Rational)>, &'t [&'t str]), ParseError> {
    let t = count(line, toks.first().copied().unwrap_or(""))?;
    if toks.len() < 1 + 2 * t {
        return Err(grammar(line, format!("expected {t} index/value pairs")));
    }
    let mut out = Vec::with_capacity(t);
    for k in 0..t {
        let j = index(line, toks[1 + 2 * k], "variable", num_vars)?;
        let v = rational(line, toks[2 + 2 * k])?;
        if out.last().is_some_and(|(p, _): &(usize, Rational)| *p >= j) {
            return Err(grammar(line, "variable indices must be strictly increasing"));
        }
        out.push((j, v));
    }
    Ok((out, &toks[1 + 2 * t..]))
}

fn sense(line: usize, tok: &str) -> Result<Sense, ParseError> {
    match tok {
        "L" => Ok(Sense::Le),
        "G" => Ok(Sense::Ge),
        "E" => Ok(Sense::Eq),
        _ => Err(grammar(line, format!("expected sense L, G, or E, found `{tok}`"))),
    }
}

/// `<label> <sense> <rhs> <t> {<idx> <coef>}*t`; returns the rest.
fn constraint<'t>(
    line: usize,
    toks: &'t [&'t str],
    num_vars: usize,
) -> Result<(LinearConstraint, &'t [&'t str]), ParseError> {
    if toks.len() < 4 {
        return Err(grammar(line, "constraint needs label, sense, rhs, and a term count"));
    }
    let s = sense(line, toks[1])?;
    let rhs = rational(line, toks[2])?;
    let (terms, rest) = sparse(line, &toks[3..], num_vars)?;
    if terms.iter().any(|(_, c)| c.is_zero()) {
        return Err(grammar(line, "zero coefficients are not listed"));
    }
    Ok((LinearConstraint { label: toks[0].to_string(), sense: s, rhs, terms }, rest))
}

fn parse_problem_sections(cur: &mut Cursor<'_>, lines: &mut LineMap) -> Result<Problem, ParseError> {
    let (line, args) = cur.header("CERT")?;
    if args != ["1"] {
        return Err(grammar(line, "unsupported certificate version"));
    }
    let (line, args) = cur.header("VARS")?;
    arity(line, &args, 1, "VARS")?;
    let nv = count(line, args[0])?;
    let mut variables = Vec::with_capacity(nv);
    let mut names = HashSet::with_capacity(nv);
    for (line, toks) in cur.body("VARS", nv)? {
        arity(line, &toks, 4, "variable")?;
        if !names.insert(toks[0]) {
            return Err(ParseError { line, kind: ParseErrorKind::DuplicateName(toks[0].to_string()) });
        }
        let kind = match toks[1] {
            "bin" => VarKind::Binary,
            "int" => VarKind::Integer,
            k => return Err(grammar(line, format!("unknown variable kind `{k}`"))),
        };
        let lb = rational(line, toks[2])?;
        let ub = if toks[3] == "inf" { None } else { Some(rational(line, toks[3])?) };
        if kind == VarKind::Binary && (lb.is_negative() || ub.as_ref().is_none_or(|u| *u > Rational::one())) {
            return Err(grammar(line, "binary bounds must lie within [0, 1]"));
        }
        variables.push(Variable { name: toks[0].to_string(), kind, lb, ub });
        lines.variables.push(line);
    }
    let (line, args) = cur.header("OBJ")?;
    if args.first() != Some(&"max") {
        return Err(grammar(line, "objective must be `max`"));
    }
    let (objective, rest) = sparse(line, &args[1..], nv)?;
    if !rest.is_empty() {
        return Err(grammar(line, "trailing tokens after objective"));
    }
    lines.objective = line;
    let (line, args) = cur.header("CONS")?;
    arity(line, &args, 1, "CONS")?;
    let nc = count(line, args[0])?;
    let mut constraints = Vec::with_capacity(nc);
    for (line, toks) in cur.body("CONS", nc)? {
        let (c, rest) = constraint(line, &toks, nv)?;
        if !rest.is_empty() {
            return Err(grammar(line, "trailing tokens after constraint"));
        }
        constraints.push(c);
        lines.constraints.push(line);
    }
    Ok(Problem { variables, objective, constraints })
}

/// Parses a model file: the `CERT`, `VARS`, `OBJ`, and `CONS` sections only.
pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    let mut cur = Cursor::new(text);
    let p = parse_problem_sections(&mut cur, &mut LineMap::default())?;
    if let Some((line, toks)) = cur.peek() {
        return Err(grammar(*line, format!("unexpected `{}` after the problem sections", toks[0])));
    }
    Ok(p)
}

pub fn parse_certificate(text: &str) -> Result<Certificate, ParseError> {
    parse_certificate_with_lines(text).map(|(c, _)| c)
}

fn reference(line: usize, tok: &str, nc: usize, nv: usize, current: usize) -> Result<Ref, ParseError> {
    let (what, limit, build): (&'static str, usize, fn(usize) -> Ref) = if let Some(r) = tok.strip_prefix("LB") {
        return index(line, r, "lower bound", nv).map(Ref::Lb);
    } else if let Some(r) = tok.strip_prefix("UB") {
        return index(line, r, "upper bound", nv).map(Ref::Ub);
    } else if tok.starts_with('C') {
        ("constraint", nc, Ref::Con)
    } else if tok.starts_with('D') {
        ("derivation", current, Ref::Der)
    } else {
        return Err(grammar(line, format!("malformed reference `{tok}`")));
    };
    index(line, &tok[1..], what, limit).map(build)
}

pub fn parse_certificate_with_lines(text: &str) -> Result<(Certificate, LineMap), ParseError> {
    let mut cur = Cursor::new(text);
    let mut lines = LineMap::default();
    let problem = parse_problem_sections(&mut cur, &mut lines)?;
    let (nv, nc) = (problem.variables.len(), problem.constraints.len());

    let (line, args) = cur.header("RTP")?;
    let goal = match args.as_slice() {
        ["infeas"] => Goal::Infeasible,
        ["range", lb, ub] => Goal::Range(rational(line, lb)?, rational(line, ub)?),
        _ => return Err(grammar(line, "RTP expects `infeas` or `range <lb> <ub>`")),
    };
    lines.goal = line;

    let (line, args) = cur.header("SOLS")?;
    arity(line, &args, 1, "SOLS")?;
    let ns = count(line, args[0])?;
    let mut solutions: Vec<Solution> = Vec::with_capacity(ns);
    for (line, toks) in cur.body("SOLS", ns)? {
        let (sol, rest) = sparse(line, &toks, nv)?;
        if !rest.is_empty() {
            return Err(grammar(line, "trailing tokens after solution"));
        }
        solutions.push(sol);
        lines.solutions.push(line);
    }

    let (line, args) = cur.header("DERS")?;
    arity(line, &args, 1, "DERS")?;
    let nd = count(line, args[0])?;
    let mut derivations = Vec::with_capacity(nd);
    for (i, (line, toks)) in cur.body("DERS", nd)?.into_iter().enumerate() {
        let (stated, rest) = constraint(line, &toks, nv)?;
        let refs = |rest: &[&str]| -> Result<Vec<(Ref, Rational)>, ParseError> {
            let r = count(line, rest.first().copied().unwrap_or(""))?;
            if rest.len() != 1 + 2 * r {
                return Err(grammar(line, format!("expected exactly {r} reference/multiplier pairs")));
            }
            (0..r)
                .map(|k| Ok((reference(line, rest[1 + 2 * k], nc, nv, i)?, rational(line, rest[2 + 2 * k])?)))
                .collect()
        };
        let rule = match rest.split_first() {
            Some((&"asm", [])) => Rule::Asm,
            Some((&"lin", r)) => Rule::Lin(refs(r)?),
            Some((&"rnd", r)) => Rule::Rnd(refs(r)?),
            Some((&"uns", [r1, a1, r2, a2])) => Rule::Uns {
                r1: reference(line, r1, nc, nv, i)?,
                a1: reference(line, a1, nc, nv, i)?,
                r2: reference(line, r2, nc, nv, i)?,
                a2: reference(line, a2, nc, nv, i)?,
            },
            _ => return Err(grammar(line, "expected a rule: asm | lin | rnd | uns")),
        };
        derivations.push(Derivation { stated, rule });
        lines.derivations.push(line);
    }
    if let Some((line, toks)) = cur.peek() {
        return Err(grammar(*line, format!("unexpected `{}` after DERS", toks[0])));
    }
    Ok((Certificate { problem, goal, solutions, derivations }, lines))
}
