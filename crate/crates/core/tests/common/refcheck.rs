//! A second certificate checker written straight from the file grammar, on
//! `num_rational::BigRational`. It shares no code with the library's parser
//! or checker and is used to screen mutations and to cross-examine verdicts.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

type Q = BigRational;
type Terms = BTreeMap<usize, Q>;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum S {
    L,
    G,
    E,
}

#[derive(Clone, Debug)]
struct Con {
    s: S,
    rhs: Q,
    terms: Terms,
}

#[derive(Clone, Debug)]
enum R {
    C(usize),
    Lb(usize),
    Ub(usize),
    D(usize),
}

#[derive(Clone, Debug)]
enum Just {
    Asm,
    Lin(Vec<(R, Q)>),
    Rnd(Vec<(R, Q)>),
    Uns(R, R, R, R),
}

struct Doc {
    lb: Vec<Q>,
    ub: Vec<Option<Q>>,
    obj: Terms,
    cons: Vec<Con>,
    goal: Option<(Q, Q)>,
    sols: Vec<Terms>,
    ders: Vec<(Con, Just)>,
}

fn q(tok: &str) -> Result<Q, String> {
    let v: Q = tok.parse().map_err(|_| format!("bad rational {tok}"))?;
    if v.to_string() != tok {
        return Err(format!("non-canonical rational {tok}"));
    }
    Ok(v)
}

fn num(tok: &str) -> Result<usize, String> {
    let v: usize = tok.parse().map_err(|_| format!("bad count {tok}"))?;
    if v.to_string() != tok {
        return Err(format!("non-canonical count {tok}"));
    }
    Ok(v)
}

fn sense(tok: &str) -> Result<S, String> {
    match tok {
        "L" => Ok(S::L),
        "G" => Ok(S::G),
        "E" => Ok(S::E),
        _ => Err(format!("bad sense {tok}")),
    }
}

/// Strictly increasing indices below `nv` with nonzero values when `nonzero`.
fn terms(t: &[&str], nv: usize, nonzero: bool) -> Result<(Terms, usize), String> {
    let k = num(t.first().ok_or("missing count")?)?;
    if t.len() < 1 + 2 * k {
        return Err("short term list".into());
    }
    let mut out = Terms::new();
    let mut last: Option<usize> = None;
    for i in 0..k {
        let j = num(t[1 + 2 * i])?;
        if j >= nv || last.is_some_and(|l| l >= j) {
            return Err("bad index".into());
        }
        last = Some(j);
        let v = q(t[2 + 2 * i])?;
        if nonzero && v.is_zero() {
            return Err("zero coefficient".into());
        }
        out.insert(j, v);
    }
    Ok((out, 1 + 2 * k))
}

fn constraint(t: &[&str], nv: usize) -> Result<(Con, usize), String> {
    if t.len() < 4 {
        return Err("short constraint".into());
    }
    let s = sense(t[1])?;
    let rhs = q(t[2])?;
    let (terms, used) = terms(&t[3..], nv, true)?;
    Ok((Con { s, rhs, terms }, 3 + used))
}

fn reference(tok: &str, nv: usize, nc: usize, cur: usize) -> Result<R, String> {
    let (r, idx, lim) = if let Some(x) = tok.strip_prefix("LB") {
        (R::Lb(0), x, nv)
    } else if let Some(x) = tok.strip_prefix("UB") {
        (R::Ub(0), x, nv)
    } else if let Some(x) = tok.strip_prefix('C') {
        (R::C(0), x, nc)
    } else if let Some(x) = tok.strip_prefix('D') {
        (R::D(0), x, cur)
    } else {
        return Err(format!("bad reference {tok}"));
    };
    let i = num(idx)?;
    if i >= lim {
        return Err(format!("reference {tok} out of range"));
    }
    Ok(match r {
        R::Lb(_) => R::Lb(i),
        R::Ub(_) => R::Ub(i),
        R::C(_) => R::C(i),
        R::D(_) => R::D(i),
    })
}

fn parse(text: &str) -> Result<Doc, String> {
    let lines: Vec<Vec<&str>> = text
        .lines()
        .map(|l| l.split('#').next().unwrap().split_whitespace().collect::<Vec<_>>())
        .filter(|t| !t.is_empty())
        .collect();
    let mut it = lines.into_iter();
    let mut next = || it.next().ok_or_else(|| "unexpected end".to_string());
    let head = |l: Vec<&str>, kw: &str| -> Result<Vec<String>, String> {
        if l[0] != kw {
            return Err(format!("expected {kw}"));
        }
        Ok(l[1..].iter().map(|s| s.to_string()).collect())
    };
    if head(next()?, "CERT")? != ["1"] {
        return Err("version".into());
    }
    let a = head(next()?, "VARS")?;
    let nv = num(a.first().ok_or("VARS count")?)?;
    if a.len() != 1 {
        return Err("VARS arity".into());
    }
    let (mut lb, mut ub) = (Vec::new(), Vec::new());
    let mut names = BTreeSet::new();
    for _ in 0..nv {
        let l = next()?;
        if l.len() != 4 || !names.insert(l[0].to_string()) {
            return Err("variable line".into());
        }
        let lo = q(l[2])?;
        let hi = if l[3] == "inf" { None } else { Some(q(l[3])?) };
        match l[1] {
            "bin" => {
                if lo.is_negative() || hi.as_ref().is_none_or(|h| *h > Q::one()) {
                    return Err("binary bounds".into());
                }
            }
            "int" => {}
            _ => return Err("kind".into()),
        }
        lb.push(lo);
        ub.push(hi);
    }
    let a = next()?;
    if a.len() < 2 || a[0] != "OBJ" || a[1] != "max" {
        return Err("OBJ".into());
    }
    let (obj, used) = terms(&a[2..], nv, false)?;
    if used != a.len() - 2 {
        return Err("OBJ trailing".into());
    }
    let a = head(next()?, "CONS")?;
    if a.len() != 1 {
        return Err("CONS arity".into());
    }
    let nc = num(&a[0])?;
    let mut cons = Vec::new();
    for _ in 0..nc {
        let l = next()?;
        let (c, used) = constraint(&l, nv)?;
        if used != l.len() {
            return Err("constraint trailing".into());
        }
        cons.push(c);
    }
    let a = head(next()?, "RTP")?;
    let goal = match a.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["infeas"] => None,
        ["range", l, u] => Some((q(l)?, q(u)?)),
        _ => return Err("RTP".into()),
    };
    let a = head(next()?, "SOLS")?;
    if a.len() != 1 {
        return Err("SOLS arity".into());
    }
    let ns = num(&a[0])?;
    let mut sols = Vec::new();
    for _ in 0..ns {
        let l = next()?;
        let (t, used) = terms(&l, nv, false)?;
        if used != l.len() {
            return Err("solution trailing".into());
        }
        sols.push(t);
    }
    let a = head(next()?, "DERS")?;
    if a.len() != 1 {
        return Err("DERS arity".into());
    }
    let nd = num(&a[0])?;
    let mut ders = Vec::new();
    for i in 0..nd {
        let l = next()?;
        let (c, used) = constraint(&l, nv)?;
        let rest = &l[used..];
        let refs = |r: &[&str]| -> Result<Vec<(R, Q)>, String> {
            let k = num(r.first().ok_or("ref count")?)?;
            if r.len() != 1 + 2 * k {
                return Err("ref arity".into());
            }
            (0..k).map(|m| Ok((reference(r[1 + 2 * m], nv, nc, i)?, q(r[2 + 2 * m])?))).collect()
        };
        let just = match rest {
            ["asm"] => Just::Asm,
            ["lin", r @ ..] => Just::Lin(refs(r)?),
            ["rnd", r @ ..] => Just::Rnd(refs(r)?),
            ["uns", a, b, c, d] => Just::Uns(
                reference(a, nv, nc, i)?,
                reference(b, nv, nc, i)?,
                reference(c, nv, nc, i)?,
                reference(d, nv, nc, i)?,
            ),
            _ => return Err("rule".into()),
        };
        ders.push((c, just));
    }
    if next().is_ok() {
        return Err("trailing lines".into());
    }
    Ok(Doc { lb, ub, obj, cons, goal, sols, ders })
}

fn contradiction(c: &Con) -> bool {
    c.terms.is_empty()
        && match c.s {
            S::L => c.rhs.is_negative(),
            S::G => c.rhs.is_positive(),
            S::E => !c.rhs.is_zero(),
        }
}

/// Does `d` imply `want`?
fn implies(d: &Con, want: &Con) -> bool {
    if contradiction(d) {
        return true;
    }
    if d.terms != want.terms {
        return false;
    }
    match (want.s, d.s) {
        (S::L, S::L | S::E) => d.rhs <= want.rhs,
        (S::G, S::G | S::E) => d.rhs >= want.rhs,
        (S::E, S::E) => d.rhs == want.rhs,
        _ => false,
    }
}

fn unit(j: usize) -> Terms {
    BTreeMap::from([(j, Q::one())])
}

struct Ctx<'a> {
    doc: &'a Doc,
    asm: Vec<BTreeSet<usize>>,
}

impl Ctx<'_> {
    fn row(&self, r: &R) -> Result<Con, String> {
        Ok(match r {
            R::C(i) => self.doc.cons[*i].clone(),
            R::Lb(j) => Con { s: S::G, rhs: self.doc.lb[*j].clone(), terms: unit(*j) },
            R::Ub(j) => Con { s: S::L, rhs: self.doc.ub[*j].clone().ok_or("infinite bound")?, terms: unit(*j) },
            R::D(i) => self.doc.ders[*i].0.clone(),
        })
    }

    fn combine(&self, refs: &[(R, Q)], dir: S) -> Result<(Con, BTreeSet<usize>), String> {
        let mut acc = Terms::new();
        let mut rhs = Q::zero();
        let mut asm = BTreeSet::new();
        for (r, m) in refs {
            if m.is_zero() {
                continue;
            }
            let row = self.row(r)?;
            let sign_ok = match (dir, row.s) {
                (_, S::E) => true,
                (S::E, _) => false,
                (S::L, S::L) | (S::G, S::G) => m.is_positive(),
                _ => m.is_negative(),
            };
            if !sign_ok {
                return Err("multiplier sign".into());
            }
            for (j, a) in &row.terms {
                let e = acc.entry(*j).or_insert_with(Q::zero);
                *e += m * a;
            }
            rhs += m * &row.rhs;
            if let R::D(k) = r {
                asm.extend(self.asm[*k].iter().copied());
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Ok((Con { s: dir, rhs, terms: acc }, asm))
    }

    /// `(var, sense, k)` for an assumption `x_var <= k` or `x_var >= k`.
    fn bound(&self, r: &R, cur: usize) -> Result<(usize, S, Q), String> {
        let R::D(k) = r else { return Err("assumption must be a derivation".into()) };
        if *k >= cur {
            return Err("late assumption".into());
        }
        let (c, j) = &self.doc.ders[*k];
        if !matches!(j, Just::Asm) || c.s == S::E || !c.rhs.is_integer() || c.terms.len() != 1 {
            return Err("not a bound assumption".into());
        }
        let (&var, coef) = c.terms.iter().next().unwrap();
        if !coef.is_one() {
            return Err("not a unit bound".into());
        }
        Ok((var, c.s, c.rhs.clone()))
    }

    fn derive(&self, i: usize) -> Result<BTreeSet<usize>, String> {
        let (stated, just) = &self.doc.ders[i];
        match just {
            Just::Asm => Ok(BTreeSet::from([i])),
            Just::Lin(refs) => {
                let (d, asm) = self.combine(refs, stated.s)?;
                implies(&d, stated).then_some(asm).ok_or_else(|| "lin does not imply".into())
            }
            Just::Rnd(refs) => {
                if stated.s == S::E {
                    return Err("rounded equation".into());
                }
                let (mut d, asm) = self.combine(refs, stated.s)?;
                if d.terms.values().any(|a| !a.is_integer()) {
                    return Err("fractional coefficient".into());
                }
                d.rhs = if d.s == S::L { d.rhs.floor() } else { d.rhs.ceil() };
                implies(&d, stated).then_some(asm).ok_or_else(|| "rnd does not imply".into())
            }
            Just::Uns(r1, a1, r2, a2) => {
                let (v1, s1, k1) = self.bound(a1, i)?;
                let (v2, s2, k2) = self.bound(a2, i)?;
                let one = Q::one();
                let ok = v1 == v2
                    && ((s1 == S::L && s2 == S::G && k2 == &k1 + &one) || (s1 == S::G && s2 == S::L && k1 == &k2 + &one));
                if !ok {
                    return Err("not complementary".into());
                }
                let mut asm = BTreeSet::new();
                for (r, a) in [(r1, a1), (r2, a2)] {
                    if !implies(&self.row(r)?, stated) {
                        return Err("uns premise does not imply".into());
                    }
                    let R::D(drop) = a else { unreachable!() };
                    if let R::D(k) = r {
                        asm.extend(self.asm[*k].iter().copied().filter(|x| x != drop));
                    }
                }
                Ok(asm)
            }
        }
    }
}

fn value(t: &Terms, x: &Terms) -> Q {
    t.iter().map(|(j, a)| a * x.get(j).cloned().unwrap_or_else(Q::zero)).sum()
}

fn holds(c: &Con, x: &Terms) -> bool {
    let v = value(&c.terms, x);
    match c.s {
        S::L => v <= c.rhs,
        S::G => v >= c.rhs,
        S::E => v == c.rhs,
    }
}

/// `Ok(())` when the certificate text is valid. Every variable kind in the
/// grammar is integral.
pub fn check(text: &str) -> Result<(), String> {
    let doc = parse(text)?;
    for x in &doc.sols {
        for j in 0..doc.lb.len() {
            let v = x.get(&j).cloned().unwrap_or_else(Q::zero);
            if !v.is_integer() || v < doc.lb[j] || doc.ub[j].as_ref().is_some_and(|u| v > *u) {
                return Err("solution outside bounds".into());
            }
        }
        if !doc.cons.iter().all(|c| holds(c, x)) {
            return Err("solution infeasible".into());
        }
    }
    let mut ctx = Ctx { doc: &doc, asm: Vec::new() };
    for i in 0..doc.ders.len() {
        let a = ctx.derive(i).map_err(|e| format!("D{i}: {e}"))?;
        ctx.asm.push(a);
    }
    let last = doc.ders.last().ok_or("no derivations")?;
    if !ctx.asm.last().unwrap().is_empty() {
        return Err("open assumptions".into());
    }
    let fin = &last.0;
    match &doc.goal {
        None => contradiction(fin).then_some(()).ok_or_else(|| "no contradiction".into()),
        Some((lo, hi)) => {
            let bounded =
                contradiction(fin) || (fin.terms == doc.obj && matches!(fin.s, S::L | S::E) && fin.rhs <= *hi);
            if !bounded {
                return Err("objective not bounded".into());
            }
            if !doc.sols.iter().any(|x| value(&doc.obj, x) >= *lo) {
                return Err("lower bound unattained".into());
            }
            Ok(())
        }
    }
}
