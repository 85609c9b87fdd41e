//! Single-token certificate mutations. A mutant that the reference checker
//! still accepts is screened out; every other mutant must be rejected by the
//! library, either at parse time or by the checker.

use chvatal::certcheck::{check_certificate, parse_certificate};
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::refcheck;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok {
    Value,
    Index,
    Sense,
    Ref,
    Count,
}

#[derive(Debug, Clone, Copy)]
struct Site {
    line: usize,
    tok: usize,
    kind: Tok,
}

/// Sites grouped by region so that small regions are not drowned out by the
/// constraint rows: problem rows, variables and objective, goal and
/// solutions, derivations.
fn sites(lines: &[Vec<&str>]) -> [Vec<Site>; 4] {
    let mut out: [Vec<Site>; 4] = Default::default();
    let mut section = "";
    for (l, toks) in lines.iter().enumerate() {
        let mut push = |group: usize, tok: usize, kind: Tok| out[group].push(Site { line: l, tok, kind });
        if ["CERT", "VARS", "OBJ", "CONS", "RTP", "SOLS", "DERS"].contains(&toks[0]) {
            section = toks[0];
            match section {
                "OBJ" => {
                    for t in (3..toks.len()).step_by(2) {
                        push(1, t, Tok::Index);
                        push(1, t + 1, Tok::Value);
                    }
                }
                "RTP" if toks.len() == 4 => {
                    push(2, 2, Tok::Value);
                    push(2, 3, Tok::Value);
                }
                "CONS" | "SOLS" | "DERS" => push(2, 1, Tok::Count),
                _ => {}
            }
            continue;
        }
        match section {
            "VARS" => {
                push(1, 2, Tok::Value);
                push(1, 3, Tok::Value);
            }
            "SOLS" => {
                for t in (1..toks.len()).step_by(2) {
                    push(2, t, Tok::Index);
                    push(2, t + 1, Tok::Value);
                }
            }
            "CONS" | "DERS" => {
                let group = if section == "CONS" { 0 } else { 3 };
                push(group, 1, Tok::Sense);
                push(group, 2, Tok::Value);
                let t: usize = toks[3].parse().unwrap();
                for k in 0..t {
                    push(group, 4 + 2 * k, Tok::Index);
                    push(group, 5 + 2 * k, Tok::Value);
                }
                let rest = 4 + 2 * t;
                match toks.get(rest).copied() {
                    Some("lin") | Some("rnd") => {
                        for p in (rest + 2..toks.len()).step_by(2) {
                            push(group, p, Tok::Ref);
                            push(group, p + 1, Tok::Value);
                        }
                    }
                    Some("uns") => (rest + 1..toks.len()).for_each(|p| push(group, p, Tok::Ref)),
                    _ => {}
                }
            }
            _ => {}
        }
    }
    out
}

fn mutate_value(tok: &str, rng: &mut ChaCha8Rng) -> String {
    if tok == "inf" {
        return ["0", "1", "2"].choose(rng).unwrap().to_string();
    }
    let v: BigRational = tok.parse().unwrap();
    let one = BigRational::from_integer(1.into());
    let half = BigRational::new(1.into(), 2.into());
    let m = match rng.gen_range(0..6) {
        0 => &v + &one,
        1 => &v - &one,
        2 => -&v,
        3 => &v + &half,
        4 => &v * BigRational::from_integer(2.into()),
        _ => BigRational::from_integer(0.into()),
    };
    m.to_string()
}

fn mutate_ref(tok: &str, rng: &mut ChaCha8Rng) -> String {
    let split = tok.find(|c: char| c.is_ascii_digit()).unwrap();
    let (kind, idx) = tok.split_at(split);
    let idx: i64 = idx.parse().unwrap();
    match rng.gen_range(0..3) {
        0 => format!("{kind}{}", idx + 1),
        1 => format!("{kind}{}", (idx - 1).max(0)),
        _ => {
            let other = match kind {
                "C" => "D",
                "D" => "C",
                "LB" => "UB",
                _ => "LB",
            };
            format!("{other}{idx}")
        }
    }
}

fn mutate(tok: &str, kind: Tok, rng: &mut ChaCha8Rng) -> String {
    match kind {
        Tok::Value => mutate_value(tok, rng),
        Tok::Ref => mutate_ref(tok, rng),
        Tok::Sense => ["L", "G", "E"].choose(rng).unwrap().to_string(),
        Tok::Index | Tok::Count => {
            let v: i64 = tok.parse().unwrap();
            (v + [-1, 1].choose(rng).unwrap()).max(0).to_string()
        }
    }
}

#[derive(Debug, Default)]
pub struct MutationReport {
    pub attempts: usize,
    pub screened: usize,
    pub rejected: usize,
    /// Invalid mutants the library accepted.
    pub accepted_invalid: Vec<String>,
    /// Mutants the reference accepted but the library rejected.
    pub disagreements: Vec<String>,
}

impl MutationReport {
    pub fn counted(&self) -> usize {
        self.rejected + self.accepted_invalid.len()
    }

    pub fn all_rejected(&self, target: usize) -> bool {
        self.accepted_invalid.is_empty() && self.rejected >= target
    }
}

/// Applies mutations until `target` non-screened mutants were tried.
pub fn run(text: &str, target: usize, seed: u64) -> MutationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lines: Vec<Vec<&str>> = text.lines().map(|l| l.split_whitespace().collect()).collect();
    assert!(lines.iter().all(|l| !l.is_empty()), "harness expects the canonical layout");
    let groups = sites(&lines);
    let mut report = MutationReport::default();
    while report.counted() < target && report.attempts < 50 * target {
        let group = loop {
            let g = &groups[rng.gen_range(0..4)];
            if !g.is_empty() {
                break g;
            }
        };
        let site = *group.choose(&mut rng).unwrap();
        let old = lines[site.line][site.tok];
        let new = mutate(old, site.kind, &mut rng);
        if new == old {
            continue;
        }
        report.attempts += 1;
        let mut out = String::with_capacity(text.len() + 8);
        for (l, toks) in lines.iter().enumerate() {
            for (t, tok) in toks.iter().enumerate() {
                if t > 0 {
                    out.push(' ');
                }
                out.push_str(if l == site.line && t == site.tok { &new } else { tok });
            }
            out.push('\n');
        }
        let what = format!("line {} token {} `{old}` -> `{new}`", site.line + 1, site.tok);
        let library_accepts = parse_certificate(&out).is_ok_and(|c| check_certificate(&c).is_verified());
        match (refcheck::check(&out).is_ok(), library_accepts) {
            (true, true) => report.screened += 1,
            (true, false) => {
                report.screened += 1;
                report.disagreements.push(what);
            }
            (false, false) => report.rejected += 1,
            (false, true) => report.accepted_invalid.push(what),
        }
    }
    report
}
