//! Brute-force verification of the star property over every downset of a
//! small ground set.

use std::sync::atomic::{AtomicUsize, Ordering};

use thiserror::Error;

use crate::setcore::{self, is_downset, max_star, Family, SubsetCode};

/// Largest ground set enumerated without the long-run flag.
pub const MAX_ORACLE_N: usize = 5;
/// Largest ground set enumerated at all.
pub const MAX_LONG_RUN_N: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("downset enumeration over [{0}] needs the long-run flag")]
    NeedsLongRun(usize),
    #[error("downset enumeration supports 1 <= n <= {MAX_LONG_RUN_N}, got {0}")]
    GroundSetSize(usize),
    #[error("family is not a downset")]
    NotDownset,
}

fn check_n(n: usize, long_run: bool) -> Result<(), OracleError> {
    if n == 0 || n > MAX_LONG_RUN_N {
        return Err(OracleError::GroundSetSize(n));
    }
    if n > MAX_ORACLE_N && !long_run {
        return Err(OracleError::NeedsLongRun(n));
    }
    Ok(())
}

/// Sets of `2^[n]` as bit positions of a `u64`: bit `c` is the set with code `c`.
fn members_of(n: usize, mask: u64) -> Family {
    let members: Vec<SubsetCode> = (0..1u32 << n).filter(|c| mask >> c & 1 == 1).map(SubsetCode).collect();
    Family::new(n, members).expect("codes fit the ground set")
}

/// `below[c]`: every subset of set `c`, as a `u64` mask.
fn subset_masks(n: usize) -> Vec<u64> {
    (0..1u32 << n)
        .map(|c| (0..=c).filter(|s| s & c == *s).fold(0u64, |acc, s| acc | 1 << s))
        .collect()
}

/// Visits every downset of `2^[n]` (the empty family included) exactly once.
///
/// Sets are decided in order of decreasing cardinality. A set below an
/// included set is forced in; every other set is tried both ways.
pub fn for_each_downset(n: usize, long_run: bool, mut visit: impl FnMut(&Family)) -> Result<(), OracleError> {
    check_n(n, long_run)?;
    let mut order: Vec<u32> = (0..1u32 << n).collect();
    order.sort_by_key(|c| std::cmp::Reverse(c.count_ones()));
    let below = subset_masks(n);
    fn rec(i: usize, order: &[u32], below: &[u64], included: u64, forced: u64, n: usize, visit: &mut dyn FnMut(&Family)) {
        let Some(&c) = order.get(i) else {
            visit(&members_of(n, included));
            return;
        };
        if forced >> c & 1 == 1 {
            rec(i + 1, order, below, included | 1 << c, forced, n, visit);
        } else {
            rec(i + 1, order, below, included, forced, n, visit);
            rec(i + 1, order, below, included | 1 << c, forced | below[c as usize], n, visit);
        }
    }
    rec(0, &order, &below, 0, 0, n, &mut visit);
    Ok(())
}

pub fn enumerate_downsets(n: usize, long_run: bool) -> Result<Vec<Family>, OracleError> {
    let mut out = Vec::new();
    for_each_downset(n, long_run, |d| out.push(d.clone()))?;
    Ok(out)
}

/// Independent enumerator: every antichain of `2^[n]`, closed downward.
pub fn enumerate_downsets_by_antichains(n: usize, long_run: bool) -> Result<Vec<Family>, OracleError> {
    check_n(n, long_run)?;
    let sets: Vec<SubsetCode> = setcore::power_set(n).collect();
    let mut out = Vec::new();
    fn rec(i: usize, sets: &[SubsetCode], chosen: &mut Vec<SubsetCode>, n: usize, out: &mut Vec<Family>) {
        if i == sets.len() {
            out.push(if chosen.is_empty() {
                Family::empty(n).unwrap()
            } else {
                setcore::downward_closure(&Family::new(n, chosen.iter().copied()).unwrap())
            });
            return;
        }
        rec(i + 1, sets, chosen, n, out);
        let s = sets[i];
        if chosen.iter().all(|t| !t.is_subset_of(s) && !s.is_subset_of(*t)) {
            chosen.push(s);
            rec(i + 1, sets, chosen, n, out);
            chosen.pop();
        }
    }
    rec(0, &sets, &mut Vec::new(), n, &mut out);
    Ok(out)
}

/// Fixed-width bitset over at most `64 * words` vertices.
#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }
    fn first(&self) -> Option<usize> {
        self.0.iter().enumerate().find(|(_, w)| **w != 0).map(|(k, w)| 64 * k + w.trailing_zeros() as usize)
    }
    fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }
    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
}

/// Maximum clique in the "intersects" graph, i.e. a maximum independent set
/// of the disjointness graph, by branch-and-bound with greedy coloring bounds.
struct CliqueSearch {
    adj: Vec<Bits>,
    best: Vec<usize>,
}

impl CliqueSearch {
    fn expand(&mut self, current: &mut Vec<usize>, mut cand: Bits) {
        // greedy coloring of the candidates: color classes are independent sets
        let mut order: Vec<(usize, usize)> = Vec::new();
        let mut uncolored = cand.clone();
        let mut color = 0;
        while !uncolored.is_empty() {
            color += 1;
            let mut avail = uncolored.clone();
            while let Some(v) = avail.first() {
                avail.clear(v);
                uncolored.clear(v);
                for (a, b) in avail.0.iter_mut().zip(&self.adj[v].0) {
                    *a &= !b;
                }
                order.push((v, color));
            }
        }
        for &(v, c) in order.iter().rev() {
            if current.len() + c <= self.best.len() {
                return;
            }
            current.push(v);
            let next = cand.and(&self.adj[v]);
            if next.is_empty() {
                if current.len() > self.best.len() {
                    self.best = current.clone();
                }
            } else {
                self.expand(current, next);
            }
            current.pop();
            cand.clear(v);
        }
    }
}

/// Largest intersecting subfamily of `f` and a witness. The empty set never
/// belongs to an intersecting family.
pub fn max_intersecting_subfamily(f: &Family) -> (usize, Family) {
    let sets: Vec<SubsetCode> = f.members().iter().copied().filter(|s| !s.is_empty()).collect();
    let len = sets.len();
    let mut adj = vec![Bits::empty(len); len];
    for i in 0..len {
        for j in 0..len {
            if i != j && sets[i].intersects(sets[j]) {
                adj[i].set(j);
            }
        }
    }
    let mut search = CliqueSearch { adj, best: Vec::new() };
    let mut all = Bits::empty(len);
    (0..len).for_each(|i| all.set(i));
    if len > 0 {
        search.expand(&mut Vec::new(), all);
    }
    let witness = Family::new(f.n(), search.best.iter().map(|&i| sets[i])).expect("subfamily of a valid family");
    (witness.len(), witness)
}

/// Some maximum intersecting subfamily of `d` is a star.
pub fn has_star_property(d: &Family) -> Result<bool, OracleError> {
    if !is_downset(d) {
        return Err(OracleError::NotDownset);
    }
    Ok(max_star(d).1 >= max_intersecting_subfamily(d).0)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub n: usize,
    pub downsets_checked: usize,
    pub all_satisfy: bool,
    pub first_violation: Option<Family>,
    /// Max over downsets of (largest intersecting subfamily − largest star).
    pub max_gap: i64,
}

impl OracleReport {
    /// Fixed-key text block.
    pub fn text(&self) -> String {
        let violation = self.first_violation.as_ref().map_or("none".to_string(), |f| f.to_string());
        format!(
            "n: {}\ndownsets_checked: {}\nall_satisfy: {}\nmax_gap: {}\nfirst_violation: {}\n",
            self.n, self.downsets_checked, self.all_satisfy, self.max_gap, violation
        )
    }

    /// Single-line record for scripting.
    pub fn record(&self) -> String {
        let violation = self.first_violation.as_ref().map_or("none".to_string(), |f| format!("\"{f}\""));
        format!(
            "n={} downsets_checked={} all_satisfy={} max_gap={} first_violation={}",
            self.n, self.downsets_checked, self.all_satisfy, self.max_gap, violation
        )
    }
}

/// Gap of one downset: largest intersecting subfamily minus largest star.
fn gap(d: &Family) -> i64 {
    max_intersecting_subfamily(d).0 as i64 - max_star(d).1 as i64
}

/// Checks the star property on every downset of `2^[n]`.
///
/// With `workers > 1` the downsets are split into chunks checked on scoped
/// threads; the report does not depend on the worker count. `progress` is
/// called with the running count after every `10^5` downsets.
pub fn verify_conjecture(
    n: usize,
    long_run: bool,
    workers: usize,
    progress: &(dyn Fn(usize) + Sync),
) -> Result<OracleReport, OracleError> {
    let downsets = enumerate_downsets(n, long_run)?;
    let done = AtomicUsize::new(0);
    let check = |chunk: &[Family]| -> (i64, Option<usize>) {
        let mut max_gap = i64::MIN;
        let mut first = None;
        for (i, d) in chunk.iter().enumerate() {
            let g = gap(d);
            max_gap = max_gap.max(g);
            if g > 0 && first.is_none() {
                first = Some(i);
            }
            if done.fetch_add(1, Ordering::Relaxed) % 100_000 == 99_999 {
                progress(done.load(Ordering::Relaxed));
            }
        }
        (max_gap, first)
    };
    let workers = workers.max(1);
    let chunk = downsets.len().div_ceil(workers).max(1);
    let parts: Vec<(i64, Option<usize>)> = if workers == 1 {
        vec![check(&downsets)]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = downsets.chunks(chunk).map(|c| s.spawn(move || check(c))).collect();
            handles.into_iter().map(|h| h.join().expect("oracle worker panicked")).collect()
        })
    };
    let max_gap = parts.iter().map(|p| p.0).max().unwrap_or(0);
    let first_violation =
        parts.iter().enumerate().find_map(|(k, p)| p.1.map(|i| downsets[k * chunk + i].clone()));
    Ok(OracleReport { n, downsets_checked: downsets.len(), all_satisfy: max_gap <= 0, first_violation, max_gap })
}
