//! Set families over a ground set `[n] = {1, ..., n}`.
//!
//! A subset is encoded as an `n`-bit integer where element `i` corresponds to
//! bit `i - 1`. A [`Family`] is a sorted, duplicate-free list of such codes.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

/// Largest supported ground set.
pub const MAX_N: usize = 10;
/// Largest ground set for exhaustive permutation canonicalization.
pub const MAX_CANON_N: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("ground set size {0} outside 1..={MAX_N}")]
    GroundSetSize(usize),
    #[error("subset code {code:#b} exceeds the {n}-element ground set")]
    OutOfRange { code: u32, n: usize },
    #[error("element {elem} outside 1..={n}")]
    Element { elem: usize, n: usize },
    #[error("malformed family literal: {0}")]
    Literal(String),
    #[error("invalid class parameters n={n} m={m} k={k}")]
    ClassParams { n: usize, m: usize, k: usize },
}

/// A subset of `[n]` as a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SubsetCode(pub u32);

impl SubsetCode {
    pub const EMPTY: SubsetCode = SubsetCode(0);

    /// The full ground set `[n]`.
    pub fn full(n: usize) -> Self {
        SubsetCode(((1u64 << n) - 1) as u32)
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(n: usize, elems: I) -> Result<Self, SetError> {
        let mut bits = 0u32;
        for e in elems {
            if e == 0 || e > n {
                return Err(SetError::Element { elem: e, n });
            }
            bits |= 1 << (e - 1);
        }
        Ok(SubsetCode(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Membership of element `i` (1-based).
    pub fn contains(self, i: usize) -> bool {
        (1..=32).contains(&i) && self.0 >> (i - 1) & 1 == 1
    }

    pub fn is_subset_of(self, other: SubsetCode) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: SubsetCode) -> bool {
        self.0 & other.0 != 0
    }

    pub fn fits(self, n: usize) -> bool {
        (self.0 as u64) >> n == 0
    }

    /// Elements in increasing order, 1-based.
    pub fn elements(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |b| bits >> b & 1 == 1).map(|b| b + 1)
    }

    /// Image under a permutation given as `perm[i] = image of element i+1` (0-based images).
    pub fn permute(self, perm: &[u8]) -> SubsetCode {
        let mut out = 0u32;
        let mut bits = self.0;
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            out |= 1 << perm[b];
            bits &= bits - 1;
        }
        SubsetCode(out)
    }
}

impl fmt::Display for SubsetCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, e) in self.elements().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// All subsets of `[n]` in increasing code order, including the empty set.
pub fn power_set(n: usize) -> impl Iterator<Item = SubsetCode> {
    (0..(1u32 << n)).map(SubsetCode)
}

/// All nonempty subsets of `[n]` in increasing code order.
pub fn nonempty_subsets(n: usize) -> impl Iterator<Item = SubsetCode> {
    (1..(1u32 << n)).map(SubsetCode)
}

/// A set of subsets of `[n]`, stored sorted by code.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Family {
    n: usize,
    members: Vec<SubsetCode>,
}

impl Family {
    /// Builds a family from arbitrary codes; sorts and removes duplicates.
    pub fn new<I: IntoIterator<Item = SubsetCode>>(n: usize, members: I) -> Result<Self, SetError> {
        if n == 0 || n > MAX_N {
            return Err(SetError::GroundSetSize(n));
        }
        let mut members: Vec<SubsetCode> = members.into_iter().collect();
        if let Some(bad) = members.iter().find(|s| !s.fits(n)) {
            return Err(SetError::OutOfRange { code: bad.0, n });
        }
        members.sort_unstable();
        members.dedup();
        Ok(Family { n, members })
    }

    pub fn empty(n: usize) -> Result<Self, SetError> {
        Self::new(n, [])
    }

    /// The full power set `2^[n]`.
    pub fn power_set(n: usize) -> Result<Self, SetError> {
        if n == 0 || n > MAX_N {
            return Err(SetError::GroundSetSize(n));
        }
        Ok(Family { n, members: power_set(n).collect() })
    }

    /// Caller guarantees sorted, unique, in-range members.
    pub(crate) fn from_sorted_unchecked(n: usize, members: Vec<SubsetCode>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Family { n, members }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[SubsetCode] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: SubsetCode) -> bool {
        self.members.binary_search(&s).is_ok()
    }

    pub fn is_subfamily_of(&self, other: &Family) -> bool {
        self.members.iter().all(|s| other.contains(*s))
    }

    /// Image of the family under a permutation of `[n]` (see [`SubsetCode::permute`]).
    pub fn permute(&self, perm: &[u8]) -> Family {
        let mut members: Vec<SubsetCode> = self.members.iter().map(|s| s.permute(perm)).collect();
        members.sort_unstable();
        Family { n: self.n, members }
    }

    /// Parses the textual literal, e.g. `{1,2},{3}`; `{}` is the empty set.
    pub fn parse(n: usize, text: &str) -> Result<Self, SetError> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut members = Vec::new();
        let mut rest = compact.as_str();
        while !rest.is_empty() {
            let inner_end = rest
                .strip_prefix('{')
                .and_then(|r| r.find('}'))
                .ok_or_else(|| SetError::Literal(text.to_string()))?;
            let inner = &rest[1..inner_end + 1];
            let elems = if inner.is_empty() {
                Vec::new()
            } else {
                inner
                    .split(',')
                    .map(|t| t.parse::<usize>().map_err(|_| SetError::Literal(text.to_string())))
                    .collect::<Result<Vec<_>, _>>()?
            };
            members.push(SubsetCode::from_elements(n, elems)?);
            rest = &rest[inner_end + 2..];
            if let Some(r) = rest.strip_prefix(',') {
                if r.is_empty() {
                    return Err(SetError::Literal(text.to_string()));
                }
                rest = r;
            } else if !rest.is_empty() {
                return Err(SetError::Literal(text.to_string()));
            }
        }
        Family::new(n, members)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.members.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// `U(F)`: bitwise union of all members.
pub fn union_of(f: &Family) -> SubsetCode {
    SubsetCode(f.members.iter().fold(0, |acc, s| acc | s.0))
}

pub fn is_downset(f: &Family) -> bool {
    f.members.iter().all(|&s| {
        // removing any single element must stay inside; this implies closure by induction
        s.elements().all(|e| f.contains(SubsetCode(s.0 & !(1 << (e - 1)))))
    })
}

/// Smallest downset containing `f`. The closure of the empty family is `{∅}`.
pub fn downward_closure(f: &Family) -> Family {
    let mut seen = BTreeSet::new();
    seen.insert(SubsetCode::EMPTY);
    let mut stack: Vec<SubsetCode> = f.members.clone();
    while let Some(s) = stack.pop() {
        if !seen.insert(s) {
            continue;
        }
        for e in s.elements() {
            let sub = SubsetCode(s.0 & !(1 << (e - 1)));
            if !seen.contains(&sub) {
                stack.push(sub);
            }
        }
    }
    Family::from_sorted_unchecked(f.n, seen.into_iter().collect())
}

pub fn is_intersecting(f: &Family) -> bool {
    let m = &f.members;
    for i in 0..m.len() {
        if m[i].is_empty() {
            return false;
        }
        for j in i + 1..m.len() {
            if !m[i].intersects(m[j]) {
                return false;
            }
        }
    }
    true
}

/// Element of `[n]` contained in the most members, with that count.
/// Ties go to the smallest element; a family with no nonempty member yields `(1, 0)`.
pub fn max_star(f: &Family) -> (usize, usize) {
    let mut best = (1, 0);
    for i in 1..=f.n {
        let c = f.members.iter().filter(|s| s.contains(i)).count();
        if c > best.1 {
            best = (i, c);
        }
    }
    best
}

fn permutations(n: usize) -> &'static [Vec<u8>] {
    static CACHE: [OnceLock<Vec<Vec<u8>>>; MAX_CANON_N + 1] = [const { OnceLock::new() }; MAX_CANON_N + 1];
    CACHE[n].get_or_init(|| {
        // Heap's algorithm
        let mut perm: Vec<u8> = (0..n as u8).collect();
        let mut out = vec![perm.clone()];
        let mut c = vec![0usize; n];
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(c[i], i);
                }
                out.push(perm.clone());
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        out
    })
}

/// Lexicographically smallest image of `f` over all permutations of `[n]`,
/// comparing images as sorted member lists.
///
/// Panics if `n > MAX_CANON_N`.
pub fn canonical_form(f: &Family) -> Family {
    assert!(f.n <= MAX_CANON_N, "canonical_form supports n <= {MAX_CANON_N}");
    let mut best = f.members.clone();
    let mut image = Vec::with_capacity(best.len());
    for perm in permutations(f.n) {
        image.clear();
        image.extend(f.members.iter().map(|s| s.permute(perm)));
        image.sort_unstable();
        if image < best {
            std::mem::swap(&mut image, &mut best);
        }
    }
    Family::from_sorted_unchecked(f.n, best)
}

/// One canonical representative per isomorphism class of `k`-families of `m`-subsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoClassSet {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub representatives: Vec<Family>,
}

/// Subsets of `[n]` of size exactly `m`, ascending.
pub fn subsets_of_size(n: usize, m: usize) -> Vec<SubsetCode> {
    power_set(n).filter(|s| s.len() == m).collect()
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Enumerates isomorphism classes by extending every class representative of
/// size `j` with each absent `m`-set and deduplicating canonical forms. Every
/// `(j+1)`-family contains a `j`-subfamily isomorphic to some representative,
/// so no class is missed.
pub fn enumerate_iso_classes(n: usize, m: usize, k: usize) -> Result<IsoClassSet, SetError> {
    if n == 0 || n > MAX_CANON_N || m == 0 || m > n || k > binomial(n, m) {
        return Err(SetError::ClassParams { n, m, k });
    }
    let layer = subsets_of_size(n, m);
    let mut reps: BTreeSet<Family> = BTreeSet::new();
    reps.insert(Family::from_sorted_unchecked(n, Vec::new()));
    for _ in 0..k {
        let mut next = BTreeSet::new();
        for rep in &reps {
            for &s in &layer {
                if rep.contains(s) {
                    continue;
                }
                let mut members = rep.members.clone();
                members.push(s);
                members.sort_unstable();
                next.insert(canonical_form(&Family::from_sorted_unchecked(n, members)));
            }
        }
        reps = next;
    }
    Ok(IsoClassSet { n, m, k, representatives: reps.into_iter().collect() })
}
