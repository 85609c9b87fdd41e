//! LP ground truth by enumerating basic solutions. Data are small integers,
//! so every candidate vertex is solved with fraction-free Gauss-Jordan
//! elimination in i128 and compared against the rows without any division.

use num_bigint::BigInt;
use num_rational::BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Half {
    pub a: Vec<i64>,
    pub dir: Dir,
    pub b: i64,
}

/// A small LP with integer data; every variable has a finite lower bound.
#[derive(Debug, Clone)]
pub struct SmallLp {
    pub n: usize,
    pub rows: Vec<Half>,
    pub lower: Vec<i64>,
    pub upper: Vec<Option<i64>>,
    pub c: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Truth {
    Infeasible,
    Unbounded,
    Optimal(BigRational),
}

/// Rows plus the bound hyperplanes.
fn all_constraints(lp: &SmallLp) -> Vec<Half> {
    let mut out = lp.rows.clone();
    for j in 0..lp.n {
        let mut e = vec![0; lp.n];
        e[j] = 1;
        out.push(Half { a: e.clone(), dir: Dir::Ge, b: lp.lower[j] });
        if let Some(u) = lp.upper[j] {
            out.push(Half { a: e, dir: Dir::Le, b: u });
        }
    }
    out
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

/// Number of linear systems the oracle will solve.
pub fn work(lp: &SmallLp) -> u128 {
    let m = lp.rows.len() + lp.n + lp.upper.iter().flatten().count();
    binomial(m, lp.n) + binomial(m + 1, lp.n)
}

/// Solves the square system picked by `idx`; returns `(N, D)` with `x = N / D`
/// and `D > 0`, or `None` when singular.
fn solve_square(cons: &[Half], idx: &[usize], n: usize) -> Option<(Vec<i128>, i128)> {
    let mut m: Vec<Vec<i128>> = idx
        .iter()
        .map(|&i| cons[i].a.iter().map(|&v| v as i128).chain([cons[i].b as i128]).collect())
        .collect();
    let mut prev: i128 = 1;
    for k in 0..n {
        let p = (k..n).find(|&r| m[r][k] != 0)?;
        m.swap(k, p);
        for i in 0..n {
            if i == k {
                continue;
            }
            for j in 0..=n {
                if j == k {
                    continue;
                }
                let v = m[k][k] * m[i][j] - m[i][k] * m[k][j];
                assert_eq!(v % prev, 0, "inexact Bareiss division");
                m[i][j] = v / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    let d = m[0][0];
    debug_assert!((0..n).all(|i| m[i][i] == d));
    let mut num: Vec<i128> = (0..n).map(|i| m[i][n]).collect();
    if d < 0 {
        num.iter_mut().for_each(|v| *v = -*v);
        return Some((num, -d));
    }
    Some((num, d))
}

fn satisfies(h: &Half, num: &[i128], d: i128) -> bool {
    let lhs: i128 = h.a.iter().zip(num).map(|(&a, &x)| a as i128 * x).sum();
    let rhs = h.b as i128 * d;
    match h.dir {
        Dir::Le => lhs <= rhs,
        Dir::Ge => lhs >= rhs,
        Dir::Eq => lhs == rhs,
    }
}

/// Largest `c·x` over the vertices of `{x : cons}`, or `None` if there are none.
fn best_vertex(cons: &[Half], n: usize, c: &[i64]) -> Option<BigRational> {
    let mut best: Option<(i128, i128)> = None;
    let mut idx: Vec<usize> = (0..n).collect();
    let m = cons.len();
    if m < n {
        return None;
    }
    loop {
        if let Some((num, d)) = solve_square(cons, &idx, n) {
            if cons.iter().all(|h| satisfies(h, &num, d)) {
                let v: i128 = c.iter().zip(&num).map(|(&a, &x)| a as i128 * x).sum();
                if best.is_none_or(|(bv, bd)| v * bd > bv * d) {
                    best = Some((v, d));
                }
            }
        }
        // next combination in lexicographic order
        let Some(pos) = (0..n).rev().find(|&i| idx[i] < m - n + i) else {
            break;
        };
        idx[pos] += 1;
        for i in pos + 1..n {
            idx[i] = idx[i - 1] + 1;
        }
    }
    best.map(|(v, d)| BigRational::new(BigInt::from(v), BigInt::from(d)))
}

/// Every lower bound is finite, so the feasible region contains no line and
/// has a vertex when nonempty, and its recession cone lies in the nonnegative
/// orthant. The LP is unbounded exactly when the cone slice `Σ r = 1` has a
/// vertex with positive objective.
pub fn truth(lp: &SmallLp) -> Truth {
    let cons = all_constraints(lp);
    let Some(best) = best_vertex(&cons, lp.n, &lp.c) else {
        return Truth::Infeasible;
    };
    let mut cone: Vec<Half> = cons.iter().map(|h| Half { a: h.a.clone(), dir: h.dir, b: 0 }).collect();
    cone.push(Half { a: vec![1; lp.n], dir: Dir::Eq, b: 1 });
    match best_vertex(&cone, lp.n, &lp.c) {
        Some(r) if r > BigRational::from_integer(0.into()) => Truth::Unbounded,
        _ => Truth::Optimal(best),
    }
}
