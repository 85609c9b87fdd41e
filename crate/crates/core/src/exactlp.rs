//! Exact rational simplex for bounded linear programs.
//!
//! The solver works on a condensed tableau: every row `i` of the constraint
//! matrix gets a logical variable `r_i = a_i · x` whose bounds encode the row
//! sense, and the tableau expresses the `m` basic variables in terms of the
//! `n` nonbasic ones. Pivots therefore cost `O(m·n)` regardless of how many
//! rows are tight. Nonbasic variables always sit at a finite bound.
//!
//! Pivot selection follows Bland's smallest-index rule in both the primal and
//! the dual simplex, which guarantees termination. A search starts with the
//! dual simplex when the initial basis is dual feasible; otherwise the dual
//! simplex runs on the zero objective to find a feasible basis (its failure
//! row is the Farkas certificate), and the primal simplex finishes.

use thiserror::Error;

use crate::modelgen::{Problem, Sense};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("row {row} references variable {var} but the problem has {num_vars} variables")]
    IndexOutOfRange { row: usize, var: usize, num_vars: usize },
    #[error("row {0} has unsorted or duplicate term indices")]
    UnsortedTerms(usize),
    #[error("objective has unsorted, duplicate, or out-of-range indices")]
    BadObjective,
    #[error("variable {0} has lower bound above its upper bound")]
    InvertedBounds(usize),
    #[error("bound vectors have length {lower}/{upper}, expected {num_vars}")]
    DimensionMismatch { lower: usize, upper: usize, num_vars: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpRow {
    pub terms: Vec<(usize, Rational)>,
    pub sense: Sense,
    pub rhs: Rational,
}

/// `max c·x` subject to rows and `lower <= x <= upper`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    pub num_vars: usize,
    pub rows: Vec<LpRow>,
    pub lower: Vec<Rational>,
    /// `None` is `+inf`.
    pub upper: Vec<Option<Rational>>,
    pub objective: Vec<(usize, Rational)>,
}

impl LpProblem {
    /// Continuous relaxation of an integer program.
    pub fn relaxation(p: &Problem) -> Self {
        LpProblem {
            num_vars: p.variables.len(),
            rows: p
                .constraints
                .iter()
                .map(|c| LpRow { terms: c.terms.clone(), sense: c.sense, rhs: c.rhs.clone() })
                .collect(),
            lower: p.variables.iter().map(|v| v.lb.clone()).collect(),
            upper: p.variables.iter().map(|v| v.ub.clone()).collect(),
            objective: p.objective.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars;
        if self.lower.len() != n || self.upper.len() != n {
            return Err(LpError::DimensionMismatch { lower: self.lower.len(), upper: self.upper.len(), num_vars: n });
        }
        if let Some(j) = (0..n).find(|&j| self.upper[j].as_ref().is_some_and(|u| *u < self.lower[j])) {
            return Err(LpError::InvertedBounds(j));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if let Some((var, _)) = row.terms.iter().find(|(j, _)| *j >= n) {
                return Err(LpError::IndexOutOfRange { row: i, var: *var, num_vars: n });
            }
            if row.terms.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(LpError::UnsortedTerms(i));
            }
        }
        if self.objective.iter().any(|(j, _)| *j >= n) || self.objective.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(LpError::BadObjective);
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective.iter().map(|(j, c)| c * &x[*j]).sum()
    }

    /// Exact primal feasibility of a point.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        (0..self.num_vars).all(|j| x[j] >= self.lower[j] && self.upper[j].as_ref().is_none_or(|u| x[j] <= *u))
            && self.rows.iter().all(|r| {
                let a: Rational = r.terms.iter().map(|(j, c)| c * &x[*j]).sum();
                match r.sense {
                    Sense::Le => a <= r.rhs,
                    Sense::Ge => a >= r.rhs,
                    Sense::Eq => a == r.rhs,
                }
            })
    }
}

/// Row and bound multipliers that aggregate to `target · x <= rhs`.
///
/// A positive row multiplier uses the row's upper side (`L` or `E` rows), a
/// negative one its lower side. A positive bound multiplier uses `x_j <= u_j`,
/// a negative one `x_j >= l_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualCertificate {
    pub row_multipliers: Vec<Rational>,
    pub bound_multipliers: Vec<Rational>,
    pub rhs: Rational,
}

/// Combines row multipliers `y` into a bound on `target · x`, cancelling the
/// residual `target - yᵀA` with the given variable bounds. Returns `None` if a
/// multiplier has the wrong sign for its row or needs an infinite bound.
pub fn aggregate(
    rows: &[LpRow],
    lower: &[Rational],
    upper: &[Option<Rational>],
    target: &[Rational],
    y: &[Rational],
) -> Option<DualCertificate> {
    let mut residual: Vec<Rational> = target.to_vec();
    let mut rhs = Rational::zero();
    for (row, yi) in rows.iter().zip(y) {
        if yi.is_zero() {
            continue;
        }
        match (row.sense, yi.is_positive()) {
            (Sense::Ge, true) | (Sense::Le, false) => return None,
            _ => {}
        }
        rhs += yi * &row.rhs;
        for (j, a) in &row.terms {
            residual[*j] -= yi * a;
        }
    }
    for (j, d) in residual.iter().enumerate() {
        if d.is_positive() {
            rhs += d * upper[j].as_ref()?;
        } else if d.is_negative() {
            rhs += d * &lower[j];
        }
    }
    Some(DualCertificate { row_multipliers: y.to_vec(), bound_multipliers: residual, rhs })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpOptimum {
    pub primal: Vec<Rational>,
    pub value: Rational,
    /// Multipliers proving `c·x <= value`; `rhs == value`.
    pub dual: DualCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(LpOptimum),
    /// Multipliers aggregating to `0 <= rhs` with `rhs < 0`.
    Infeasible(DualCertificate),
    /// A feasible point and a direction of unbounded improvement.
    Unbounded { point: Vec<Rational>, ray: Vec<Rational> },
}

impl LpOutcome {
    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal(o) => Some(&o.value),
            _ => None,
        }
    }
}

/// Solves an LP from scratch.
pub fn solve_lp(p: &LpProblem) -> Result<LpOutcome, LpError> {
    p.validate()?;
    let mut s = Simplex::new(p);
    let status = s.solve();
    Ok(s.outcome(status))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pos {
    Basic(usize),
    Nonbasic(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    /// Row of the tableau whose basic variable cannot reach its bound.
    Infeasible(usize),
    /// Entering column with no blocking bound and its direction.
    Unbounded(usize, bool),
}

/// Simplex state that can be re-optimized after bound changes.
#[derive(Clone)]
pub struct Simplex {
    n: usize,
    m: usize,
    rows: Vec<LpRow>,
    cost: Vec<Rational>,
    /// Bounds of all `n + m` variables; structural lower bounds are finite.
    lb: Vec<Option<Rational>>,
    ub: Vec<Option<Rational>>,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    pos: Vec<Pos>,
    at_upper: Vec<bool>,
    tab: Vec<Vec<Rational>>,
    dj: Vec<Rational>,
    value: Vec<Rational>,
    pivots: u64,
}

impl Simplex {
    /// Caller validates the problem first.
    pub fn new(p: &LpProblem) -> Self {
        let (n, m) = (p.num_vars, p.rows.len());
        let mut cost = vec![Rational::zero(); n];
        for (j, c) in &p.objective {
            cost[*j] = c.clone();
        }
        let mut lb: Vec<Option<Rational>> = p.lower.iter().cloned().map(Some).collect();
        let mut ub = p.upper.clone();
        for r in &p.rows {
            let (l, u) = match r.sense {
                Sense::Le => (None, Some(r.rhs.clone())),
                Sense::Ge => (Some(r.rhs.clone()), None),
                Sense::Eq => (Some(r.rhs.clone()), Some(r.rhs.clone())),
            };
            lb.push(l);
            ub.push(u);
        }
        let mut tab = vec![vec![Rational::zero(); n]; m];
        for (i, r) in p.rows.iter().enumerate() {
            for (j, a) in &r.terms {
                tab[i][*j] = a.clone();
            }
        }
        // start dual feasible where possible: positive-cost variables at a finite upper bound
        let at_upper: Vec<bool> = (0..n + m).map(|j| j < n && cost[j].is_positive() && ub[j].is_some()).collect();
        let mut value = vec![Rational::zero(); n + m];
        for j in 0..n {
            value[j] = if at_upper[j] { ub[j].clone().unwrap() } else { lb[j].clone().unwrap() };
        }
        for (i, r) in p.rows.iter().enumerate() {
            value[n + i] = r.terms.iter().map(|(j, a)| a * &value[*j]).sum();
        }
        let mut pos = Vec::with_capacity(n + m);
        pos.extend((0..n).map(Pos::Nonbasic));
        pos.extend((0..m).map(Pos::Basic));
        Simplex {
            n,
            m,
            rows: p.rows.clone(),
            dj: cost.clone(),
            cost,
            lb,
            ub,
            basic: (n..n + m).collect(),
            nonbasic: (0..n).collect(),
            pos,
            at_upper,
            tab,
            value,
            pivots: 0,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn pivots(&self) -> u64 {
        self.pivots
    }

    pub fn rows(&self) -> &[LpRow] {
        &self.rows
    }

    /// Current values of the structural variables.
    pub fn primal(&self) -> &[Rational] {
        &self.value[..self.n]
    }

    pub fn objective_value(&self) -> Rational {
        (0..self.n).filter(|&j| !self.cost[j].is_zero()).map(|j| &self.cost[j] * &self.value[j]).sum()
    }

    pub fn lower(&self, j: usize) -> &Rational {
        self.lb[j].as_ref().expect("structural lower bounds are finite")
    }

    pub fn upper(&self, j: usize) -> Option<&Rational> {
        self.ub[j].as_ref()
    }

    pub fn structural_lower(&self) -> Vec<Rational> {
        (0..self.n).map(|j| self.lower(j).clone()).collect()
    }

    pub fn structural_upper(&self) -> Vec<Option<Rational>> {
        self.ub[..self.n].to_vec()
    }

    /// Changes the bounds of structural variable `j`. The basis is kept; a
    /// nonbasic variable moves to the bound its reduced cost prefers.
    pub fn set_bounds(&mut self, j: usize, lower: Rational, upper: Option<Rational>) {
        assert!(j < self.n);
        self.lb[j] = Some(lower);
        self.ub[j] = upper;
        if let Pos::Nonbasic(k) = self.pos[j] {
            let d = &self.dj[k];
            let to_upper = if d.is_positive() {
                self.ub[j].is_some()
            } else if d.is_negative() {
                false
            } else {
                self.at_upper[j] && self.ub[j].is_some()
            };
            self.at_upper[j] = to_upper;
            let target = if to_upper { self.ub[j].clone().unwrap() } else { self.lb[j].clone().unwrap() };
            let delta = &target - &self.value[j];
            if !delta.is_zero() {
                self.shift_nonbasic(k, &delta);
            }
        }
    }

    fn shift_nonbasic(&mut self, k: usize, delta: &Rational) {
        let j = self.nonbasic[k];
        self.value[j] += delta;
        for i in 0..self.m {
            let t = &self.tab[i][k];
            if !t.is_zero() {
                let upd = t * delta;
                self.value[self.basic[i]] += upd;
            }
        }
    }

    fn is_fixed(&self, v: usize) -> bool {
        matches!((&self.lb[v], &self.ub[v]), (Some(l), Some(u)) if l == u)
    }

    fn can_increase(&self, v: usize) -> bool {
        !self.at_upper[v] && !self.is_fixed(v)
    }

    fn can_decrease(&self, v: usize) -> bool {
        self.at_upper[v] && !self.is_fixed(v)
    }

    fn dual_feasible(&self) -> bool {
        (0..self.n).all(|k| {
            let v = self.nonbasic[k];
            let d = &self.dj[k];
            self.is_fixed(v)
                || (d.is_positive() && self.at_upper[v])
                || (d.is_negative() && !self.at_upper[v])
                || d.is_zero()
        })
    }

    fn primal_infeasible_row(&self) -> Option<(usize, bool)> {
        // smallest variable index among violated basics
        let mut best: Option<(usize, usize, bool)> = None;
        for i in 0..self.m {
            let v = self.basic[i];
            let below = self.lb[v].as_ref().is_some_and(|l| self.value[v] < *l);
            let above = self.ub[v].as_ref().is_some_and(|u| self.value[v] > *u);
            if (below || above) && best.is_none_or(|(bv, _, _)| v < bv) {
                best = Some((v, i, below));
            }
        }
        best.map(|(_, i, below)| (i, below))
    }

    /// Full solve from the current basis.
    pub fn solve(&mut self) -> LpStatus {
        if self.dual_feasible() {
            return self.dual_simplex(true);
        }
        match self.dual_simplex(false) {
            LpStatus::Optimal => self.primal_simplex(),
            other => other,
        }
    }

    /// Dual simplex; with `use_costs == false` every ratio is zero and the
    /// method only restores primal feasibility.
    fn dual_simplex(&mut self, use_costs: bool) -> LpStatus {
        while let Some((p, below)) = self.primal_infeasible_row() {
            let leaving = self.basic[p];
            let mut best: Option<(usize, Rational)> = None;
            for k in 0..self.n {
                let t = &self.tab[p][k];
                if t.is_zero() {
                    continue;
                }
                let v = self.nonbasic[k];
                let eligible = if below == t.is_positive() { self.can_increase(v) } else { self.can_decrease(v) };
                if !eligible {
                    continue;
                }
                let ratio = if use_costs { (&self.dj[k] / t).abs() } else { Rational::zero() };
                let better = match &best {
                    None => true,
                    Some((bk, br)) => ratio < *br || (ratio == *br && v < self.nonbasic[*bk]),
                };
                if better {
                    best = Some((k, ratio));
                }
            }
            let Some((q, _)) = best else {
                return LpStatus::Infeasible(p);
            };
            let target = if below { self.lb[leaving].clone().unwrap() } else { self.ub[leaving].clone().unwrap() };
            let delta = &(&target - &self.value[leaving]) / &self.tab[p][q];
            self.shift_nonbasic(q, &delta);
            self.value[leaving] = target;
            self.pivot(p, q);
            self.at_upper[leaving] = !below;
        }
        LpStatus::Optimal
    }

    /// Primal simplex from a primal feasible basis.
    fn primal_simplex(&mut self) -> LpStatus {
        loop {
            let mut entering: Option<(usize, bool)> = None;
            for k in 0..self.n {
                let v = self.nonbasic[k];
                let d = &self.dj[k];
                let cand = if d.is_positive() && self.can_increase_unbounded(v) {
                    Some(true)
                } else if d.is_negative() && self.can_decrease(v) {
                    Some(false)
                } else {
                    None
                };
                if let Some(up) = cand {
                    if entering.is_none_or(|(bk, _)| v < self.nonbasic[bk]) {
                        entering = Some((k, up));
                    }
                }
            }
            let Some((q, up)) = entering else {
                return LpStatus::Optimal;
            };
            let ev = self.nonbasic[q];
            // ratio test: (limit, variable index, row or None for a bound flip, leaves at upper)
            let mut block: Option<(Rational, usize, Option<usize>, bool)> = None;
            if let (Some(l), Some(u)) = (&self.lb[ev], &self.ub[ev]) {
                block = Some((u - l, ev, None, false));
            }
            for i in 0..self.m {
                let t = &self.tab[i][q];
                if t.is_zero() {
                    continue;
                }
                let rate_pos = t.is_positive() == up;
                let bv = self.basic[i];
                let limit = if rate_pos {
                    self.ub[bv].as_ref().map(|u| (&(u - &self.value[bv]) / t).abs())
                } else {
                    self.lb[bv].as_ref().map(|l| (&(&self.value[bv] - l) / t).abs())
                };
                if let Some(lim) = limit {
                    let better = match &block {
                        None => true,
                        Some((bl, bvar, brow, _)) => {
                            lim < *bl || (lim == *bl && brow.is_some() && bv < *bvar)
                        }
                    };
                    if better {
                        block = Some((lim, bv, Some(i), rate_pos));
                    }
                }
            }
            let Some((theta, _, row, leaves_upper)) = block else {
                return LpStatus::Unbounded(q, up);
            };
            let delta = if up { theta } else { -theta };
            self.shift_nonbasic(q, &delta);
            match row {
                None => self.at_upper[ev] = up,
                Some(p) => {
                    let leaving = self.basic[p];
                    self.pivot(p, q);
                    self.at_upper[leaving] = leaves_upper;
                }
            }
        }
    }

    fn can_increase_unbounded(&self, v: usize) -> bool {
        !self.at_upper[v] && !self.is_fixed(v)
    }

    fn pivot(&mut self, p: usize, q: usize) {
        self.pivots += 1;
        let inv = self.tab[p][q].recip();
        let mut prow = std::mem::take(&mut self.tab[p]);
        for (k, t) in prow.iter_mut().enumerate() {
            if k == q {
                *t = inv.clone();
            } else if !t.is_zero() {
                *t = -(&*t * &inv);
            }
        }
        let nz: Vec<usize> = (0..self.n).filter(|&k| k != q && !prow[k].is_zero()).collect();
        let eliminate = |row: &mut Vec<Rational>| {
            let f = std::mem::take(&mut row[q]);
            if f.is_zero() {
                return;
            }
            for &k in &nz {
                let upd = &f * &prow[k];
                row[k] += upd;
            }
            row[q] = &f * &inv;
        };
        for (i, row) in self.tab.iter_mut().enumerate() {
            if i != p {
                eliminate(row);
            }
        }
        eliminate(&mut self.dj);
        self.tab[p] = prow;
        let (bv, nv) = (self.basic[p], self.nonbasic[q]);
        self.basic[p] = nv;
        self.nonbasic[q] = bv;
        self.pos[nv] = Pos::Basic(p);
        self.pos[bv] = Pos::Nonbasic(q);
    }

    /// Dual values from the objective row: the coefficient of each nonbasic
    /// logical, zero for basic ones.
    pub fn row_duals(&self) -> Vec<Rational> {
        (0..self.m)
            .map(|i| match self.pos[self.n + i] {
                Pos::Nonbasic(k) => self.dj[k].clone(),
                Pos::Basic(_) => Rational::zero(),
            })
            .collect()
    }

    /// Multipliers `λ` with `Σ λ_i (a_i·x - r_i)` equal to tableau row `p`
    /// read as `x_B - Σ T_pk x_N`.
    fn row_combination(&self, p: usize) -> Vec<Rational> {
        (0..self.m)
            .map(|i| match self.pos[self.n + i] {
                Pos::Basic(r) if r == p => Rational::from_int(-1),
                Pos::Basic(_) => Rational::zero(),
                Pos::Nonbasic(k) => self.tab[p][k].clone(),
            })
            .collect()
    }

    /// Farkas multipliers for an infeasible row, checked against the current bounds.
    pub fn farkas(&self, p: usize) -> DualCertificate {
        let lambda = self.row_combination(p);
        let zero = vec![Rational::zero(); self.n];
        let (lo, up) = (self.structural_lower(), self.structural_upper());
        for y in [lambda.clone(), lambda.iter().map(|v| -v).collect()] {
            if let Some(cert) = aggregate(&self.rows, &lo, &up, &zero, &y) {
                if cert.rhs.is_negative() {
                    return cert;
                }
            }
        }
        unreachable!("an infeasible tableau row always yields a Farkas certificate")
    }

    /// Dual certificate for the current optimal basis.
    pub fn optimality_certificate(&self) -> DualCertificate {
        let y = self.row_duals();
        let cert = aggregate(&self.rows, &self.structural_lower(), &self.structural_upper(), &self.cost, &y)
            .expect("optimal bases are dual feasible");
        debug_assert_eq!(cert.rhs, self.objective_value());
        cert
    }

    fn ray(&self, q: usize, up: bool) -> Vec<Rational> {
        let sign = if up { Rational::one() } else { Rational::from_int(-1) };
        let mut ray = vec![Rational::zero(); self.n];
        let ev = self.nonbasic[q];
        if ev < self.n {
            ray[ev] = sign.clone();
        }
        for i in 0..self.m {
            let bv = self.basic[i];
            if bv < self.n {
                ray[bv] = &self.tab[i][q] * &sign;
            }
        }
        ray
    }

    pub fn outcome(&self, status: LpStatus) -> LpOutcome {
        match status {
            LpStatus::Optimal => LpOutcome::Optimal(LpOptimum {
                primal: self.primal().to_vec(),
                value: self.objective_value(),
                dual: self.optimality_certificate(),
            }),
            LpStatus::Infeasible(p) => LpOutcome::Infeasible(self.farkas(p)),
            LpStatus::Unbounded(q, up) => LpOutcome::Unbounded { point: self.primal().to_vec(), ray: self.ray(q, up) },
        }
    }
}
