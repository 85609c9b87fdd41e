//! Exact depth-first branch-and-bound with certificate emission.
//!
//! Every node re-optimizes one shared [`Simplex`] after changing variable
//! bounds in place. A node's LP duals become a `lin` (or `rnd`) derivation of
//! `objective <= bound` under the node's branching assumptions; an infeasible
//! node aggregates its Farkas multipliers into a contradiction; and an interior
//! node combines its two children with `uns`. The root derivation is then
//! assumption-free and closes the goal.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::certcheck::{Certificate, Derivation, Goal, Ref, Rule};
use crate::exactlp::{DualCertificate, LpError, LpProblem, LpStatus, Simplex};
use crate::modelgen::{LinearConstraint, Model, Problem, Sense};
use crate::rational::Rational;
use crate::setcore;

#[derive(Debug, Clone, Default)]
pub struct Limits {
    pub time: Option<Duration>,
    pub nodes: Option<u64>,
    /// Print progress lines to standard error.
    pub progress: bool,
}

impl Limits {
    pub fn none() -> Self {
        Limits::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("variable {0} has a fractional bound")]
    FractionalBound(String),
    #[error("the relaxation is unbounded")]
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Limit,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub best_solution: Option<Vec<Rational>>,
    pub best_objective: Option<Rational>,
    /// Upper bound on the optimum; `None` when infeasibility is proven.
    pub dual_bound: Option<Rational>,
    pub node_count: u64,
    pub pivots: u64,
    pub elapsed: Duration,
    /// Present when the search completed.
    pub certificate: Option<Certificate>,
}

/// What a finished subtree proves: the derivation index and the bound it
/// establishes (`None` for a contradiction).
struct Proof {
    der: usize,
    bound: Option<Rational>,
}

enum Node {
    Proved(Proof),
    /// Search stopped; the bound is still valid for the subtree.
    Aborted(Option<Rational>),
}

fn max_bound(a: Option<Rational>, b: Option<Rational>) -> Option<Rational> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, None) => a,
        (None, b) => b,
    }
}

struct Search<'a> {
    problem: &'a Problem,
    lp: Simplex,
    /// Active lower/upper bound references per variable.
    lb_ref: Vec<Ref>,
    ub_ref: Vec<Ref>,
    objective_integral: bool,
    derivations: Vec<Derivation>,
    solutions: Vec<Vec<(usize, Rational)>>,
    incumbent: Option<(Rational, Vec<Rational>)>,
    nodes: u64,
    limits: &'a Limits,
    start: Instant,
    aborted: bool,
    /// Bounds of subtrees still waiting on the current path.
    pending: Vec<Option<Rational>>,
    /// Max over bounds of finished subtrees.
    closed: Option<Rational>,
    last_report: Instant,
    reported_bound: Option<Rational>,
}

impl<'a> Search<'a> {
    fn push(&mut self, label: String, sense: Sense, rhs: Rational, terms: Vec<(usize, Rational)>, rule: Rule) -> usize {
        self.derivations.push(Derivation { stated: LinearConstraint { label, sense, rhs, terms }, rule });
        self.derivations.len() - 1
    }

    /// References and multipliers for an LP dual certificate.
    fn refs(&self, cert: &DualCertificate) -> Vec<(Ref, Rational)> {
        let mut out: Vec<(Ref, Rational)> = cert
            .row_multipliers
            .iter()
            .enumerate()
            .filter(|(_, y)| !y.is_zero())
            .map(|(i, y)| (Ref::Con(i), y.clone()))
            .collect();
        for (j, d) in cert.bound_multipliers.iter().enumerate() {
            if d.is_positive() {
                out.push((self.ub_ref[j], d.clone()));
            } else if d.is_negative() {
                out.push((self.lb_ref[j], d.clone()));
            }
        }
        out
    }

    fn contradiction(&mut self, label: String, rule: Rule) -> usize {
        self.push(label, Sense::Le, Rational::from_int(-1), Vec::new(), rule)
    }

    fn out_of_budget(&self) -> bool {
        self.limits.nodes.is_some_and(|n| self.nodes >= n) || self.limits.time.is_some_and(|t| self.start.elapsed() >= t)
    }

    fn global_bound(&self, current: Option<&Rational>) -> Option<Rational> {
        let mut b = max_bound(self.closed.clone(), current.cloned());
        for p in &self.pending {
            b = max_bound(b, p.clone());
        }
        b
    }

    fn report(&mut self, current: Option<&Rational>) {
        if !self.limits.progress || self.last_report.elapsed() < Duration::from_secs(2) {
            return;
        }
        self.last_report = Instant::now();
        let mut bound = self.global_bound(current);
        if let (Some(prev), Some(b)) = (&self.reported_bound, &bound) {
            if prev < b {
                bound = Some(prev.clone());
            }
        }
        self.reported_bound = bound.clone();
        let show = |v: Option<&Rational>| v.map_or("-".to_string(), |v| v.to_string());
        eprintln!(
            "nodes={} dual_bound={} incumbent={} elapsed={:.1}s",
            self.nodes,
            show(bound.as_ref()),
            show(self.incumbent.as_ref().map(|i| &i.0)),
            self.start.elapsed().as_secs_f64()
        );
    }

    fn node(&mut self, depth: usize, parent_bound: Option<Rational>) -> Result<Node, SolveError> {
        if self.aborted || self.out_of_budget() {
            self.aborted = true;
            return Ok(Node::Aborted(parent_bound));
        }
        self.nodes += 1;
        let id = self.nodes;
        match self.lp.solve() {
            LpStatus::Unbounded(..) => Err(SolveError::Unbounded),
            LpStatus::Infeasible(p) => {
                let refs = self.refs(&self.lp.farkas(p));
                let der = self.contradiction(format!("n{id}"), Rule::Lin(refs));
                Ok(Node::Proved(Proof { der, bound: None }))
            }
            LpStatus::Optimal => self.optimal_node(id, depth),
        }
    }

    fn optimal_node(&mut self, id: u64, depth: usize) -> Result<Node, SolveError> {
        let value = self.lp.objective_value();
        let cert = self.lp.optimality_certificate();
        let refs = self.refs(&cert);
        let obj = self.problem.objective.clone();
        let (bound, rule) = if self.objective_integral && !value.is_integer() {
            (value.floor(), Rule::Rnd(refs))
        } else {
            (value.clone(), Rule::Lin(refs))
        };
        self.report(Some(&bound));
        let prune = self.incumbent.as_ref().is_some_and(|(best, _)| bound <= *best);
        let frac = if prune { None } else { self.branching_variable() };
        if frac.is_none() && !prune {
            // integral LP optimum
            let x = self.lp.primal().to_vec();
            debug_assert!(self.problem.is_feasible(&x));
            if self.incumbent.as_ref().is_none_or(|(best, _)| value > *best) {
                self.solutions.push(x.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(j, v)| (j, v.clone())).collect());
                self.incumbent = Some((value.clone(), x));
            }
        }
        let Some(j) = frac else {
            let der = self.push(format!("n{id}"), Sense::Le, bound.clone(), obj, rule);
            self.closed = max_bound(self.closed.take(), Some(bound.clone()));
            return Ok(Node::Proved(Proof { der, bound: Some(bound) }));
        };

        let v = self.lp.primal()[j].clone();
        let (down, up) = (v.floor(), v.ceil());
        let (old_lb, old_ub) = (self.lp.lower(j).clone(), self.lp.upper(j).cloned());
        let (old_lb_ref, old_ub_ref) = (self.lb_ref[j], self.ub_ref[j]);
        let one = || vec![(j, Rational::one())];

        let a1 = self.push(format!("n{id}d"), Sense::Le, down.clone(), one(), Rule::Asm);
        self.lp.set_bounds(j, old_lb.clone(), Some(down));
        self.ub_ref[j] = Ref::Der(a1);
        self.pending.push(Some(bound.clone()));
        let left = self.node(depth + 1, Some(bound.clone()));
        self.pending.pop();
        self.ub_ref[j] = old_ub_ref;
        let left = left?;

        let a2 = self.push(format!("n{id}u"), Sense::Ge, up.clone(), one(), Rule::Asm);
        self.lp.set_bounds(j, up, old_ub.clone());
        self.lb_ref[j] = Ref::Der(a2);
        let right = self.node(depth + 1, Some(bound.clone()));
        self.lb_ref[j] = old_lb_ref;
        self.lp.set_bounds(j, old_lb, old_ub);
        let right = right?;

        match (left, right) {
            (Node::Proved(l), Node::Proved(r)) => {
                let b = max_bound(l.bound, r.bound);
                let rule = Rule::Uns { r1: Ref::Der(l.der), a1: Ref::Der(a1), r2: Ref::Der(r.der), a2: Ref::Der(a2) };
                let der = match &b {
                    Some(b) => self.push(format!("n{id}"), Sense::Le, b.clone(), self.problem.objective.clone(), rule),
                    None => self.contradiction(format!("n{id}"), rule),
                };
                Ok(Node::Proved(Proof { der, bound: b }))
            }
            (l, r) => {
                let part = |n: Node| match n {
                    Node::Proved(p) => p.bound,
                    Node::Aborted(b) => b,
                };
                Ok(Node::Aborted(max_bound(part(l), part(r))))
            }
        }
    }

    /// Most fractional variable, lowest index on ties.
    fn branching_variable(&self) -> Option<usize> {
        let half = Rational::new(1, 2);
        let mut best: Option<(usize, Rational)> = None;
        for (j, v) in self.lp.primal().iter().enumerate() {
            if v.is_integer() {
                continue;
            }
            let dist = (&v.fract() - &half).abs();
            if best.as_ref().is_none_or(|(_, d)| dist < *d) {
                best = Some((j, dist));
            }
        }
        best.map(|(j, _)| j)
    }
}

/// Solves a maximization problem over integer variables exactly.
pub fn solve_problem(problem: &Problem, limits: &Limits) -> Result<SolveResult, SolveError> {
    for v in &problem.variables {
        if !v.lb.is_integer() || v.ub.as_ref().is_some_and(|u| !u.is_integer()) {
            return Err(SolveError::FractionalBound(v.name.clone()));
        }
    }
    let lp_problem = LpProblem::relaxation(problem);
    lp_problem.validate()?;
    let n = problem.variables.len();
    let start = Instant::now();
    let mut search = Search {
        problem,
        lp: Simplex::new(&lp_problem),
        lb_ref: (0..n).map(Ref::Lb).collect(),
        ub_ref: (0..n).map(Ref::Ub).collect(),
        objective_integral: problem.objective.iter().all(|(_, c)| c.is_integer()),
        derivations: Vec::new(),
        solutions: Vec::new(),
        incumbent: None,
        nodes: 0,
        limits,
        start,
        aborted: false,
        pending: Vec::new(),
        closed: None,
        last_report: start,
        reported_bound: None,
    };
    let root = search.node(0, None)?;
    let elapsed = start.elapsed();
    let pivots = search.lp.pivots();
    let (best_objective, best_solution) = match search.incumbent.take() {
        Some((v, x)) => (Some(v), Some(x)),
        None => (None, None),
    };
    let mut result = SolveResult {
        status: SolveStatus::Limit,
        best_solution,
        best_objective: best_objective.clone(),
        dual_bound: None,
        node_count: search.nodes,
        pivots,
        elapsed,
        certificate: None,
    };
    match root {
        Node::Aborted(b) => {
            result.dual_bound = b;
        }
        Node::Proved(proof) => {
            debug_assert_eq!(proof.bound, best_objective);
            let goal = match &best_objective {
                Some(v) => Goal::Range(v.clone(), v.clone()),
                None => Goal::Infeasible,
            };
            result.status = if best_objective.is_some() { SolveStatus::Optimal } else { SolveStatus::Infeasible };
            result.dual_bound = proof.bound;
            result.certificate = Some(Certificate {
                problem: problem.clone(),
                goal,
                solutions: search.solutions,
                derivations: search.derivations,
            });
        }
    }
    Ok(result)
}

pub fn solve_ip(model: &Model, limits: &Limits) -> Result<SolveResult, SolveError> {
    solve_problem(&model.problem, limits)
}

/// Whether `z` equals the largest star `max_i Σ_{S∋i} x_S` in a solution of
/// an OPT or RED model. Models without `z` trivially pass.
pub fn z_is_tight(model: &Model, x: &[Rational]) -> bool {
    let Some(z) = model.z() else {
        return true;
    };
    let star = (1..=model.n)
        .map(|i| {
            setcore::nonempty_subsets(model.n).filter(|s| s.contains(i)).map(|s| x[model.x(s)].clone()).sum::<Rational>()
        })
        .max()
        .unwrap_or_else(Rational::zero);
    x[z] == star
}
