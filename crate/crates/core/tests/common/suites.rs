//! Randomized equivalence suites: exact LP outcomes against vertex
//! enumeration and branch-and-bound against exhaustive 0/1 enumeration.

use chvatal::bbsolver::{solve_problem, Limits, SolveStatus};
use chvatal::certcheck::{check_certificate, write_certificate};
use chvatal::exactlp::{solve_lp, DualCertificate, LpOutcome, LpProblem, LpRow};
use chvatal::modelgen::{LinearConstraint, Problem, Sense, Variable};
use chvatal::Rational;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::vertex::{self, Dir, Half, SmallLp, Truth};
use super::{big, refcheck};

#[derive(Debug, Default)]
pub struct SuiteReport {
    pub cases: usize,
    /// Outcome counts: optimal, infeasible, unbounded.
    pub outcomes: [usize; 3],
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        format!(
            "{} cases (optimal {}, infeasible {}, unbounded {}), {} failures",
            self.cases,
            self.outcomes[0],
            self.outcomes[1],
            self.outcomes[2],
            self.failures.len()
        )
    }
}

/// `eq` out of 20 rows are equations; the rest split 2:1 between `L` and `G`.
fn pick_dir(rng: &mut ChaCha8Rng, eq: u32) -> Dir {
    let r = rng.gen_range(0..20);
    if r < eq {
        Dir::Eq
    } else if (r - eq) % 3 < 2 {
        Dir::Le
    } else {
        Dir::Ge
    }
}

fn to_sense(d: Dir) -> Sense {
    match d {
        Dir::Le => Sense::Le,
        Dir::Ge => Sense::Ge,
        Dir::Eq => Sense::Eq,
    }
}

/// Up to 8 variables and 12 rows, resampled while vertex enumeration would
/// need more than `max_work` linear solves.
pub fn random_lp(rng: &mut ChaCha8Rng, max_work: u128) -> SmallLp {
    loop {
        let n = rng.gen_range(1..=8);
        let m = rng.gen_range(0..=12);
        let rows = (0..m)
            .map(|_| {
                let a = (0..n).map(|_| if rng.gen_bool(0.6) { rng.gen_range(-3..=3) } else { 0 }).collect();
                let dir = pick_dir(rng, 2);
                let b = if dir == Dir::Ge { rng.gen_range(-10..=2) } else { rng.gen_range(-2..=10) };
                Half { a, dir, b }
            })
            .collect();
        let lower: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=1)).collect();
        let upper = lower.iter().map(|&l| rng.gen_bool(0.7).then(|| l + rng.gen_range(0..=4))).collect();
        let c = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
        let lp = SmallLp { n, rows, lower, upper, c };
        if vertex::work(&lp) <= max_work {
            return lp;
        }
    }
}

fn sparse(a: &[i64]) -> Vec<(usize, Rational)> {
    a.iter().enumerate().filter(|(_, &v)| v != 0).map(|(j, &v)| (j, Rational::from_int(v))).collect()
}

pub fn to_lp_problem(lp: &SmallLp) -> LpProblem {
    LpProblem {
        num_vars: lp.n,
        rows: lp.rows.iter().map(|h| LpRow { terms: sparse(&h.a), sense: to_sense(h.dir), rhs: Rational::from_int(h.b) }).collect(),
        lower: lp.lower.iter().map(|&v| Rational::from_int(v)).collect(),
        upper: lp.upper.iter().map(|u| u.map(Rational::from_int)).collect(),
        objective: sparse(&lp.c),
    }
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

/// Re-derives the bound a dual certificate proves on `target · x`, checking
/// every sign and the residual, all in independent arithmetic.
fn dual_bound(lp: &SmallLp, target: &[i64], d: &DualCertificate) -> Result<BigRational, String> {
    if d.row_multipliers.len() != lp.rows.len() || d.bound_multipliers.len() != lp.n {
        return Err("dual has the wrong shape".into());
    }
    let mut residual: Vec<BigRational> = target.iter().map(|&v| int(v)).collect();
    let mut rhs = BigRational::zero();
    for (h, y) in lp.rows.iter().zip(&d.row_multipliers) {
        let y = big(y);
        let ok = match h.dir {
            Dir::Le => !y.is_negative(),
            Dir::Ge => !y.is_positive(),
            Dir::Eq => true,
        };
        if !ok {
            return Err(format!("row multiplier {y} has the wrong sign"));
        }
        rhs += &y * int(h.b);
        for (j, &a) in h.a.iter().enumerate() {
            residual[j] -= &y * int(a);
        }
    }
    for (j, r) in residual.iter().enumerate() {
        if *r != big(&d.bound_multipliers[j]) {
            return Err(format!("bound multiplier {j} is not the residual"));
        }
        if r.is_positive() {
            rhs += r * int(lp.upper[j].ok_or("residual needs an infinite bound")?);
        } else if r.is_negative() {
            rhs += r * int(lp.lower[j]);
        }
    }
    if rhs != big(&d.rhs) {
        return Err(format!("stated rhs {} differs from the aggregate {rhs}", d.rhs));
    }
    Ok(rhs)
}

fn point_feasible(lp: &SmallLp, x: &[BigRational]) -> bool {
    let dot = |a: &[i64]| a.iter().zip(x).map(|(&a, v)| int(a) * v).sum::<BigRational>();
    x.len() == lp.n
        && (0..lp.n).all(|j| x[j] >= int(lp.lower[j]) && lp.upper[j].is_none_or(|u| x[j] <= int(u)))
        && lp.rows.iter().all(|h| {
            let v = dot(&h.a);
            match h.dir {
                Dir::Le => v <= int(h.b),
                Dir::Ge => v >= int(h.b),
                Dir::Eq => v == int(h.b),
            }
        })
}

fn ray_improves(lp: &SmallLp, r: &[BigRational]) -> bool {
    let dot = |a: &[i64]| a.iter().zip(r).map(|(&a, v)| int(a) * v).sum::<BigRational>();
    r.len() == lp.n
        && (0..lp.n).all(|j| !r[j].is_negative() && (lp.upper[j].is_none() || r[j].is_zero()))
        && lp.rows.iter().all(|h| {
            let v = dot(&h.a);
            match h.dir {
                Dir::Le => !v.is_positive(),
                Dir::Ge => !v.is_negative(),
                Dir::Eq => v.is_zero(),
            }
        })
        && dot(&lp.c).is_positive()
}

/// Compares one LP against the oracle; `Ok(outcome index)` on agreement.
pub fn check_lp(lp: &SmallLp) -> Result<usize, String> {
    let outcome = solve_lp(&to_lp_problem(lp)).map_err(|e| format!("solver error: {e}"))?;
    let truth = vertex::truth(lp);
    match (outcome, truth) {
        (LpOutcome::Optimal(opt), Truth::Optimal(v)) => {
            let x: Vec<BigRational> = opt.primal.iter().map(big).collect();
            if !point_feasible(lp, &x) {
                return Err("optimal point is infeasible".into());
            }
            let primal: BigRational = lp.c.iter().zip(&x).map(|(&c, v)| int(c) * v).sum();
            let dual = dual_bound(lp, &lp.c, &opt.dual)?;
            if big(&opt.value) != v || primal != v || dual != v {
                return Err(format!("value {} primal {primal} dual {dual}, oracle {v}", opt.value));
            }
            Ok(0)
        }
        (LpOutcome::Infeasible(d), Truth::Infeasible) => {
            let rhs = dual_bound(lp, &vec![0; lp.n], &d)?;
            if !rhs.is_negative() {
                return Err(format!("Farkas aggregate 0 <= {rhs} is not a contradiction"));
            }
            Ok(1)
        }
        (LpOutcome::Unbounded { point, ray }, Truth::Unbounded) => {
            let x: Vec<BigRational> = point.iter().map(big).collect();
            let r: Vec<BigRational> = ray.iter().map(big).collect();
            if !point_feasible(lp, &x) || !ray_improves(lp, &r) {
                return Err("unboundedness witness is invalid".into());
            }
            Ok(2)
        }
        (o, t) => Err(format!("solver {o:?}, oracle {t:?}")),
    }
}

pub fn lp_suite(cases: usize, seed: u64, max_work: u128) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::default();
    for case in 0..cases {
        let lp = random_lp(&mut rng, max_work);
        report.cases += 1;
        match check_lp(&lp) {
            Ok(k) => report.outcomes[k] += 1,
            Err(e) => report.failures.push(format!("case {case}: {e}\n{lp:?}")),
        }
    }
    report
}

fn small_fraction(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Rational {
    let q = [1, 1, 1, 2, 3][rng.gen_range(0..5)];
    Rational::new(rng.gen_range(lo..=hi), q)
}

/// A pure 0/1 program with up to 12 variables and 1..=8 rows.
pub fn random_ip(rng: &mut ChaCha8Rng) -> Problem {
    let n = rng.gen_range(1..=12);
    let m = rng.gen_range(1..=8);
    let variables = (0..n).map(|j| Variable::binary(format!("b{j}"))).collect();
    let constraints = (0..m)
        .map(|i| {
            let terms = (0..n)
                .filter_map(|j| {
                    let c = if rng.gen_bool(0.5) { small_fraction(rng, -4, 4) } else { Rational::zero() };
                    (!c.is_zero()).then_some((j, c))
                })
                .collect();
            let sense = to_sense(pick_dir(rng, 1));
            let rhs = if sense == Sense::Ge { small_fraction(rng, -8, 1) } else { small_fraction(rng, -1, 8) };
            LinearConstraint::new(format!("r{i}"), sense, rhs, terms)
        })
        .collect();
    let half_steps = rng.gen_bool(0.3);
    let objective = (0..n)
        .filter_map(|j| {
            let c = if half_steps { Rational::new(rng.gen_range(-9..=9), 2) } else { Rational::from_int(rng.gen_range(-5..=5)) };
            (!c.is_zero()).then_some((j, c))
        })
        .collect();
    Problem { variables, objective, constraints }
}

/// Best objective over all 0/1 points, in independent arithmetic.
pub fn brute_force(p: &Problem) -> Option<BigRational> {
    let n = p.variables.len();
    let rows: Vec<(Sense, BigRational, Vec<(usize, BigRational)>)> = p
        .constraints
        .iter()
        .map(|c| (c.sense, big(&c.rhs), c.terms.iter().map(|(j, a)| (*j, big(a))).collect()))
        .collect();
    let obj: Vec<(usize, BigRational)> = p.objective.iter().map(|(j, a)| (*j, big(a))).collect();
    let eval = |terms: &[(usize, BigRational)], mask: u32| -> BigRational {
        terms.iter().filter(|(j, _)| mask >> j & 1 == 1).map(|(_, a)| a.clone()).sum()
    };
    let mut best: Option<BigRational> = None;
    for mask in 0..1u32 << n {
        let ok = rows.iter().all(|(s, b, t)| {
            let v = eval(t, mask);
            match s {
                Sense::Le => v <= *b,
                Sense::Ge => v >= *b,
                Sense::Eq => v == *b,
            }
        });
        if ok {
            let v = eval(&obj, mask);
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
        }
    }
    best
}

pub fn check_ip(p: &Problem) -> Result<usize, String> {
    let r = solve_problem(p, &Limits::none()).map_err(|e| format!("solver error: {e}"))?;
    let cert = r.certificate.as_ref().ok_or("no certificate")?;
    if let chvatal::certcheck::Verdict::Refuted(why) = check_certificate(cert) {
        return Err(format!("certificate refuted: {why}"));
    }
    refcheck::check(&write_certificate(cert)).map_err(|e| format!("reference checker: {e}"))?;
    match (r.status, brute_force(p)) {
        (SolveStatus::Infeasible, None) => Ok(1),
        (SolveStatus::Optimal, Some(v)) => {
            let x = r.best_solution.as_ref().ok_or("no solution")?;
            let got = r.best_objective.as_ref().map(big);
            if !p.is_feasible(x) || got.as_ref() != Some(&v) || big(&p.objective_value(x)) != v {
                return Err(format!("objective {got:?}, enumeration {v}"));
            }
            Ok(0)
        }
        (s, v) => Err(format!("status {s:?}, enumeration {v:?}")),
    }
}

pub fn ip_suite(cases: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SuiteReport::default();
    for case in 0..cases {
        let p = random_ip(&mut rng);
        report.cases += 1;
        match check_ip(&p) {
            Ok(k) => report.outcomes[k] += 1,
            Err(e) => report.failures.push(format!("case {case}: {e}")),
        }
    }
    report
}

