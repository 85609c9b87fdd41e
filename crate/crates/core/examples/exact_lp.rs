//! Solve small LPs in exact arithmetic and print their dual certificates.

use chvatal::exactlp::{solve_lp, LpOutcome, LpProblem, LpRow};
use chvatal::modelgen::{build_opt, Sense};
use chvatal::Rational;

fn show(name: &str, p: &LpProblem) -> anyhow::Result<()> {
    match solve_lp(p)? {
        LpOutcome::Optimal(o) => {
            let x: Vec<String> = o.primal.iter().map(ToString::to_string).collect();
            println!("{name}: optimal {} at ({})", o.value, x.join(", "));
            println!("  row multipliers {:?}", o.dual.row_multipliers.iter().map(ToString::to_string).collect::<Vec<_>>());
            println!("  dual bound {} (zero gap: {})", o.dual.rhs, o.dual.rhs == o.value);
        }
        LpOutcome::Infeasible(d) => {
            let y: Vec<String> = d.row_multipliers.iter().map(ToString::to_string).collect();
            println!("{name}: infeasible, multipliers ({}) give 0 <= {}", y.join(", "), d.rhs);
        }
        LpOutcome::Unbounded { ray, .. } => {
            println!("{name}: unbounded along {:?}", ray.iter().map(ToString::to_string).collect::<Vec<_>>());
        }
    }
    Ok(())
}

fn main() -> anyhow::Result<()> {
    let q = Rational::new;
    // max x + y  s.t.  3x + y <= 2,  x + 3y <= 2
    let two_rows = LpProblem {
        num_vars: 2,
        rows: vec![
            LpRow { terms: vec![(0, q(3, 1)), (1, q(1, 1))], sense: Sense::Le, rhs: q(2, 1) },
            LpRow { terms: vec![(0, q(1, 1)), (1, q(3, 1))], sense: Sense::Le, rhs: q(2, 1) },
        ],
        lower: vec![Rational::zero(); 2],
        upper: vec![None; 2],
        objective: vec![(0, q(1, 1)), (1, q(1, 1))],
    };
    show("two rows", &two_rows)?;

    let clash = LpProblem {
        num_vars: 1,
        rows: vec![
            LpRow { terms: vec![(0, q(1, 1))], sense: Sense::Le, rhs: q(0, 1) },
            LpRow { terms: vec![(0, q(1, 1))], sense: Sense::Ge, rhs: q(1, 1) },
        ],
        lower: vec![Rational::zero()],
        upper: vec![None],
        objective: vec![],
    };
    show("x <= 0, x >= 1", &clash)?;

    show("OPT(3) relaxation", &LpProblem::relaxation(&build_opt(3)?.problem))
}
