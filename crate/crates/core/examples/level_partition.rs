//! Split RED(n) by how many `m`-sets the downset contains, one model per
//! isomorphism class of fixed families, and solve every piece.
//!
//! ```text
//! cargo run --release --example level_partition -- 5 4
//! ```

use chvatal::bbsolver::{solve_ip, Limits};
use chvatal::modelgen::{build_red, ModelSpec, Form};
use chvatal::setcore::{binomial, enumerate_iso_classes};

fn main() -> anyhow::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let n = args.first().copied().unwrap_or(5);
    let m = args.get(1).copied().unwrap_or(n - 1);
    build_red(n)?;
    for k in 0..=binomial(n, m) {
        let classes = enumerate_iso_classes(n, m, k)?;
        for family in &classes.representatives {
            let spec = ModelSpec::new(Form::Red, n).with_level(m, family.clone());
            match spec.build() {
                Err(e) => println!("k={k} [{family}]: not generated: {e}"),
                Ok(model) => {
                    let r = solve_ip(&model, &Limits::none())?;
                    let value = r.best_objective.as_ref().map_or("-".to_string(), |v| v.to_string());
                    println!("k={k} {}: status={:?} objective={value} nodes={}", model.name, r.status, r.node_count);
                }
            }
        }
    }
    Ok(())
}
