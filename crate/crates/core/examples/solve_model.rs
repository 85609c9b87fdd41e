//! Solve one Chvátal model exactly and check the resulting certificate.
//!
//! ```text
//! cargo run --release --example solve_model -- red 5
//! ```

use chvatal::bbsolver::{solve_ip, z_is_tight, Limits};
use chvatal::certcheck::{check_certificate, write_certificate};
use chvatal::modelgen::{Form, ModelSpec};

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let form: Form = args.first().map_or("opt", String::as_str).parse().map_err(anyhow::Error::msg)?;
    let n: usize = args.get(1).map_or("4", String::as_str).parse()?;
    let model = ModelSpec::new(form, n).build()?;
    let result = solve_ip(&model, &Limits { progress: true, ..Limits::none() })?;
    println!(
        "{}: status={:?} objective={} nodes={} pivots={} time={:.2?}",
        model.name,
        result.status,
        result.best_objective.as_ref().map_or("-".into(), |v| v.to_string()),
        result.node_count,
        result.pivots,
        result.elapsed
    );
    if let Some(x) = &result.best_solution {
        let (downset, family) = model.decode(x);
        println!("downset x: {downset}");
        println!("intersecting y: {family}");
        println!("z tight: {}", z_is_tight(&model, x));
    }
    if let Some(cert) = &result.certificate {
        let text = write_certificate(cert);
        println!("certificate: {} derivations, {} bytes", cert.derivations.len(), text.len());
        println!("check: {:?}", check_certificate(cert));
    }
    Ok(())
}
