//! Compare a solved model's problem section with independently rebuilt ones.

use chvatal::bbsolver::{solve_ip, Limits};
use chvatal::certcheck::{verify_input, InputVerdict};
use chvatal::modelgen::{Form, ModelSpec};
use chvatal::Rational;

fn main() -> anyhow::Result<()> {
    let spec = ModelSpec::new(Form::Red, 5);
    let r = solve_ip(&spec.build()?, &Limits::none())?;
    let cert = r.certificate.expect("RED(5) solves completely");
    let report = |what: &str, v: InputVerdict| match v {
        InputVerdict::Match => println!("{what}: match"),
        InputVerdict::Mismatch(d) => println!("{what}: mismatch: {d}"),
    };
    report("RED(5)", verify_input(&cert, &spec).map_err(anyhow::Error::msg)?);
    report("against OPT(5)", verify_input(&cert, &ModelSpec::new(Form::Opt, 5)).map_err(anyhow::Error::msg)?);
    let mut tampered = cert.clone();
    tampered.problem.constraints[12].rhs = Rational::from_int(2);
    report("tampered rhs", verify_input(&tampered, &spec).map_err(anyhow::Error::msg)?);
    Ok(())
}
