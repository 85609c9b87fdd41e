//! Print the sizes of every formulation and a readable listing of a small one.
//!
//! ```text
//! cargo run --example generate_model -- 3
//! ```

use chvatal::modelgen::{emit_readable, partition_cuts, stats, Form, ModelSpec};

fn main() -> anyhow::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(Ok(3), |a| a.parse())?;
    for form in [Form::Inf, Form::Opt, Form::Red] {
        match ModelSpec::new(form, n).build() {
            Ok(model) => println!("{}: {}", model.name, stats(&model)),
            Err(e) => println!("{form}({n}): {e}"),
        }
    }
    if n >= 2 {
        println!("partition cuts over [{n}]: {}", partition_cuts(n, n)?.len());
    }
    let model = ModelSpec::new(Form::Opt, n).build()?;
    print!("{}", emit_readable(&model));
    Ok(())
}
