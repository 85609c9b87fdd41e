//! Count isomorphism classes of k-families of m-subsets of [n].
//!
//! ```text
//! cargo run --example iso_classes -- 6 3
//! ```

use chvatal::setcore::{binomial, enumerate_iso_classes};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(Ok(5), |a| a.parse())?;
    let m: usize = args.next().map_or(Ok(n.saturating_sub(1)), |a| a.parse())?;
    let top = binomial(n, m).min(6);
    for k in 0..=top {
        let classes = enumerate_iso_classes(n, m, k)?;
        println!("k={k}: {} classes", classes.representatives.len());
        for rep in classes.representatives.iter().take(4) {
            println!("  {rep}");
        }
    }
    Ok(())
}
