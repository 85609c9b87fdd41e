//! Brute-force check of the star property on every downset of a small ground set.
//!
//! ```text
//! cargo run --release --example downset_oracle -- 5
//! ```

use chvatal::oracle::{enumerate_downsets, max_intersecting_subfamily, verify_conjecture};
use chvatal::setcore::max_star;

fn main() -> anyhow::Result<()> {
    let n: usize = std::env::args().nth(1).map_or(Ok(4), |a| a.parse())?;
    let report = verify_conjecture(n, false, 4, &|done| eprintln!("{done} downsets"))?;
    print!("{}", report.text());

    // the downset with the largest intersecting subfamily
    let best = enumerate_downsets(n, false)?
        .into_iter()
        .max_by_key(|d| max_intersecting_subfamily(d).0)
        .expect("at least one downset");
    let (size, witness) = max_intersecting_subfamily(&best);
    let (center, star) = max_star(&best);
    println!("largest: {} sets, intersecting subfamily of {size}: {witness}", best.len());
    println!("star at {center} has {star} sets");
    Ok(())
}
