//! Check a certificate file, or a small built-in proof when no path is given.
//!
//! ```text
//! cargo run --example check_certificate -- red5.cert
//! ```

use chvatal::certcheck::{check_certificate, parse_certificate_with_lines, Verdict};

/// `x + y <= 3/2` over binaries proves `x + y <= 1` by rounding; the
/// solution `x = 1` attains it.
const HALF: &str = "\
CERT 1
VARS 2
x bin 0 1
y bin 0 1
OBJ max 2 0 1 1 1
CONS 1
half L 3/2 2 0 1 1 1
RTP range 1 1
SOLS 1
1 0 1
DERS 1
bound L 1 2 0 1 1 1 rnd 1 C0 1
";

fn main() -> anyhow::Result<()> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => HALF.to_string(),
    };
    let (cert, lines) = parse_certificate_with_lines(&text)?;
    println!(
        "{} variables, {} constraints, {} solutions, {} derivations",
        cert.problem.variables.len(),
        cert.problem.constraints.len(),
        cert.solutions.len(),
        cert.derivations.len()
    );
    match check_certificate(&cert) {
        Verdict::Verified => println!("verified"),
        Verdict::Refuted(r) => println!("refuted at line {}: {r}", r.line(Some(&lines), &cert)),
    }

    // The same proof without rounding claims too much.
    let broken = HALF.replace("rnd 1 C0 1", "lin 1 C0 1");
    let (cert, lines) = parse_certificate_with_lines(&broken)?;
    if let Verdict::Refuted(r) = check_certificate(&cert) {
        println!("without rounding: refuted at line {}: {r}", r.line(Some(&lines), &cert));
    }
    Ok(())
}
