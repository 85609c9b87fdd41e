//! Shared test oracles. Each integration test target compiles this module on
//! its own and uses a different subset of it.
#![allow(dead_code)]

pub mod mutate;
pub mod refcheck;
pub mod suites;
pub mod vertex;

use chvatal::Rational;
use num_rational::BigRational;

pub fn big(r: &Rational) -> BigRational {
    BigRational::new(r.numer(), r.denom())
}
