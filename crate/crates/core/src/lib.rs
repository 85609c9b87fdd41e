//! Exact rational integer programming for Chvátal's conjecture on small
//! ground sets: model generation, an exact branch-and-bound solver that emits
//! proof certificates, an independent certificate checker and input verifier,
//! and a brute-force combinatorial oracle.

pub mod rational;
pub mod bbsolver;
pub mod certcheck;
pub mod cli;
pub mod exactlp;
pub mod modelgen;
pub mod oracle;
pub mod setcore;

pub use rational::Rational;
pub use setcore::{Family, SubsetCode};
