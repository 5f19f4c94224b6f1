//! Exact Egyptian-fraction decompositions of k/n: arithmetic substrate,
//! brute-force oracles, a data-driven catalog of parametric identities,
//! residue-class coverage, witness tables and lcm-counting functions.

pub mod arith;
pub mod cascade;
pub mod coverage;
pub mod egyptian;
pub mod error;
pub mod expr;
pub mod families;
pub mod lcmfn;
pub mod par;
pub mod tables;

pub use error::{Error, Result};
