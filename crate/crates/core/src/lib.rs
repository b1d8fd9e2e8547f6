//! Core of a safety checker for transition systems over linear integer
//! arithmetic.
//!
//! The crate is `no_std` (with `alloc`). Everything that needs an SMT solver
//! goes through [`oracle::SmtOracle`], so the engine can be driven by any
//! backend, in-process or not.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod cluster;
pub mod engine;
pub mod formula;
pub mod linalg;
pub mod mbp;
pub mod model;
pub mod oracle;
pub mod rules;
pub mod system;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
