//! Standard-library side of the checker: the SMT-LIB2 process client, the
//! problem format, and the pieces shared by the `gspacer` and
//! `gspacer-bench` binaries.

pub mod bench;
pub mod problem;
pub mod sexp;
pub mod smt;
pub mod smtlib;

use std::time::{Duration, Instant};

use gspacer_core::oracle::Budget;

/// Wall-clock budget for a solve.
#[derive(Clone, Copy, Debug)]
pub struct Deadline(pub Option<Instant>);

impl Deadline {
    pub fn after(limit: Option<Duration>) -> Self {
        Deadline(limit.map(|d| Instant::now() + d))
    }
}

impl Budget for Deadline {
    fn exhausted(&self) -> bool {
        self.0.is_some_and(|d| Instant::now() >= d)
    }
}
