//! The interface to satisfiability checking and wall-clock budgets.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::formula::Formula;
use crate::model::Model;

/// Outcome of a satisfiability query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat(Model),
    /// Indices into the labeled assertions forming an unsatisfiable core.
    Unsat(Vec<usize>),
    Unknown(String),
}

/// The solver gave up, died or could not be parsed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unknown(pub String);

impl fmt::Display for Unknown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "solver returned unknown: {}", self.0)
    }
}

impl core::error::Error for Unknown {}

/// A satisfiability oracle for quantifier-free mixed integer/real linear
/// arithmetic with divisibility.
///
/// `check` decides `⋀background ∧ ⋀labeled`. On `Unsat`, the core refers to
/// positions in `labeled`; implementations may return all of them. On `Sat`,
/// the model must assign every constant occurring in the query.
pub trait SmtOracle {
    fn check(&mut self, background: &[Formula], labeled: &[Formula]) -> SatResult;

    fn is_sat(&mut self, assertions: &[Formula]) -> Result<Option<Model>, Unknown> {
        match self.check(assertions, &[]) {
            SatResult::Sat(m) => Ok(Some(m)),
            SatResult::Unsat(_) => Ok(None),
            SatResult::Unknown(why) => Err(Unknown(why)),
        }
    }

    /// `φ ⇒ ψ`, decided as unsatisfiability of `φ ∧ ¬ψ`.
    fn entails(&mut self, phi: &Formula, psi: &Formula) -> Result<bool, Unknown> {
        Ok(self.is_sat(&[phi.clone(), psi.not()])?.is_none())
    }
}

impl<T: SmtOracle + ?Sized> SmtOracle for &mut T {
    fn check(&mut self, background: &[Formula], labeled: &[Formula]) -> SatResult {
        (**self).check(background, labeled)
    }
}

/// Wall-clock limit polled by the engine between queries.
pub trait Budget {
    fn exhausted(&self) -> bool;
}

/// A budget that never runs out.
#[derive(Clone, Copy, Debug, Default)]
pub struct Unlimited;

impl Budget for Unlimited {
    fn exhausted(&self) -> bool {
        false
    }
}
