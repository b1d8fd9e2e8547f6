//! Safety problems `⟨Init, Tr, Bad⟩` and inductive-invariant checking.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::formula::{Constant, Cube, Formula};
use crate::oracle::{SmtOracle, Unknown};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SystemError {
    /// A formula mentions a constant that is not declared (or a primed one
    /// outside the transition relation).
    UnknownConstant { formula: &'static str, name: String },
    /// Declared constants must be integers and unprimed.
    BadDeclaration(String),
}

impl fmt::Display for SystemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemError::UnknownConstant { formula, name } => write!(f, "{formula} mentions undeclared constant {name}"),
            SystemError::BadDeclaration(n) => write!(f, "invalid declaration of {n}"),
        }
    }
}

impl core::error::Error for SystemError {}

/// A transition system over integer constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionSystem {
    vars: Vec<Constant>,
    init: Formula,
    trans: Formula,
    bad: Cube,
}

impl TransitionSystem {
    pub fn new(vars: Vec<Constant>, init: Formula, trans: Formula, bad: Cube) -> Result<Self, SystemError> {
        let declared: BTreeSet<Constant> = vars.iter().cloned().collect();
        if let Some(v) = vars.iter().find(|v| !v.is_int() || v.is_primed()) {
            return Err(SystemError::BadDeclaration(String::from(v.name())));
        }
        let check = |what: &'static str, cs: BTreeSet<Constant>, primes: bool| -> Result<(), SystemError> {
            for c in cs {
                let base = if primes && c.is_primed() { c.unprimed() } else { c.clone() };
                if !declared.contains(&base) {
                    return Err(SystemError::UnknownConstant { formula: what, name: String::from(c.name()) });
                }
            }
            Ok(())
        };
        check("init", init.constants(), false)?;
        check("trans", trans.constants(), true)?;
        check("bad", bad.constants(), false)?;
        Ok(TransitionSystem { vars, init, trans, bad })
    }

    pub fn vars(&self) -> &[Constant] {
        &self.vars
    }

    pub fn primed_vars(&self) -> BTreeSet<Constant> {
        self.vars.iter().map(Constant::primed).collect()
    }

    pub fn init(&self) -> &Formula {
        &self.init
    }

    pub fn trans(&self) -> &Formula {
        &self.trans
    }

    pub fn bad(&self) -> &Cube {
        &self.bad
    }
}

/// Which of the three inductive-invariant conditions fails.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvariantFailure {
    /// `Init ⇒ Inv` fails.
    Initiation,
    /// `Inv ∧ Tr ⇒ Inv′` fails.
    Consecution,
    /// `Inv ⇒ ¬Bad` fails.
    Safety,
}

impl fmt::Display for InvariantFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InvariantFailure::Initiation => "not implied by init",
            InvariantFailure::Consecution => "not inductive",
            InvariantFailure::Safety => "does not exclude bad states",
        })
    }
}

/// The first failing condition, if any.
pub fn invariant_failure(inv: &Formula, ts: &TransitionSystem, oracle: &mut impl SmtOracle) -> Result<Option<InvariantFailure>, Unknown> {
    if !oracle.entails(ts.init(), inv)? {
        return Ok(Some(InvariantFailure::Initiation));
    }
    if oracle.is_sat(&[inv.clone(), ts.trans().clone(), inv.primed().not()])?.is_some() {
        return Ok(Some(InvariantFailure::Consecution));
    }
    if oracle.is_sat(&[inv.clone(), ts.bad().to_formula()])?.is_some() {
        return Ok(Some(InvariantFailure::Safety));
    }
    Ok(None)
}

/// `Init ⇒ Inv`, `Inv ∧ Tr ⇒ Inv′` and `Inv ⇒ ¬Bad`.
pub fn check_invariant(inv: &Formula, ts: &TransitionSystem, oracle: &mut impl SmtOracle) -> Result<bool, Unknown> {
    Ok(invariant_failure(inv, ts, oracle)?.is_none())
}
