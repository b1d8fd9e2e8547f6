//! The three global rules for linear integer arithmetic.

mod concretize;
mod conjecture;
mod subsume;

pub use concretize::concretize;
pub use conjecture::{conjecture, find_shape, ConjectureShape};
pub use subsume::{closure, subsume_cube, Closure, SubsumeInput};

use alloc::string::String;
use core::fmt;

use crate::mbp::MbpError;
use crate::oracle::Unknown;

/// Failure of a rule application. None of these are fatal to a solve; the
/// engine just skips the rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleError {
    Unknown(String),
    Mbp(MbpError),
    /// The input violates the rule's precondition.
    Rejected(&'static str),
}

impl fmt::Display for RuleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleError::Unknown(s) => write!(f, "solver returned unknown: {s}"),
            RuleError::Mbp(e) => write!(f, "projection failed: {e}"),
            RuleError::Rejected(s) => write!(f, "rejected: {s}"),
        }
    }
}

impl core::error::Error for RuleError {}

impl From<Unknown> for RuleError {
    fn from(u: Unknown) -> Self {
        RuleError::Unknown(u.0)
    }
}

impl From<MbpError> for RuleError {
    fn from(e: MbpError) -> Self {
        RuleError::Mbp(e)
    }
}
