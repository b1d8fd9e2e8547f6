//! Normalized linear integer arithmetic: terms, literals, cubes, clauses and
//! the matrix view of a cube.

mod constant;
mod cube;
mod expr;
mod literal;
mod matrix;
mod term;

pub use constant::{Constant, Sort};
pub use cube::{dualize, dualize_cubes, Clause, Cube};
pub use expr::Formula;
pub use literal::{normalize_literal, Cmp, Literal};
pub use matrix::{to_matrix, MatrixCube};
pub use term::LinearTerm;

use core::fmt;

/// Errors raised while building formulas.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormulaError {
    /// Strict comparisons are only defined over integer terms.
    StrictOverReals,
    /// The matrix view only covers inequality literals.
    DivisibilityInMatrix,
}

impl fmt::Display for FormulaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormulaError::StrictOverReals => f.write_str("strict comparison over a real-sorted term"),
            FormulaError::DivisibilityInMatrix => {
                f.write_str("divisibility literal has no matrix representation")
            }
        }
    }
}

impl core::error::Error for FormulaError {}
