use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use num_bigint::BigInt;

use super::{Constant, Cube, Formula, FormulaError, LinearTerm, Literal};

/// `A·x ≤ bounds`, one row per literal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixCube {
    pub a: Vec<Vec<BigInt>>,
    pub vars: Vec<Constant>,
    pub bounds: Vec<BigInt>,
}

/// Matrix view of an inequality cube. Columns follow the constant order.
pub fn to_matrix(c: &Cube) -> Result<MatrixCube, FormulaError> {
    let vars: Vec<Constant> = c.constants().into_iter().collect();
    let mut a = Vec::with_capacity(c.len());
    let mut bounds = Vec::with_capacity(c.len());
    for l in c {
        let Literal::Le { term, bound } = l else {
            return Err(FormulaError::DivisibilityInMatrix);
        };
        a.push(vars.iter().map(|x| term.coeff(x)).collect());
        bounds.push(bound.clone());
    }
    Ok(MatrixCube { a, vars, bounds })
}

impl MatrixCube {
    pub fn rows(&self) -> usize {
        self.a.len()
    }

    pub fn row_term(&self, i: usize) -> LinearTerm {
        LinearTerm::from_parts(self.vars.iter().cloned().zip(self.a[i].iter().cloned()), BigInt::default())
    }

    /// Back to a cube, normalizing each row. `None` when some row is
    /// unsatisfiable on its own.
    pub fn to_cube(&self) -> Option<Cube> {
        let rows = (0..self.rows()).map(|i| Literal::le(self.row_term(i) - LinearTerm::constant(self.bounds[i].clone())));
        Cube::from_formula(&Formula::and(rows))
    }

    pub fn var_set(&self) -> BTreeSet<Constant> {
        self.vars.iter().cloned().collect()
    }
}
