//! Over-approximating a union of polytopes that share a coefficient matrix.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;

use super::RuleError;
use crate::formula::{to_matrix, Cmp, Constant, Cube, Formula, LinearTerm, Literal, normalize_literal};
use crate::linalg::{affine_dependencies, divisibility_of_column, kernel_basis, to_integer_vector, RationalMatrix};
use crate::mbp;
use crate::oracle::SmtOracle;

/// Cubes `A·x ≤ nᵢ` for `i = 1..q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsumeInput {
    pub a: Vec<Vec<BigInt>>,
    pub vars: Vec<Constant>,
    pub bounds: Vec<Vec<BigInt>>,
}

impl SubsumeInput {
    /// Reads cubes that share their coefficient rows, literal by literal.
    pub fn from_cubes(cubes: &[Cube]) -> Result<Self, RuleError> {
        if cubes.len() < 2 {
            return Err(RuleError::Rejected("subsume needs at least two cubes"));
        }
        let mut a = None;
        let mut vars = None;
        let mut bounds = Vec::with_capacity(cubes.len());
        for c in cubes {
            let m = to_matrix(c).map_err(|_| RuleError::Rejected("divisibility literal in subsume input"))?;
            match (&a, &vars) {
                (None, _) => {
                    a = Some(m.a.clone());
                    vars = Some(m.vars.clone());
                }
                (Some(a0), Some(v0)) if *a0 == m.a && *v0 == m.vars => {}
                _ => return Err(RuleError::Rejected("cubes do not share a coefficient matrix")),
            }
            bounds.push(m.bounds);
        }
        Ok(SubsumeInput { a: a.unwrap_or_default(), vars: vars.unwrap_or_default(), bounds })
    }

    pub fn rows(&self) -> usize {
        self.a.len()
    }

    pub fn cube(&self, i: usize) -> Option<Cube> {
        let rows = self.a.iter().zip(&self.bounds[i]).map(|(row, b)| Literal::le(self.row_term(row) - LinearTerm::constant(b.clone())));
        Cube::from_formula(&Formula::and(rows))
    }

    fn row_term(&self, row: &[BigInt]) -> LinearTerm {
        LinearTerm::from_parts(self.vars.iter().cloned().zip(row.iter().cloned()), BigInt::default())
    }
}

/// The constraints on the bound vector `v` built from the numeral matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Closure {
    /// `v!j`, one per row of `A`.
    pub v: Vec<Constant>,
    /// `alpha!i`, one per input cube when the hull needs multipliers.
    pub alphas: Vec<Constant>,
    /// Columns of the numeral matrix kept free.
    pub independent: Vec<usize>,
    /// Affine equalities satisfied by every bound vector.
    pub equalities: Formula,
    /// Convex closure over the independent columns.
    pub hull: Formula,
    pub divisibility: Formula,
}

impl Closure {
    /// `A·x ≤ v ∧ L ∧ C ∧ D`.
    pub fn psi(&self, input: &SubsumeInput) -> Formula {
        let ax = input.a.iter().zip(&self.v).map(|(row, v)| Literal::le(input.row_term(row) - LinearTerm::var(v.clone())));
        Formula::and(ax.chain([self.equalities.clone(), self.hull.clone(), self.divisibility.clone()]))
    }

    pub fn eliminated(&self) -> BTreeSet<Constant> {
        self.v.iter().chain(&self.alphas).cloned().collect()
    }
}

fn eq(a: LinearTerm, b: LinearTerm) -> Formula {
    normalize_literal(&a, Cmp::Eq, &b).unwrap_or(Formula::False)
}

/// Linear dependencies, convex closure and divisibility constraints for the
/// rows of the numeral matrix.
pub fn closure(input: &SubsumeInput) -> Closure {
    let p = input.rows();
    let q = input.bounds.len();
    let v: Vec<Constant> = (0..p).map(|j| Constant::int(&format!("v!{j}"))).collect();
    let n = RationalMatrix::from_integers(p, &input.bounds);
    let basis = kernel_basis(&n.with_ones_column());

    let equalities = Formula::and(basis.iter().map(|w| {
        let w = to_integer_vector(w);
        let t = LinearTerm::from_parts(v.iter().cloned().zip(w[..p].iter().cloned()), w[p].clone());
        eq(t, LinearTerm::zero())
    }));

    let independent = affine_dependencies(p, &basis).independent;
    let column = |j: usize| -> Vec<BigInt> { input.bounds.iter().map(|b| b[j].clone()).collect() };
    let mut alphas = Vec::new();
    let hull = match independent.as_slice() {
        [] => Formula::True,
        [j] => {
            let col = column(*j);
            let lo = col.iter().min().cloned().unwrap_or_default();
            let hi = col.iter().max().cloned().unwrap_or_default();
            let vj = LinearTerm::var(v[*j].clone());
            Formula::and([Literal::le(LinearTerm::constant(lo) - vj.clone()), Literal::le(vj - LinearTerm::constant(hi))])
        }
        cols => {
            alphas = (0..q).map(|i| Constant::real(&format!("alpha!{i}"))).collect();
            let nonneg = alphas.iter().map(|a| Literal::le(-LinearTerm::var(a.clone())));
            let sum = alphas.iter().fold(LinearTerm::zero(), |t, a| t + LinearTerm::var(a.clone()));
            let combos = cols.iter().map(|&j| {
                let t = LinearTerm::from_parts(alphas.iter().cloned().zip(column(j)), BigInt::default());
                eq(t, LinearTerm::var(v[j].clone()))
            });
            Formula::and(nonneg.chain([eq(sum, LinearTerm::constant(1))]).chain(combos))
        }
    };

    let divisibility = Formula::and(independent.iter().filter_map(|&j| {
        let (d, r) = divisibility_of_column(&column(j))?;
        Some(Literal::div(&d, LinearTerm::var(v[j].clone()) - LinearTerm::constant(r)))
    }));

    Closure { v, alphas, independent, equalities, hull, divisibility }
}

/// A cube implied by every input cube, or `None` when the literal-dropping
/// loop runs out of literals.
pub fn subsume_cube(input: &SubsumeInput, oracle: &mut impl SmtOracle) -> Result<Option<Cube>, RuleError> {
    if input.bounds.len() < 2 {
        return Err(RuleError::Rejected("subsume needs at least two cubes"));
    }
    let cl = closure(input);
    let psi = cl.psi(input);
    let outside = (0..input.bounds.len()).filter_map(|i| input.cube(i)).map(|c| c.negate());
    let outside = Formula::and(outside);
    let m0 = match oracle.is_sat(&[psi.clone(), outside])? {
        Some(m) => m,
        None => oracle.is_sat(core::slice::from_ref(&psi))?.ok_or(RuleError::Rejected("closure is unsatisfiable"))?,
    };
    let mut phi = mbp::project_formula(&cl.eliminated(), &psi, &m0)?;
    loop {
        if phi.is_empty() {
            return Ok(None);
        }
        let Some(m1) = oracle.is_sat(&[phi.negate(), psi.clone()])? else {
            return Ok(Some(phi));
        };
        let before = phi.len();
        phi = phi.iter().filter(|l| m1.eval_literal(l)).cloned().collect();
        if phi.len() == before {
            return Err(RuleError::Unknown(format!("counter-model {m1} does not falsify {phi}")));
        }
    }
}
