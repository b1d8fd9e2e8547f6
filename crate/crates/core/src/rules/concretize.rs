//! Concretize: split the literals of a pob around the constants whose
//! coefficients vary across a cluster.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::RuleError;
use crate::formula::{Constant, Cube, Formula, LinearTerm, Literal};
use crate::model::Model;
use crate::oracle::SmtOracle;

fn value_bound(t: LinearTerm, model: &Model) -> Formula {
    // t ≤ M[t]; integral since every constant here is an integer.
    let v = model.eval_term(&t).to_integer();
    Literal::le(t - LinearTerm::constant(v))
}

/// Splits one literal `Σ nᵢxᵢ ≤ b` into `s ≤ M[s]` for the part `s` over
/// constants outside `u`, plus `nᵢxᵢ ≤ M[nᵢxᵢ]` for every `xᵢ ∈ u`.
fn concretize_literal(l: &Literal, u: &BTreeSet<Constant>, model: &Model, out: &mut Vec<Formula>) {
    if !l.constants().any(|c| u.contains(c)) {
        out.push(Formula::Lit(l.clone()));
        return;
    }
    let mut rest = LinearTerm::zero();
    for (c, k) in l.term().iter() {
        if u.contains(c) {
            out.push(value_bound(LinearTerm::monomial(k.clone(), c.clone()), model));
        } else {
            rest.add_monomial(c, k);
        }
    }
    if !rest.is_constant() {
        out.push(value_bound(rest, model));
    }
}

/// Constants of `l` outside `u`, pairwise.
fn couplings(l: &Literal, u: &BTreeSet<Constant>) -> Vec<(Constant, Constant)> {
    let cs: Vec<&Constant> = l.constants().filter(|c| !u.contains(*c)).collect();
    let mut out = Vec::new();
    for i in 0..cs.len() {
        for j in i + 1..cs.len() {
            out.push((cs[i].clone(), cs[j].clone()));
        }
    }
    out
}

/// Removes literals implied by the others, unless that loses a coupling
/// between constants outside `u`.
fn rm_subsume(gamma: Cube, u: &BTreeSet<Constant>, oracle: &mut impl SmtOracle) -> Result<Cube, RuleError> {
    let mut lits: Vec<Literal> = gamma.literals().to_vec();
    let mut i = 0;
    while i < lits.len() {
        let others: Vec<&Literal> = lits.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, l)| l).collect();
        let kept = couplings(&lits[i], u).iter().all(|(a, b)| others.iter().any(|o| o.mentions(a) && o.mentions(b)));
        if kept && !others.is_empty() {
            let rest = Formula::and(others.iter().map(|l| Formula::Lit((*l).clone())));
            if oracle.entails(&rest, &Formula::Lit(lits[i].clone()))? {
                lits.remove(i);
                continue;
            }
        }
        i += 1;
    }
    Ok(Cube::new(lits))
}

/// Concretization of the divisibility-free cube `phi` around `u`, under a
/// model of `phi`.
pub fn concretize(phi: &Cube, u: &BTreeSet<Constant>, model: &Model, oracle: &mut impl SmtOracle) -> Result<Cube, RuleError> {
    if phi.has_div() {
        return Err(RuleError::Rejected("concretize needs a divisibility-free cube"));
    }
    if !phi.iter().all(|l| model.eval_literal(l)) {
        return Err(RuleError::Rejected("model does not satisfy the pob"));
    }
    let mut parts = Vec::new();
    for l in phi {
        concretize_literal(l, u, model, &mut parts);
    }
    let gamma = Cube::from_formula(&Formula::and(parts)).ok_or(RuleError::Rejected("concretization collapsed"))?;
    rm_subsume(gamma, u, oracle)
}
