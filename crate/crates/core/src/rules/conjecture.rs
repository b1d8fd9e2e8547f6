//! Conjecture: drop the literal of a pob on which a cluster's lemmas only
//! differ by their bound.

use alloc::vec::Vec;

use super::RuleError;
use crate::formula::{Cube, Formula, Literal};
use crate::oracle::SmtOracle;

/// A pob split as `φ₁ ∧ φ₂ ∧ φ₃` against lemmas `bg ∨ (t ≥ bᵢ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjectureShape {
    pub phi1: Cube,
    pub phi2: Cube,
    pub phi3: Literal,
    pub bg: Formula,
    /// Indices of the lemmas of the form `bg ∨ (t ≥ bᵢ)` with `bᵢ > b`.
    pub members: Vec<usize>,
}

impl ConjectureShape {
    /// `φ₁ ∧ φ₂`.
    pub fn alpha(&self) -> Cube {
        Cube::new(self.phi1.iter().chain(self.phi2.iter()).cloned())
    }
}

/// Finds the decomposition of `phi` against the cubes negated by the
/// cluster's lemmas. Literals of `phi` are tried as `φ₃` in order; the
/// first one shared with at least two lemmas whose remaining literals
/// coincide wins, provided some other literal of `phi` contradicts `bg`.
pub fn find_shape(phi: &Cube, lemma_cubes: &[Cube], oracle: &mut impl SmtOracle) -> Result<Option<ConjectureShape>, RuleError> {
    for (idx, phi3) in phi.iter().enumerate() {
        let Literal::Le { term, bound } = phi3 else { continue };
        let mut members = Vec::new();
        let mut rest: Option<Cube> = None;
        let mut consistent = true;
        for (m, c) in lemma_cubes.iter().enumerate() {
            let hit = c.iter().position(|l| matches!(l, Literal::Le { term: t, bound: b } if t == term && b >= bound));
            let Some(pos) = hit else { continue };
            let r = c.without(pos);
            match &rest {
                None => rest = Some(r),
                Some(r0) if *r0 == r => {}
                Some(_) => {
                    consistent = false;
                    break;
                }
            }
            members.push(m);
        }
        if !consistent || members.len() < 2 {
            continue;
        }
        let bg = rest.map_or(Formula::False, |r| r.negate());
        let mut phi1 = Vec::new();
        let mut phi2 = Vec::new();
        for (j, l) in phi.iter().enumerate() {
            if j == idx {
                continue;
            }
            if oracle.is_sat(&[bg.clone(), Formula::Lit(l.clone())])?.is_none() {
                phi2.push(l.clone());
            } else {
                phi1.push(l.clone());
            }
        }
        if phi2.is_empty() {
            continue;
        }
        return Ok(Some(ConjectureShape { phi1: Cube::new(phi1), phi2: Cube::new(phi2), phi3: phi3.clone(), bg, members }));
    }
    Ok(None)
}

/// `φ₁ ∧ φ₂` when the shape exists, no lemma of the shape blocks it, and
/// `reach` does not intersect it.
pub fn conjecture(phi: &Cube, lemma_cubes: &[Cube], reach: &Formula, oracle: &mut impl SmtOracle) -> Result<Option<Cube>, RuleError> {
    let Some(shape) = find_shape(phi, lemma_cubes, oracle)? else { return Ok(None) };
    let alpha = shape.alpha();
    let af = alpha.to_formula();
    for &m in &shape.members {
        if oracle.is_sat(&[lemma_cubes[m].negate(), af.clone()])?.is_none() {
            return Ok(None);
        }
    }
    if oracle.is_sat(&[reach.clone(), af])?.is_some() {
        return Ok(None);
    }
    Ok(Some(alpha))
}
