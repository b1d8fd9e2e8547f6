use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use super::{Constant, Formula, Literal};

/// A conjunction of literals, sorted and duplicate-free.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cube {
    lits: Vec<Literal>,
}

impl Cube {
    pub fn new(lits: impl IntoIterator<Item = Literal>) -> Self {
        let mut lits: Vec<Literal> = lits.into_iter().collect();
        lits.sort();
        lits.dedup();
        Cube { lits }
    }

    pub fn empty() -> Self {
        Cube::default()
    }

    /// Reads a conjunction of literals. Returns `None` for anything else,
    /// including `false`.
    pub fn from_formula(f: &Formula) -> Option<Cube> {
        let mut lits = Vec::new();
        fn walk(f: &Formula, out: &mut Vec<Literal>) -> bool {
            match f {
                Formula::True => true,
                Formula::Lit(l) => {
                    out.push(l.clone());
                    true
                }
                Formula::And(parts) => parts.iter().all(|p| walk(p, out)),
                _ => false,
            }
        }
        walk(f, &mut lits).then(|| Cube::new(lits))
    }

    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Literal> {
        self.lits.iter()
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, l: &Literal) -> bool {
        self.lits.binary_search(l).is_ok()
    }

    /// Every literal of `self` also occurs in `other`.
    pub fn is_subset_of(&self, other: &Cube) -> bool {
        self.lits.iter().all(|l| other.contains(l))
    }

    pub fn has_div(&self) -> bool {
        self.lits.iter().any(Literal::is_div)
    }

    pub fn constants(&self) -> BTreeSet<Constant> {
        self.lits.iter().flat_map(|l| l.constants().cloned()).collect()
    }

    pub fn to_formula(&self) -> Formula {
        Formula::and(self.lits.iter().cloned().map(Formula::Lit))
    }

    /// `¬cube` as a disjunction.
    pub fn negate(&self) -> Formula {
        Formula::or(self.lits.iter().map(Literal::negate))
    }

    pub fn without(&self, index: usize) -> Cube {
        let mut lits = self.lits.clone();
        lits.remove(index);
        Cube { lits }
    }

    /// Renames constants. `None` when a literal collapses to `false`.
    pub fn map_constants(&self, f: &impl Fn(&Constant) -> Constant) -> Option<Cube> {
        Cube::from_formula(&Formula::and(self.lits.iter().map(|l| l.map_constants(f))))
    }

    pub fn primed(&self) -> Cube {
        self.map_constants(&Constant::primed).unwrap_or_default()
    }

    pub fn unprimed(&self) -> Cube {
        self.map_constants(&Constant::unprimed).unwrap_or_default()
    }
}

impl FromIterator<Literal> for Cube {
    fn from_iter<T: IntoIterator<Item = Literal>>(iter: T) -> Self {
        Cube::new(iter)
    }
}

impl<'a> IntoIterator for &'a Cube {
    type Item = &'a Literal;
    type IntoIter = core::slice::Iter<'a, Literal>;
    fn into_iter(self) -> Self::IntoIter {
        self.lits.iter()
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lits.is_empty() {
            return f.write_str("true");
        }
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// A disjunction, stored as the cube it negates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause(Cube);

impl Clause {
    pub fn negating(cube: Cube) -> Self {
        Clause(cube)
    }

    /// Builds `l₁ ∨ … ∨ lₙ` from integer inequalities. `None` when some
    /// disjunct has no literal negation.
    pub fn from_disjuncts(lits: impl IntoIterator<Item = Literal>) -> Option<Self> {
        let mut negated = Vec::new();
        for l in lits {
            match l.negate() {
                Formula::Lit(n) => negated.push(n),
                _ => return None,
            }
        }
        Some(Clause(Cube::new(negated)))
    }

    pub fn negated(&self) -> &Cube {
        &self.0
    }

    pub fn into_negated(self) -> Cube {
        self.0
    }

    pub fn to_formula(&self) -> Formula {
        self.0.negate()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

/// The cubes negated by a set of clauses.
pub fn dualize(clauses: &[Clause]) -> Vec<Cube> {
    clauses.iter().map(|c| c.negated().clone()).collect()
}

/// The clauses negating a set of cubes.
pub fn dualize_cubes(cubes: &[Cube]) -> Vec<Clause> {
    cubes.iter().cloned().map(Clause::negating).collect()
}
