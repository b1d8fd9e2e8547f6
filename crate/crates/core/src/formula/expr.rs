use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use super::{Constant, Literal};

/// Quantifier-free formula in negation normal form. `Not` only wraps
/// literals that have no literal negation (divisibility, real inequalities).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Lit(Literal),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    /// Flattening conjunction.
    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap_or(Formula::True),
            _ => Formula::And(out),
        }
    }

    /// Flattening disjunction.
    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap_or(Formula::False),
            _ => Formula::Or(out),
        }
    }

    pub fn lit(l: Literal) -> Formula {
        Formula::Lit(l)
    }

    /// Negation, pushed down to the literals.
    pub fn not(&self) -> Formula {
        match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Lit(l) => l.negate(),
            Formula::Not(inner) => (**inner).clone(),
            Formula::And(parts) => Formula::or(parts.iter().map(Formula::not)),
            Formula::Or(parts) => Formula::and(parts.iter().map(Formula::not)),
        }
    }

    pub fn implies(&self, other: &Formula) -> Formula {
        Formula::or([self.not(), other.clone()])
    }

    pub fn constants(&self) -> BTreeSet<Constant> {
        let mut out = BTreeSet::new();
        self.collect_constants(&mut out);
        out
    }

    pub fn collect_constants(&self, out: &mut BTreeSet<Constant>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Lit(l) => out.extend(l.constants().cloned()),
            Formula::Not(inner) => inner.collect_constants(out),
            Formula::And(parts) | Formula::Or(parts) => {
                for p in parts {
                    p.collect_constants(out);
                }
            }
        }
    }

    /// Calls `f` on every literal occurrence.
    pub fn for_each_literal(&self, f: &mut impl FnMut(&Literal)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Lit(l) => f(l),
            Formula::Not(inner) => inner.for_each_literal(f),
            Formula::And(parts) | Formula::Or(parts) => {
                for p in parts {
                    p.for_each_literal(f);
                }
            }
        }
    }

    pub fn map_constants(&self, f: &impl Fn(&Constant) -> Constant) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Lit(l) => l.map_constants(f),
            Formula::Not(inner) => match inner.map_constants(f) {
                lit @ Formula::Lit(_) => Formula::Not(Box::new(lit)),
                other => other.not(),
            },
            Formula::And(parts) => Formula::and(parts.iter().map(|p| p.map_constants(f))),
            Formula::Or(parts) => Formula::or(parts.iter().map(|p| p.map_constants(f))),
        }
    }

    pub fn primed(&self) -> Formula {
        self.map_constants(&Constant::primed)
    }

    pub fn unprimed(&self) -> Formula {
        self.map_constants(&Constant::unprimed)
    }
}

impl From<Literal> for Formula {
    fn from(l: Literal) -> Self {
        Formula::Lit(l)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(f: &mut fmt::Formatter<'_>, parts: &[Formula], sep: &str) -> fmt::Result {
            f.write_str("(")?;
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                write!(f, "{p}")?;
            }
            f.write_str(")")
        }
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Lit(l) => write!(f, "{l}"),
            Formula::Not(inner) => write!(f, "!({inner})"),
            Formula::And(parts) => join(f, parts, " & "),
            Formula::Or(parts) => join(f, parts, " | "),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{normalize_literal, Cmp, LinearTerm};

    fn le(x: &str, b: i64) -> Formula {
        normalize_literal(&LinearTerm::var(Constant::int(x)), Cmp::Le, &LinearTerm::constant(b)).unwrap()
    }

    #[test]
    fn constructors_flatten_and_fold() {
        let f = Formula::and([le("x", 1), Formula::and([le("y", 2), Formula::True])]);
        assert!(matches!(&f, Formula::And(p) if p.len() == 2));
        assert_eq!(Formula::and([le("x", 1), Formula::False]), Formula::False);
        assert_eq!(Formula::or([]), Formula::False);
    }

    #[test]
    fn negation_reaches_literals() {
        let f = Formula::and([le("x", 1), le("y", 2)]);
        assert_eq!(f.not().not(), f);
        assert!(matches!(f.not(), Formula::Or(_)));
    }

    #[test]
    fn priming_renames_every_constant() {
        let f = Formula::or([le("x", 1), le("y", 2)]);
        let names: Vec<_> = f.primed().constants().iter().map(|c| c.name().to_owned()).collect();
        assert_eq!(names, ["x'", "y'"]);
        assert_eq!(f.primed().unprimed(), f);
    }
}
