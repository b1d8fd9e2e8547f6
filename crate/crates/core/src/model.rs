//! Assignments of exact values to constants.

use alloc::collections::BTreeMap;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::formula::{Constant, Formula, LinearTerm, Literal};

/// A model. Constants without an entry read as zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Model {
    values: BTreeMap<Constant, BigRational>,
}

impl Model {
    pub fn new() -> Self {
        Model::default()
    }

    pub fn set(&mut self, c: Constant, v: BigRational) {
        self.values.insert(c, v);
    }

    pub fn set_int(&mut self, c: Constant, v: impl Into<BigInt>) {
        self.values.insert(c, BigRational::from_integer(v.into()));
    }

    pub fn get(&self, c: &Constant) -> Option<&BigRational> {
        self.values.get(c)
    }

    pub fn value(&self, c: &Constant) -> BigRational {
        self.values.get(c).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Value of an integer constant. Panics in debug builds on a fractional
    /// value.
    pub fn int_value(&self, c: &Constant) -> BigInt {
        let v = self.value(c);
        debug_assert!(v.is_integer(), "{c} = {v} is not integral");
        v.to_integer()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Constant, &BigRational)> {
        self.values.iter()
    }

    pub fn remove(&mut self, c: &Constant) {
        self.values.remove(c);
    }

    pub fn eval_term(&self, t: &LinearTerm) -> BigRational {
        let mut acc = BigRational::from_integer(t.offset().clone());
        for (c, k) in t.iter() {
            acc += self.value(c) * BigRational::from_integer(k.clone());
        }
        acc
    }

    pub fn eval_literal(&self, l: &Literal) -> bool {
        match l {
            Literal::Le { term, bound } => self.eval_term(term) <= BigRational::from_integer(bound.clone()),
            Literal::Div { divisor, term, remainder } => {
                let v = self.eval_term(term) - BigRational::from_integer(remainder.clone());
                v.is_integer() && v.to_integer().is_multiple_of(divisor)
            }
        }
    }

    pub fn eval(&self, f: &Formula) -> bool {
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Lit(l) => self.eval_literal(l),
            Formula::Not(inner) => !self.eval(inner),
            Formula::And(parts) => parts.iter().all(|p| self.eval(p)),
            Formula::Or(parts) => parts.iter().any(|p| self.eval(p)),
        }
    }

    /// Keeps only the constants selected by `keep`, renamed by `rename`.
    pub fn restrict(&self, keep: impl Fn(&Constant) -> bool, rename: impl Fn(&Constant) -> Constant) -> Model {
        self.values.iter().filter(|(c, _)| keep(c)).map(|(c, v)| (rename(c), v.clone())).collect()
    }
}

impl FromIterator<(Constant, BigRational)> for Model {
    fn from_iter<T: IntoIterator<Item = (Constant, BigRational)>>(iter: T) -> Self {
        Model { values: iter.into_iter().collect() }
    }
}

impl FromIterator<(Constant, i64)> for Model {
    fn from_iter<T: IntoIterator<Item = (Constant, i64)>>(iter: T) -> Self {
        iter.into_iter().map(|(c, v)| (c, BigRational::from_integer(v.into()))).collect()
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (c, v)) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            if v.is_negative() {
                write!(f, "{c}=({v})")?;
            } else {
                write!(f, "{c}={v}")?;
            }
        }
        f.write_str("]")
    }
}
