use alloc::collections::BTreeMap;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::Constant;

/// `Σ coeff·x + offset` with integer coefficients. Zero coefficients are
/// never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LinearTerm {
    coeffs: BTreeMap<Constant, BigInt>,
    offset: BigInt,
}

impl LinearTerm {
    pub fn zero() -> Self {
        LinearTerm::default()
    }

    pub fn constant(n: impl Into<BigInt>) -> Self {
        LinearTerm { coeffs: BTreeMap::new(), offset: n.into() }
    }

    pub fn var(c: Constant) -> Self {
        LinearTerm::monomial(BigInt::one(), c)
    }

    pub fn monomial(k: impl Into<BigInt>, c: Constant) -> Self {
        let mut t = LinearTerm::zero();
        t.add_monomial(&c, &k.into());
        t
    }

    pub fn from_parts(coeffs: impl IntoIterator<Item = (Constant, BigInt)>, offset: BigInt) -> Self {
        let mut t = LinearTerm::constant(offset);
        for (c, k) in coeffs {
            t.add_monomial(&c, &k);
        }
        t
    }

    pub fn add_monomial(&mut self, c: &Constant, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(c.clone()).or_insert_with(BigInt::zero);
        *entry += k;
        if entry.is_zero() {
            self.coeffs.remove(c);
        }
    }

    pub fn add_constant(&mut self, k: &BigInt) {
        self.offset += k;
    }

    pub fn coeffs(&self) -> &BTreeMap<Constant, BigInt> {
        &self.coeffs
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Constant, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, c: &Constant) -> BigInt {
        self.coeffs.get(c).cloned().unwrap_or_default()
    }

    pub fn contains(&self, c: &Constant) -> bool {
        self.coeffs.contains_key(c)
    }

    pub fn offset(&self) -> &BigInt {
        &self.offset
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn constants(&self) -> impl Iterator<Item = &Constant> {
        self.coeffs.keys()
    }

    pub fn num_constants(&self) -> usize {
        self.coeffs.len()
    }

    pub fn has_real(&self) -> bool {
        self.coeffs.keys().any(|c| !c.is_int())
    }

    /// The same term without its constant part.
    pub fn without_offset(&self) -> LinearTerm {
        LinearTerm { coeffs: self.coeffs.clone(), offset: BigInt::zero() }
    }

    /// Splits off the summand of `c`: returns its coefficient and the rest.
    pub fn split(&self, c: &Constant) -> (BigInt, LinearTerm) {
        let mut rest = self.clone();
        let k = rest.coeffs.remove(c).unwrap_or_default();
        (k, rest)
    }

    /// Replaces `c` by `replacement`.
    pub fn substitute(&self, c: &Constant, replacement: &LinearTerm) -> LinearTerm {
        let (k, rest) = self.split(c);
        if k.is_zero() {
            rest
        } else {
            rest + replacement.clone() * &k
        }
    }

    pub fn map_constants(&self, f: &impl Fn(&Constant) -> Constant) -> LinearTerm {
        let mut t = LinearTerm::constant(self.offset.clone());
        for (c, k) in &self.coeffs {
            t.add_monomial(&f(c), k);
        }
        t
    }

    /// Compares the constant sequences first, then the coefficients, then the
    /// offsets. Literal order inside cubes relies on this.
    pub(crate) fn shape_cmp(&self, other: &LinearTerm) -> Ordering {
        self.coeffs
            .keys()
            .cmp(other.coeffs.keys())
            .then_with(|| self.coeffs.values().cmp(other.coeffs.values()))
            .then_with(|| self.offset.cmp(&other.offset))
    }
}

impl PartialOrd for LinearTerm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LinearTerm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.shape_cmp(other)
    }
}

impl Add for LinearTerm {
    type Output = LinearTerm;
    fn add(mut self, rhs: LinearTerm) -> LinearTerm {
        for (c, k) in &rhs.coeffs {
            self.add_monomial(c, k);
        }
        self.offset += rhs.offset;
        self
    }
}

impl Sub for LinearTerm {
    type Output = LinearTerm;
    fn sub(self, rhs: LinearTerm) -> LinearTerm {
        self + (-rhs)
    }
}

impl Neg for LinearTerm {
    type Output = LinearTerm;
    fn neg(mut self) -> LinearTerm {
        for k in self.coeffs.values_mut() {
            *k = -&*k;
        }
        self.offset = -self.offset;
        self
    }
}

impl Mul<&BigInt> for LinearTerm {
    type Output = LinearTerm;
    fn mul(mut self, k: &BigInt) -> LinearTerm {
        if k.is_zero() {
            return LinearTerm::zero();
        }
        for v in self.coeffs.values_mut() {
            *v *= k;
        }
        self.offset *= k;
        self
    }
}

impl fmt::Display for LinearTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, k) in &self.coeffs {
            let mag = k.abs();
            if first {
                if k.is_negative() {
                    f.write_str("-")?;
                }
            } else if k.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if mag.is_one() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{mag}{c}")?;
            }
            first = false;
        }
        if first {
            write!(f, "{}", self.offset)
        } else if self.offset.is_positive() {
            write!(f, " + {}", self.offset)
        } else if self.offset.is_negative() {
            write!(f, " - {}", self.offset.abs())
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Constant {
        Constant::int("a")
    }
    fn b() -> Constant {
        Constant::int("b")
    }

    #[test]
    fn like_terms_combine_and_cancel() {
        let t = LinearTerm::monomial(3, a()) + LinearTerm::monomial(-3, a()) + LinearTerm::var(b());
        assert_eq!(t.num_constants(), 1);
        assert_eq!(t.coeff(&a()), BigInt::zero());
        assert_eq!(t.coeff(&b()), BigInt::one());
    }

    #[test]
    fn substitution_replaces_all_occurrences() {
        let t = LinearTerm::monomial(2, a()) + LinearTerm::var(b()) + LinearTerm::constant(1);
        let r = LinearTerm::var(b()) + LinearTerm::constant(5);
        let s = t.substitute(&a(), &r);
        assert_eq!(s.coeff(&b()), BigInt::from(3));
        assert_eq!(*s.offset(), BigInt::from(11));
    }

    #[test]
    fn display_is_readable() {
        let t = LinearTerm::monomial(3, a()) - LinearTerm::monomial(4, b()) - LinearTerm::constant(2);
        assert_eq!(t.to_string(), "3a - 4b - 2");
    }
}
