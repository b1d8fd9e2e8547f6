use alloc::boxed::Box;
use alloc::vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Constant, Formula, FormulaError, LinearTerm};

/// Comparison operators accepted by [`normalize_literal`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

/// An atomic constraint.
///
/// `Le` denotes `term ≤ bound`; `Div` denotes `divisor | (term − remainder)`.
/// Terms never carry an offset. Values built through [`Literal::le`] and
/// [`Literal::div`] are normalized; the variants are public so that patterns
/// can rebuild a literal from its parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Literal {
    Le { term: LinearTerm, bound: BigInt },
    Div { divisor: BigInt, term: LinearTerm, remainder: BigInt },
}

/// Normalizes `lhs op rhs`. Equalities become a conjunction of two
/// inequalities; trivial comparisons fold to `true`/`false`.
pub fn normalize_literal(lhs: &LinearTerm, op: Cmp, rhs: &LinearTerm) -> Result<Formula, FormulaError> {
    let diff = lhs.clone() - rhs.clone();
    let real = diff.has_real();
    match op {
        Cmp::Le => Ok(Literal::le(diff)),
        Cmp::Ge => Ok(Literal::le(-diff)),
        Cmp::Eq => Ok(Formula::and([Literal::le(diff.clone()), Literal::le(-diff)])),
        Cmp::Lt | Cmp::Gt if real => Err(FormulaError::StrictOverReals),
        Cmp::Lt => Ok(Literal::le(diff + LinearTerm::constant(1))),
        Cmp::Gt => Ok(Literal::le(-diff + LinearTerm::constant(1))),
    }
}

impl Literal {
    /// `t ≤ 0`, normalized: summands in constant order, coefficients divided
    /// by their gcd. Over integers the bound is rounded down; when a real
    /// constant occurs the division is exact and includes the bound.
    pub fn le(t: LinearTerm) -> Formula {
        let bound = -t.offset().clone();
        let term = t.without_offset();
        if term.is_constant() {
            return if bound.is_negative() { Formula::False } else { Formula::True };
        }
        let mut g = term.iter().fold(BigInt::zero(), |g, (_, k)| g.gcd(k));
        if term.has_real() {
            g = g.gcd(&bound);
            Formula::Lit(Literal::Le { term: divide(&term, &g), bound: bound / &g })
        } else {
            Formula::Lit(Literal::Le { term: divide(&term, &g), bound: bound.div_floor(&g) })
        }
    }

    /// `d | t` over integers, normalized: coefficients reduced modulo `d`,
    /// common factors with `d` cancelled, remainder in `[0, d)`.
    pub fn div(d: &BigInt, t: LinearTerm) -> Formula {
        let mut d = d.abs();
        if d.is_zero() {
            return Formula::and(vec![Literal::le(t.clone()), Literal::le(-t)]);
        }
        let reduced = LinearTerm::from_parts(
            t.iter().map(|(c, k)| (c.clone(), k.mod_floor(&d))),
            t.offset().mod_floor(&d),
        );
        let mut offset = reduced.offset().clone();
        let mut term = reduced.without_offset();
        if term.is_constant() {
            return if offset.is_zero() { Formula::True } else { Formula::False };
        }
        let g = term.iter().fold(d.clone(), |g, (_, k)| g.gcd(k));
        if !g.is_one() {
            if !offset.is_multiple_of(&g) {
                return Formula::False;
            }
            d /= &g;
            offset /= &g;
            term = divide(&term, &g);
        }
        if d.is_one() {
            return Formula::True;
        }
        let remainder = (-offset).mod_floor(&d);
        Formula::Lit(Literal::Div { divisor: d, term, remainder })
    }

    pub fn term(&self) -> &LinearTerm {
        match self {
            Literal::Le { term, .. } | Literal::Div { term, .. } => term,
        }
    }

    pub fn is_div(&self) -> bool {
        matches!(self, Literal::Div { .. })
    }

    pub fn has_real(&self) -> bool {
        self.term().has_real()
    }

    pub fn constants(&self) -> impl Iterator<Item = &Constant> {
        self.term().constants()
    }

    pub fn mentions(&self, c: &Constant) -> bool {
        self.term().contains(c)
    }

    /// The literal as `t ≤ 0` (inequalities) or `d | t` (divisibility), with
    /// the bound folded into the offset.
    pub fn as_offset_term(&self) -> LinearTerm {
        match self {
            Literal::Le { term, bound } => term.clone() - LinearTerm::constant(bound.clone()),
            Literal::Div { term, remainder, .. } => term.clone() - LinearTerm::constant(remainder.clone()),
        }
    }

    /// Negation. Integer inequalities flip into a literal; the rest stay
    /// wrapped in `Not`.
    pub fn negate(&self) -> Formula {
        match self {
            Literal::Le { term, bound } if !term.has_real() => Formula::Lit(Literal::Le {
                term: -term.clone(),
                bound: -bound - BigInt::one(),
            }),
            _ => Formula::Not(Box::new(Formula::Lit(self.clone()))),
        }
    }

    /// Renames constants and renormalizes.
    pub fn map_constants(&self, f: &impl Fn(&Constant) -> Constant) -> Formula {
        match self {
            Literal::Le { .. } => Literal::le(self.as_offset_term().map_constants(f)),
            Literal::Div { divisor, .. } => Literal::div(divisor, self.as_offset_term().map_constants(f)),
        }
    }

    fn kind_rank(&self) -> u8 {
        match self {
            Literal::Le { .. } => 0,
            Literal::Div { .. } => 1,
        }
    }
}

fn divide(t: &LinearTerm, g: &BigInt) -> LinearTerm {
    if g.is_one() || g.is_zero() {
        return t.clone();
    }
    LinearTerm::from_parts(t.iter().map(|(c, k)| (c.clone(), k / g)), t.offset() / g)
}

impl PartialOrd for Literal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Literal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.kind_rank().cmp(&other.kind_rank()).then_with(|| match (self, other) {
            (Literal::Le { term: t1, bound: b1 }, Literal::Le { term: t2, bound: b2 }) => {
                t1.shape_cmp(t2).then_with(|| b1.cmp(b2))
            }
            (
                Literal::Div { divisor: d1, term: t1, remainder: r1 },
                Literal::Div { divisor: d2, term: t2, remainder: r2 },
            ) => t1.shape_cmp(t2).then_with(|| d1.cmp(d2)).then_with(|| r1.cmp(r2)),
            _ => Ordering::Equal,
        })
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Le { term, bound } => write!(f, "{term} <= {bound}"),
            Literal::Div { divisor, term, remainder } if remainder.is_zero() => {
                write!(f, "{divisor} | {term}")
            }
            Literal::Div { divisor, term, remainder } => write!(f, "{divisor} | ({term} - {remainder})"),
        }
    }
}
