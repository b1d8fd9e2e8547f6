//! Rendering formulas as SMT-LIB2 text and reading numeric values back.

use std::fmt::Write as _;

use gspacer_core::formula::{Constant, Formula, LinearTerm, Literal, Sort};
use gspacer_core::{BigInt, BigRational};
use num_traits::{One, Signed, Zero};

use crate::sexp::Sexp;

/// Output dialect. `Solver` quotes primed names and mixes sorts with
/// `to_real`; `Problem` writes names verbatim.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Solver,
    Problem,
}

pub fn symbol(c: &Constant, style: Style) -> String {
    let name = c.name();
    let simple = name
        .chars()
        .all(|ch| ch.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(ch))
        && !name.starts_with(|ch: char| ch.is_ascii_digit());
    if style == Style::Problem || simple {
        name.to_string()
    } else {
        format!("|{name}|")
    }
}

pub fn sort_name(s: Sort) -> &'static str {
    match s {
        Sort::Int => "Int",
        Sort::Real => "Real",
    }
}

fn numeral(n: &BigInt, real: bool) -> String {
    let body = if real { format!("{}.0", n.abs()) } else { n.abs().to_string() };
    if n.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

fn atom(c: &Constant, real: bool, style: Style) -> String {
    let s = symbol(c, style);
    if real && c.is_int() {
        format!("(to_real {s})")
    } else {
        s
    }
}

/// `Σ kᵢ·xᵢ + c`. In real context integer constants are converted.
pub fn term(t: &LinearTerm, real: bool, style: Style) -> String {
    let mut parts: Vec<String> = t
        .iter()
        .map(|(c, k)| {
            let a = atom(c, real, style);
            if k.is_one() {
                a
            } else {
                format!("(* {} {a})", numeral(k, real))
            }
        })
        .collect();
    if !t.offset().is_zero() || parts.is_empty() {
        parts.push(numeral(t.offset(), real));
    }
    if parts.len() == 1 {
        parts.pop().unwrap_or_default()
    } else {
        format!("(+ {})", parts.join(" "))
    }
}

pub fn literal(l: &Literal, style: Style) -> String {
    match l {
        Literal::Le { term: t, bound } => {
            let real = t.has_real();
            format!("(<= {} {})", term(t, real, style), numeral(bound, real))
        }
        Literal::Div { divisor, term: t, remainder } => {
            format!("(= (mod {} {}) {})", term(t, false, style), numeral(divisor, false), numeral(remainder, false))
        }
    }
}

pub fn formula(f: &Formula, style: Style) -> String {
    let mut out = String::new();
    write_formula(&mut out, f, style);
    out
}

fn write_formula(out: &mut String, f: &Formula, style: Style) {
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Lit(l) => out.push_str(&literal(l, style)),
        Formula::Not(inner) => {
            out.push_str("(not ");
            write_formula(out, inner, style);
            out.push(')');
        }
        Formula::And(parts) | Formula::Or(parts) => {
            let _ = write!(out, "({}", if matches!(f, Formula::And(_)) { "and" } else { "or" });
            for p in parts {
                out.push(' ');
                write_formula(out, p, style);
            }
            out.push(')');
        }
    }
}

/// Parses a numeric value as printed by a solver: `5`, `(- 5)`, `1.5`,
/// `(/ 1 2)`, `(- (/ 1 2))`, `(/ (- 1) 2)`.
pub fn value(e: &Sexp) -> Option<BigRational> {
    match e {
        Sexp::Atom(s, _) => decimal(s),
        Sexp::List(items, _) => match (items.first()?.atom()?, items.len()) {
            ("-", 2) => Some(-value(&items[1])?),
            ("/", 3) => {
                let d = value(&items[2])?;
                if d.is_zero() {
                    return None;
                }
                Some(value(&items[1])? / d)
            }
            _ => None,
        },
    }
}

fn decimal(s: &str) -> Option<BigRational> {
    let (int, frac) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    if int.is_empty() || !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = num_traits::pow(BigInt::from(10), frac.len());
    Some(BigRational::new(digits, scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexp::parse_one;
    use gspacer_core::formula::{normalize_literal, Cmp};

    fn x() -> Constant {
        Constant::int("x")
    }

    #[test]
    fn literals_render_with_solver_quoting() {
        let t = LinearTerm::from_parts([(x().primed(), BigInt::from(2)), (x(), BigInt::from(-1))], BigInt::zero());
        let f = normalize_literal(&t, Cmp::Le, &LinearTerm::constant(-3)).unwrap();
        assert_eq!(formula(&f, Style::Solver), "(<= (+ (* (- 1) x) (* 2 |x'|)) (- 3))");
        assert_eq!(formula(&f, Style::Problem), "(<= (+ (* (- 1) x) (* 2 x')) (- 3))");
        let d = Literal::div(&BigInt::from(2), LinearTerm::var(x()) - LinearTerm::constant(1));
        assert_eq!(formula(&d, Style::Solver), "(= (mod x 2) 1)");
    }

    #[test]
    fn mixed_sorts_use_to_real() {
        let a = Constant::real("alpha!0");
        let t = LinearTerm::from_parts([(a, BigInt::from(3)), (x(), BigInt::from(1))], BigInt::zero());
        let f = Literal::le(t);
        assert_eq!(formula(&f, Style::Solver), "(<= (+ (* 3.0 alpha!0) (to_real x)) 0.0)");
    }

    #[test]
    fn values_parse_exactly() {
        let v = |s: &str| value(&parse_one(s).unwrap()).unwrap();
        assert_eq!(v("7"), BigRational::from_integer(7.into()));
        assert_eq!(v("(- 7)"), BigRational::from_integer((-7).into()));
        assert_eq!(v("(/ 1 3)"), BigRational::new(1.into(), 3.into()));
        assert_eq!(v("(- (/ 1 3))"), BigRational::new((-1).into(), 3.into()));
        assert_eq!(v("(/ (- 4) 6)"), BigRational::new((-2).into(), 3.into()));
        assert_eq!(v("2.50"), BigRational::new(5.into(), 2.into()));
        assert!(value(&parse_one("(/ 1 0)").unwrap()).is_none());
        assert!(value(&parse_one("x").unwrap()).is_none());
    }
}
