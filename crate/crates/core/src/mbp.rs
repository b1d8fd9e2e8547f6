//! Model-based projection over mixed integer/real linear arithmetic.
//!
//! Real constants are eliminated first by substituting the greatest lower
//! bound under the model (bounds are cross-multiplied, so no fractions
//! appear). Integer constants follow, by substitution through an equality
//! when one exists and otherwise by a model-guided Cooper step.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::formula::{Constant, Cube, Formula, LinearTerm, Literal};
use crate::model::Model;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MbpError {
    /// The model falsifies the formula being projected.
    ModelViolation(String),
    /// A negated real inequality has no non-strict implicant.
    StrictReal(String),
    /// An integer constant shares a literal with a real one left in place.
    MixedLiteral(String),
}

impl fmt::Display for MbpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MbpError::ModelViolation(s) => write!(f, "model falsifies {s}"),
            MbpError::StrictReal(s) => write!(f, "cannot select an implicant for {s}"),
            MbpError::MixedLiteral(s) => write!(f, "cannot eliminate an integer from mixed literal {s}"),
        }
    }
}

impl core::error::Error for MbpError {}

/// `T ≤ 0` or `d | T`, with the bound folded into `T`.
#[derive(Clone, Debug)]
enum Atom {
    Le(LinearTerm),
    Div(BigInt, LinearTerm),
}

impl Atom {
    fn of(l: &Literal) -> Atom {
        match l {
            Literal::Le { .. } => Atom::Le(l.as_offset_term()),
            Literal::Div { divisor, .. } => Atom::Div(divisor.clone(), l.as_offset_term()),
        }
    }

    fn term(&self) -> &LinearTerm {
        match self {
            Atom::Le(t) | Atom::Div(_, t) => t,
        }
    }

    fn to_formula(&self) -> Formula {
        match self {
            Atom::Le(t) => Literal::le(t.clone()),
            Atom::Div(d, t) => Literal::div(d, t.clone()),
        }
    }
}

/// Selects the literals of `f` that hold in `model`, descending into the
/// first true disjunct of every disjunction.
pub fn implicant(f: &Formula, model: &Model) -> Result<Vec<Literal>, MbpError> {
    let mut out = Vec::new();
    collect_implicant(f, model, &mut out)?;
    Ok(out)
}

fn collect_implicant(f: &Formula, model: &Model, out: &mut Vec<Literal>) -> Result<(), MbpError> {
    match f {
        Formula::True => Ok(()),
        Formula::False => Err(MbpError::ModelViolation(String::from("false"))),
        Formula::Lit(l) => {
            if model.eval_literal(l) {
                out.push(l.clone());
                Ok(())
            } else {
                Err(MbpError::ModelViolation(alloc::format!("{l}")))
            }
        }
        Formula::Not(inner) => match &**inner {
            Formula::Lit(Literal::Div { divisor, term, remainder }) => {
                let v = model.eval_term(term).to_integer().mod_floor(divisor);
                if &v == remainder {
                    return Err(MbpError::ModelViolation(alloc::format!("{f}")));
                }
                if let Formula::Lit(l) = Literal::div(divisor, term.clone() - LinearTerm::constant(v)) {
                    out.push(l);
                }
                Ok(())
            }
            Formula::Lit(l @ Literal::Le { term, .. }) if !term.has_real() => collect_implicant(&l.negate(), model, out),
            other if model.eval(f) => match other {
                Formula::Lit(_) => Err(MbpError::StrictReal(alloc::format!("{f}"))),
                _ => collect_implicant(&other.not(), model, out),
            },
            _ => Err(MbpError::ModelViolation(alloc::format!("{f}"))),
        },
        Formula::And(parts) => parts.iter().try_for_each(|p| collect_implicant(p, model, out)),
        Formula::Or(parts) => match parts.iter().find(|p| model.eval(p)) {
            Some(p) => collect_implicant(p, model, out),
            None => Err(MbpError::ModelViolation(alloc::format!("{f}"))),
        },
    }
}

/// Projects `eliminate` out of an arbitrary formula: the model-true
/// implicant is selected first, then projected.
pub fn project_formula(eliminate: &BTreeSet<Constant>, f: &Formula, model: &Model) -> Result<Cube, MbpError> {
    let lits = implicant(f, model)?;
    project(eliminate, &Cube::new(lits), model)
}

/// Model-based projection of `eliminate` out of `body`.
///
/// The result mentions no eliminated constant, is satisfied by `model`, and
/// implies `∃ eliminate. body`.
pub fn project(eliminate: &BTreeSet<Constant>, body: &Cube, model: &Model) -> Result<Cube, MbpError> {
    if let Some(l) = body.iter().find(|l| !model.eval_literal(l)) {
        return Err(MbpError::ModelViolation(alloc::format!("{l}")));
    }
    let mut atoms: Vec<Atom> = body.iter().map(Atom::of).collect();
    let (reals, ints): (Vec<&Constant>, Vec<&Constant>) = eliminate.iter().partition(|c| !c.is_int());
    for v in reals {
        atoms = eliminate_real(v, atoms, model);
    }
    for v in ints {
        atoms = eliminate_int(v, atoms, model)?;
    }
    let mut out = Vec::new();
    for a in &atoms {
        match a.to_formula() {
            Formula::True => {}
            Formula::Lit(l) => out.push(l),
            other => {
                // Only reachable through an arithmetic bug: every atom
                // produced above holds in the model.
                return Err(MbpError::ModelViolation(alloc::format!("{other} from {}", a.term())));
            }
        }
    }
    let cube = Cube::new(out);
    debug_assert!(cube.iter().all(|l| model.eval_literal(l)), "projection lost the model");
    debug_assert!(cube.iter().all(|l| !l.constants().any(|c| eliminate.contains(c))));
    Ok(cube)
}

fn int(n: &BigInt) -> LinearTerm {
    LinearTerm::constant(n.clone())
}

/// Finds `c·v + r = 0` among the inequalities, as the index of the atom
/// `c·v + r ≤ 0` whose negation is also present.
fn find_equality(v: &Constant, atoms: &[Atom], prefer_unit: bool) -> Option<usize> {
    let mut found = None;
    for (i, a) in atoms.iter().enumerate() {
        let Atom::Le(t) = a else { continue };
        let k = t.coeff(v);
        if k.is_zero() {
            continue;
        }
        let neg = -t.clone();
        let paired = atoms.iter().any(|b| matches!(b, Atom::Le(u) if *u == neg));
        if !paired {
            continue;
        }
        if !prefer_unit || k.abs().is_one() {
            return Some(i);
        }
        found.get_or_insert(i);
    }
    found
}

fn eliminate_real(v: &Constant, atoms: Vec<Atom>, model: &Model) -> Vec<Atom> {
    let (with, mut rest): (Vec<Atom>, Vec<Atom>) = atoms.into_iter().partition(|a| a.term().contains(v));
    if with.is_empty() {
        return rest;
    }
    // Pivot: an equality if one exists, otherwise the greatest lower bound.
    let pivot = match find_equality(v, &with, false) {
        Some(i) => i,
        None => {
            let lower = with.iter().enumerate().filter(|(_, a)| a.term().coeff(v).is_negative());
            // c·v + r ≤ 0 with c < 0 reads v ≥ r / -c.
            let best = lower.max_by(|(i, a), (j, b)| {
                let va = bound_value(v, a.term(), model);
                let vb = bound_value(v, b.term(), model);
                va.cmp(&vb).then_with(|| j.cmp(i))
            });
            match best {
                Some((i, _)) => i,
                // Unbounded below: every literal on v is dropped.
                None => return rest,
            }
        }
    };
    let (c, r) = with[pivot].term().split(v);
    // v = -r / c; substitute into a·v + s as |c|·s - sign(c)·a·r.
    for (i, a) in with.iter().enumerate() {
        if i == pivot {
            continue;
        }
        let (k, s) = a.term().split(v);
        let t = s * &c.abs() - r.clone() * &(&k * c.signum());
        rest.push(Atom::Le(t));
    }
    rest
}

/// For `c·v + r` with `c ≠ 0`, the model value of `-r / c`.
fn bound_value(v: &Constant, t: &LinearTerm, model: &Model) -> BigRational {
    let (c, r) = t.split(v);
    -model.eval_term(&r) / BigRational::from_integer(c)
}

fn eliminate_int(v: &Constant, atoms: Vec<Atom>, model: &Model) -> Result<Vec<Atom>, MbpError> {
    let (with, mut rest): (Vec<Atom>, Vec<Atom>) = atoms.into_iter().partition(|a| a.term().contains(v));
    if with.is_empty() {
        return Ok(rest);
    }
    if let Some(a) = with.iter().find(|a| a.term().has_real()) {
        return Err(MbpError::MixedLiteral(alloc::format!("{}", a.term())));
    }
    if let Some(p) = find_equality(v, &with, true) {
        // c·v + r = 0: scale everything by |c| and substitute c·v = -r.
        let (c, r) = with[p].term().split(v);
        let m = c.abs();
        let sub = |a: &Atom| -> Atom {
            let (k, s) = a.term().split(v);
            let t = s * &m - r.clone() * &(&k * c.signum());
            match a {
                Atom::Le(_) => Atom::Le(t),
                Atom::Div(d, _) => Atom::Div(d * &m, t),
            }
        };
        for (i, a) in with.iter().enumerate() {
            if i != p {
                rest.push(sub(a));
            }
        }
        if !m.is_one() {
            rest.push(Atom::Div(m, r));
        }
        return Ok(rest);
    }

    // Cooper: scale every literal so v appears as z = L·v.
    let l = with.iter().fold(BigInt::one(), |acc, a| acc.lcm(&a.term().coeff(v)));
    let mut lowers: Vec<LinearTerm> = Vec::new();
    let mut uppers: Vec<LinearTerm> = Vec::new();
    let mut divs: Vec<(BigInt, LinearTerm)> = Vec::new();
    for a in &with {
        let (k, s) = a.term().split(v);
        let f = &l / &k; // may be negative
        match a {
            // Scaled by |f|, an inequality reads ±z - f·s ≤ 0.
            Atom::Le(_) if k.is_positive() => uppers.push(-(s * &f)),
            Atom::Le(_) => lowers.push(-(s * &f)),
            Atom::Div(d, _) => divs.push((d * f.abs(), s * &f)),
        }
    }
    if !l.is_one() {
        divs.push((l.clone(), LinearTerm::zero()));
    }
    let delta = divs.iter().fold(BigInt::one(), |acc, (d, _)| acc.lcm(d));
    let z_val = model.int_value(v) * &l;
    let eval = |t: &LinearTerm| model.eval_term(t).to_integer();

    let z: LinearTerm = if let Some(best) = argbest(&lowers, |a, b| eval(a).cmp(&eval(b))) {
        let lb = lowers[best].clone();
        let rho = (&z_val - eval(&lb)).mod_floor(&delta);
        lb + int(&rho)
    } else if let Some(best) = argbest(&uppers, |a, b| eval(b).cmp(&eval(a))) {
        let ub = uppers[best].clone();
        let rho = (eval(&ub) - &z_val).mod_floor(&delta);
        ub - int(&rho)
    } else {
        int(&z_val.mod_floor(&delta))
    };

    for lb in lowers {
        rest.push(Atom::Le(lb - z.clone()));
    }
    for ub in uppers {
        rest.push(Atom::Le(z.clone() - ub));
    }
    for (d, s) in divs {
        rest.push(Atom::Div(d, z.clone() + s));
    }
    Ok(rest)
}

/// Index of the maximum under `cmp`, the first one on ties.
fn argbest<T>(items: &[T], cmp: impl Fn(&T, &T) -> core::cmp::Ordering) -> Option<usize> {
    let mut best: Option<usize> = None;
    for i in 0..items.len() {
        match best {
            Some(b) if cmp(&items[i], &items[b]) != core::cmp::Ordering::Greater => {}
            _ => best = Some(i),
        }
    }
    best
}
