//! The problem format:
//!
//! ```text
//! (declare-var x Int)
//! (init (= x 0))
//! (trans (= x' (+ x 1)))
//! (bad (>= x 3))
//! (set-info :status unsafe)
//! ```
//!
//! Formulas use SMT-LIB syntax for linear integer arithmetic. `x'` denotes
//! the next-state copy of `x` and may only occur in `trans`.

use std::fmt::{self, Write as _};

use gspacer_core::formula::{normalize_literal, Cmp, Constant, Cube, Formula, LinearTerm, Literal};
use gspacer_core::system::TransitionSystem;
use gspacer_core::BigInt;
use num_traits::{Signed, Zero};

use crate::sexp::{parse_all, Pos, Sexp, SyntaxError};
use crate::smtlib::{self, Style};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Safe,
    Unsafe,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Safe => "safe",
            Status::Unsafe => "unsafe",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub system: TransitionSystem,
    pub expected: Option<Status>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemError {
    pub pos: Pos,
    pub msg: String,
}

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.pos, self.msg)
    }
}

impl std::error::Error for ProblemError {}

impl From<SyntaxError> for ProblemError {
    fn from(e: SyntaxError) -> Self {
        ProblemError { pos: e.pos, msg: e.msg }
    }
}

fn err<T>(at: &Sexp, msg: impl Into<String>) -> Result<T, ProblemError> {
    Err(ProblemError { pos: at.pos(), msg: msg.into() })
}

fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_') && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

struct Scope<'a> {
    vars: &'a [Constant],
    primes: bool,
}

impl Scope<'_> {
    fn lookup(&self, e: &Sexp, name: &str) -> Result<Constant, ProblemError> {
        let (base, primed) = match name.strip_suffix('\'') {
            Some(b) => (b, true),
            None => (name, false),
        };
        let Some(v) = self.vars.iter().find(|v| v.name() == base) else {
            return err(e, format!("unknown symbol {name}"));
        };
        if primed && !self.primes {
            return err(e, format!("primed variable {name} outside trans"));
        }
        Ok(if primed { v.primed() } else { v.clone() })
    }

    fn numeral(&self, e: &Sexp) -> Option<BigInt> {
        let s = e.atom()?;
        let digits = s.strip_prefix('-').unwrap_or(s);
        if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
            s.parse().ok()
        } else {
            None
        }
    }

    fn term(&self, e: &Sexp) -> Result<LinearTerm, ProblemError> {
        match e {
            Sexp::Atom(s, _) => {
                if let Some(n) = self.numeral(e) {
                    return Ok(LinearTerm::constant(n));
                }
                Ok(LinearTerm::var(self.lookup(e, s)?))
            }
            Sexp::List(items, _) => {
                let Some(op) = e.head() else { return err(e, "expected a term") };
                let args = &items[1..];
                match (op, args.len()) {
                    ("+", _) => args.iter().try_fold(LinearTerm::zero(), |acc, a| Ok(acc + self.term(a)?)),
                    ("-", 1) => Ok(-self.term(&args[0])?),
                    ("-", n) if n >= 2 => {
                        let first = self.term(&args[0])?;
                        args[1..].iter().try_fold(first, |acc, a| Ok(acc - self.term(a)?))
                    }
                    ("*", n) if n >= 1 => {
                        let mut acc: Option<LinearTerm> = None;
                        let mut scale = BigInt::from(1);
                        for a in args {
                            let t = self.term(a)?;
                            if t.is_constant() {
                                scale *= t.offset();
                            } else if acc.is_some() {
                                return err(e, "non-linear term");
                            } else {
                                acc = Some(t);
                            }
                        }
                        Ok(acc.unwrap_or_else(|| LinearTerm::constant(1)) * &scale)
                    }
                    _ => err(e, format!("unsupported term operator {op}")),
                }
            }
        }
    }

    /// `(mod t d)` with a positive numeral `d`.
    fn modulus(&self, e: &Sexp) -> Result<Option<(LinearTerm, BigInt)>, ProblemError> {
        if e.head() != Some("mod") {
            return Ok(None);
        }
        let items = e.list().unwrap_or(&[]);
        let [_, t, d] = items else { return err(e, "mod takes two arguments") };
        let Some(d) = self.numeral(d) else { return err(e, "mod needs a numeral divisor") };
        if d.is_zero() {
            return err(e, "mod by zero");
        }
        Ok(Some((self.term(t)?, d)))
    }

    fn formula(&self, e: &Sexp) -> Result<Formula, ProblemError> {
        match e {
            Sexp::Atom(s, _) => match s.as_str() {
                "true" => Ok(Formula::True),
                "false" => Ok(Formula::False),
                _ => err(e, format!("expected a formula, found {s}")),
            },
            Sexp::List(items, _) => {
                if let Some(Sexp::List(idx, _)) = items.first() {
                    // ((_ divisible d) t)
                    if let ([u, name, d], [_, t]) = (&idx[..], &items[..]) {
                        if u.atom() == Some("_") && name.atom() == Some("divisible") {
                            let Some(d) = self.numeral(d).filter(|d| !d.is_zero()) else { return err(e, "bad divisor") };
                            return Ok(Literal::div(&d, self.term(t)?));
                        }
                    }
                    return err(e, "unsupported indexed operator");
                }
                let Some(op) = e.head() else { return err(e, "empty formula") };
                let args = &items[1..];
                let nary = |f: &dyn Fn(Vec<Formula>) -> Formula| -> Result<Formula, ProblemError> {
                    Ok(f(args.iter().map(|a| self.formula(a)).collect::<Result<_, _>>()?))
                };
                match op {
                    "and" => nary(&|v| Formula::and(v)),
                    "or" => nary(&|v| Formula::or(v)),
                    "not" if args.len() == 1 => Ok(self.formula(&args[0])?.not()),
                    "=>" if args.len() == 2 => Ok(self.formula(&args[0])?.implies(&self.formula(&args[1])?)),
                    "distinct" if args.len() == 2 => Ok(self.comparison(e, "=", &args[0], &args[1])?.not()),
                    "<=" | "<" | ">=" | ">" | "=" if args.len() >= 2 => {
                        let parts = args.windows(2).map(|w| self.comparison(e, op, &w[0], &w[1]));
                        Ok(Formula::and(parts.collect::<Result<Vec<_>, _>>()?))
                    }
                    _ => err(e, format!("unsupported formula operator {op}")),
                }
            }
        }
    }

    fn comparison(&self, at: &Sexp, op: &str, l: &Sexp, r: &Sexp) -> Result<Formula, ProblemError> {
        if op == "=" {
            for (m, other) in [(l, r), (r, l)] {
                if let Some((t, d)) = self.modulus(m)? {
                    let Some(k) = self.numeral(other).or_else(|| negative(other)) else {
                        return err(at, "mod may only be compared with a numeral");
                    };
                    if k.is_negative() || k >= d.abs() {
                        return Ok(Formula::False);
                    }
                    return Ok(Literal::div(&d, t - LinearTerm::constant(k)));
                }
            }
        }
        let cmp = match op {
            "<=" => Cmp::Le,
            "<" => Cmp::Lt,
            ">=" => Cmp::Ge,
            ">" => Cmp::Gt,
            _ => Cmp::Eq,
        };
        normalize_literal(&self.term(l)?, cmp, &self.term(r)?).or_else(|e| err(at, e.to_string()))
    }
}

fn negative(e: &Sexp) -> Option<BigInt> {
    let [m, n] = e.list()? else { return None };
    if m.atom() != Some("-") {
        return None;
    }
    let s = n.atom()?;
    s.bytes().all(|b| b.is_ascii_digit()).then(|| s.parse::<BigInt>().ok()).flatten().map(|v| -v)
}

/// Parses one formula over `vars`; primed names are accepted.
pub fn parse_formula(text: &str, vars: &[Constant]) -> Result<Formula, ProblemError> {
    let e = crate::sexp::parse_one(text)?;
    Scope { vars, primes: true }.formula(&e)
}

/// Parses a problem file.
pub fn parse_problem(text: &str) -> Result<Problem, ProblemError> {
    let top = parse_all(text)?;
    let mut vars: Vec<Constant> = Vec::new();
    let mut sections: [Option<&Sexp>; 3] = [None, None, None];
    let mut expected = None;
    for cmd in &top {
        let Some(head) = cmd.head() else { return err(cmd, "expected a command") };
        let args = &cmd.list().unwrap_or(&[])[1..];
        match head {
            "declare-var" | "declare-const" => {
                let [name, sort] = args else { return err(cmd, "expected (declare-var name Int)") };
                let Some(n) = name.atom().filter(|n| is_identifier(n)) else { return err(name, "invalid variable name") };
                if sort.atom() != Some("Int") {
                    return err(sort, "only Int variables are supported");
                }
                if vars.iter().any(|v| v.name() == n) {
                    return err(name, format!("duplicate declaration of {n}"));
                }
                vars.push(Constant::int(n));
            }
            "init" | "trans" | "bad" => {
                let slot = match head {
                    "init" => 0,
                    "trans" => 1,
                    _ => 2,
                };
                let [body] = args else { return err(cmd, format!("{head} takes one formula")) };
                if sections[slot].is_some() {
                    return err(cmd, format!("duplicate {head}"));
                }
                sections[slot] = Some(body);
            }
            "set-info" => {
                if let [key, val] = args {
                    if key.atom() == Some(":status") {
                        expected = match val.atom() {
                            Some("safe") => Some(Status::Safe),
                            Some("unsafe") => Some(Status::Unsafe),
                            _ => return err(val, "status must be safe or unsafe"),
                        };
                    }
                }
            }
            _ => return err(cmd, format!("unknown command {head}")),
        }
    }
    let at_end = Sexp::Atom(String::new(), top.last().map_or(Pos { line: 1, col: 1 }, Sexp::pos));
    let [Some(init), Some(trans), Some(bad)] = sections else {
        let missing = ["init", "trans", "bad"][sections.iter().position(Option::is_none).unwrap_or(0)];
        return err(&at_end, format!("missing ({missing} ...)"));
    };
    let state = Scope { vars: &vars, primes: false };
    let step = Scope { vars: &vars, primes: true };
    let init_f = state.formula(init)?;
    let trans_f = step.formula(trans)?;
    if bad.list().is_some_and(|l| l.is_empty()) {
        return err(bad, "bad must not be empty");
    }
    let bad_f = state.formula(bad)?;
    let Some(bad_cube) = Cube::from_formula(&bad_f) else { return err(bad, "bad is not a cube") };
    let system = TransitionSystem::new(vars, init_f, trans_f, bad_cube).or_else(|e| err(&at_end, e.to_string()))?;
    Ok(Problem { system, expected })
}

/// Writes a problem back in the input format.
pub fn render_problem(p: &Problem) -> String {
    let ts = &p.system;
    let mut out = String::new();
    for v in ts.vars() {
        let _ = writeln!(out, "(declare-var {v} Int)");
    }
    let _ = writeln!(out, "(init {})", render_formula(ts.init()));
    let _ = writeln!(out, "(trans {})", render_formula(ts.trans()));
    let _ = writeln!(out, "(bad {})", render_formula(&ts.bad().to_formula()));
    if let Some(s) = p.expected {
        let _ = writeln!(out, "(set-info :status {s})");
    }
    out
}

/// A formula in the input syntax.
pub fn render_formula(f: &Formula) -> String {
    smtlib::formula(f, Style::Problem)
}
