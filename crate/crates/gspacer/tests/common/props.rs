//! Property suites, checked against enumeration oracles in plain `i64`
//! arithmetic. Each returns the proptest failure message, if any.

use std::cell::RefCell;
use std::collections::BTreeSet;

use gspacer_core::formula::{normalize_literal, Cmp, Constant, Cube, Formula, LinearTerm, Literal};
use gspacer_core::linalg::{divisibility_of_column, kernel_basis, RationalMatrix};
use gspacer_core::mbp::project;
use gspacer_core::model::Model;
use gspacer_core::oracle::SmtOracle;
use gspacer_core::rules::{closure, concretize, subsume_cube, SubsumeInput};
use gspacer_core::{BigInt, BigRational};
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn c(n: &str) -> Constant {
    Constant::int(n)
}

fn k(n: i64) -> LinearTerm {
    LinearTerm::constant(n)
}

fn int(b: &BigInt) -> i64 {
    i64::try_from(b).expect("small numbers")
}

/// Value of `t` at `point`, where `names[i]` takes `point[i]`.
fn eval_term(t: &LinearTerm, names: &[&str], point: &[i64]) -> i64 {
    t.iter()
        .map(|(cst, coeff)| {
            let i = names.iter().position(|n| *n == cst.name()).expect("known constant");
            int(coeff) * point[i]
        })
        .sum()
}

fn eval_lit(l: &Literal, names: &[&str], point: &[i64]) -> bool {
    match l {
        Literal::Le { term, bound } => eval_term(term, names, point) <= int(bound),
        Literal::Div { divisor, term, remainder } => (eval_term(term, names, point) - int(remainder)).rem_euclid(int(divisor)) == 0,
    }
}

fn eval_cube(c: &Cube, names: &[&str], point: &[i64]) -> bool {
    c.iter().all(|l| eval_lit(l, names, point))
}

/// Every point of `[lo, hi]^dims`.
fn grid(dims: usize, lo: i64, hi: i64) -> impl Iterator<Item = Vec<i64>> {
    let span = (hi - lo + 1) as usize;
    (0..span.pow(dims as u32)).map(move |mut i| {
        (0..dims)
            .map(|_| {
                let v = lo + (i % span) as i64;
                i /= span;
                v
            })
            .collect()
    })
}

fn le_lit(t: LinearTerm) -> Option<Literal> {
    match Literal::le(t) {
        Formula::Lit(l) => Some(l),
        _ => None,
    }
}

/// Primitive, pairwise distinct, nonzero rows.
fn clean_rows(rows: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let gcd = |a: i64, b: i64| -> i64 {
        let (mut a, mut b) = (a.abs(), b.abs());
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    let mut out: Vec<(i64, i64)> = Vec::new();
    for &(a, b) in rows {
        if a == 0 && b == 0 {
            continue;
        }
        let g = gcd(a, b);
        let r = (a / g, b / g);
        if !out.contains(&r) {
            out.push(r);
        }
    }
    out
}

/// Subsume output is implied by every input cube, and the closure
/// constraints hold for every input bound vector.
pub fn subsume_sound(cases: u32) -> Result<(), String> {
    const NAMES: [&str; 2] = ["x", "y"];
    let client = RefCell::new(crate::common::client());
    let strategy = (
        proptest::collection::vec((-2i64..=2, -2i64..=2), 1..=3),
        proptest::collection::vec(proptest::collection::vec(-6i64..=6, 3), 2..=4),
    );
    run(cases, strategy, |(rows, bounds)| {
        let rows = clean_rows(&rows);
        if rows.is_empty() {
            return Ok(());
        }
        let cubes: Vec<Cube> = bounds
            .iter()
            .map(|b| {
                Cube::new(rows.iter().zip(b).filter_map(|(&(p, q), &n)| {
                    le_lit(LinearTerm::from_parts([(c("x"), p.into()), (c("y"), q.into())], BigInt::zero()) - k(n))
                }))
            })
            .collect();
        // Subsume only ever sees satisfiable cubes.
        for s in &cubes {
            if client.borrow_mut().is_sat(&[s.to_formula()]).map_err(|e| TestCaseError::fail(e.to_string()))?.is_none() {
                return Ok(());
            }
        }
        let input = SubsumeInput::from_cubes(&cubes).map_err(|e| TestCaseError::fail(format!("input rejected: {e}")))?;

        let cl = closure(&input);
        for b in &input.bounds {
            let m: Model = cl.v.iter().cloned().zip(b.iter().map(int)).collect();
            prop_assert!(m.eval(&cl.equalities), "{:?} violates {}", b, cl.equalities);
            prop_assert!(m.eval(&cl.divisibility), "{:?} violates {}", b, cl.divisibility);
        }

        let phi = match subsume_cube(&input, &mut *client.borrow_mut()) {
            Ok(Some(phi)) => phi,
            Ok(None) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(format!("subsume failed: {e}"))),
        };
        prop_assert!(!phi.is_empty());
        for p in grid(2, -10, 10) {
            if cubes.iter().any(|s| eval_cube(s, &NAMES, &p)) {
                prop_assert!(eval_cube(&phi, &NAMES, &p), "{:?} is in an input cube but not in {}", p, phi);
            }
        }
        Ok(())
    })
}

/// Concretize satisfies its four defining conditions.
pub fn concretize_conditions(cases: u32) -> Result<(), String> {
    const NAMES: [&str; 3] = ["x", "y", "z"];
    let client = RefCell::new(crate::common::client());
    let strategy = (
        proptest::collection::vec((proptest::array::uniform3(-3i64..=3), 0i64..=3), 1..=3),
        proptest::array::uniform3(-4i64..=4),
        1u8..8,
    );
    run(cases, strategy, |(raw, point, mask)| {
        // Bounds are offset from the value at `point`, so it is a model.
        let lits: Vec<Literal> = raw
            .iter()
            .filter(|(co, _)| co.iter().any(|&a| a != 0))
            .filter_map(|(co, slack)| {
                let t = LinearTerm::from_parts(NAMES.iter().zip(co).map(|(n, &a)| (c(n), a.into())), BigInt::zero());
                let val: i64 = co.iter().zip(&point).map(|(a, b)| a * b).sum();
                le_lit(t - k(val + slack))
            })
            .collect();
        if lits.is_empty() {
            return Ok(());
        }
        let phi = Cube::new(lits);
        let u: BTreeSet<Constant> = NAMES.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, n)| c(n)).collect();
        let m: Model = NAMES.iter().zip(point).map(|(n, v)| (c(n), v)).collect();
        let mut cl = client.borrow_mut();
        let gamma = concretize(&phi, &u, &m, &mut *cl).map_err(|e| TestCaseError::fail(format!("concretize failed: {e}")))?;

        prop_assert!(cl.entails(&gamma.to_formula(), &phi.to_formula()).map_err(|e| TestCaseError::fail(e.to_string()))?);
        for p in grid(3, -5, 5) {
            if eval_cube(&gamma, &NAMES, &p) {
                prop_assert!(eval_cube(&phi, &NAMES, &p), "{:?} is in {} but not in {}", p, gamma, phi);
            }
        }
        prop_assert!(eval_cube(&gamma, &NAMES, &point), "model {:?} falsifies {}", point, gamma);
        for l in gamma.iter() {
            if l.constants().any(|x| u.contains(x)) {
                prop_assert_eq!(l.constants().count(), 1, "{} is not isolated in {}", l, gamma);
            }
        }
        for l in phi.iter() {
            let outside: Vec<&Constant> = l.constants().filter(|x| !u.contains(*x)).collect();
            for (i, a) in outside.iter().enumerate() {
                for b in &outside[i + 1..] {
                    prop_assert!(gamma.iter().any(|g| g.mentions(a) && g.mentions(b)), "{} and {} decoupled in {}", a, b, gamma);
                }
            }
        }
        Ok(())
    })
}

#[derive(Clone, Debug)]
struct RawLit {
    coeffs: [i64; 4],
    div: Option<i64>,
    slack: i64,
}

fn raw_lit() -> impl Strategy<Value = RawLit> {
    (proptest::array::uniform4(-3i64..=3), prop_oneof![4 => Just(None), 1 => (2i64..=4).prop_map(Some)], 0i64..=2)
        .prop_map(|(coeffs, div, slack)| RawLit { coeffs, div, slack })
}

/// MBP keeps the model and under-approximates the projection.
pub fn mbp_projection(cases: u32) -> Result<(), String> {
    const NAMES: [&str; 4] = ["e0", "e1", "e2", "k0"];
    let strategy = (proptest::collection::vec(raw_lit(), 1..5), proptest::array::uniform4(-3i64..=3), 1usize..=3);
    run(cases, strategy, |(raws, point, n_elim)| {
        let dot = |co: &[i64; 4], p: &[i64]| -> i64 { co.iter().zip(p).map(|(a, b)| a * b).sum() };
        // Bounds chosen so that `point` satisfies every literal.
        let mut lits = Vec::new();
        for r in &raws {
            let t = LinearTerm::from_parts(NAMES.iter().zip(r.coeffs).map(|(n, a)| (c(n), a.into())), BigInt::zero());
            let val = dot(&r.coeffs, &point);
            let f = match r.div {
                None => Literal::le(t - k(val + r.slack)),
                Some(d) => Literal::div(&BigInt::from(d), t - k(val)),
            };
            if let Formula::Lit(l) = f {
                lits.push(l);
            }
        }
        let holds = |p: &[i64]| {
            raws.iter().all(|r| {
                let (t, val) = (dot(&r.coeffs, p), dot(&r.coeffs, &point));
                match r.div {
                    None => t <= val + r.slack,
                    Some(d) => (t - val).rem_euclid(d) == 0,
                }
            })
        };
        // Boxing the eliminated constants makes the enumeration below exact.
        for n in &NAMES[..n_elim] {
            for op in [Cmp::Le, Cmp::Ge] {
                let bound = if op == Cmp::Le { 8 } else { -8 };
                if let Ok(Formula::Lit(l)) = normalize_literal(&LinearTerm::var(c(n)), op, &k(bound)) {
                    lits.push(l);
                }
            }
        }
        let body = Cube::new(lits);
        let eliminate: BTreeSet<Constant> = NAMES[..n_elim].iter().map(|n| c(n)).collect();
        let m: Model = NAMES.iter().zip(point).map(|(n, x)| (c(n), x)).collect();
        let out = project(&eliminate, &body, &m).map_err(|e| TestCaseError::fail(e.to_string()))?;

        prop_assert!(out.iter().all(|l| m.eval_literal(l)), "{} loses the model", out);
        prop_assert!(out.iter().all(|l| !l.constants().any(|x| eliminate.contains(x))));
        // Every kept point with small remaining values extends to a model of
        // the body with eliminated values in [-8, 8].
        for rest in grid(4 - n_elim, -3, 3) {
            let mut p = [0i64; 4];
            p[n_elim..].copy_from_slice(&rest);
            if !eval_cube(&out, &NAMES, &p) {
                continue;
            }
            let found = grid(n_elim, -8, 8).any(|e| {
                p[..n_elim].copy_from_slice(&e);
                holds(&p)
            });
            prop_assert!(found, "no witness for {:?} under {}", rest, out);
        }
        Ok(())
    })
}

/// Rank by the largest nonvanishing minor, with exact i128 determinants.
fn brute_rank(m: &[Vec<i64>], cols: usize) -> usize {
    fn det(a: &[Vec<i128>]) -> i128 {
        if a.is_empty() {
            return 1;
        }
        (0..a.len())
            .map(|j| {
                let minor: Vec<Vec<i128>> =
                    a[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| *v).collect()).collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * a[0][j] * det(&minor)
            })
            .sum()
    }
    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        (0u32..1 << n).filter(|m| m.count_ones() as usize == k).map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect()).collect()
    }
    for k in (1..=m.len().min(cols)).rev() {
        for rs in subsets(m.len(), k) {
            for cs in subsets(cols, k) {
                let sub: Vec<Vec<i128>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c] as i128).collect()).collect();
                if det(&sub) != 0 {
                    return k;
                }
            }
        }
    }
    0
}

fn rationals(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
}

/// Kernel vectors annihilate the matrix and number `cols − rank`.
pub fn kernel_dimension(cases: u32) -> Result<(), String> {
    let strategy = (1usize..=6, 1usize..=6)
        .prop_flat_map(|(r, c)| (Just(c), proptest::collection::vec(proptest::collection::vec(-9i64..=9, c), r)));
    run(cases, strategy, |(cols, rows)| {
        let m = RationalMatrix::from_rows(cols, rows.iter().map(|r| rationals(r)).collect());
        let b = kernel_basis(&m);
        for v in &b {
            prop_assert!(m.mul_vec(v).iter().all(Zero::is_zero));
        }
        prop_assert_eq!(b.len() + brute_rank(&rows, cols), cols);
        if !b.is_empty() {
            prop_assert_eq!(RationalMatrix::from_rows(cols, b.clone()).rank(), b.len());
        }
        Ok(())
    })
}

/// `divisibility_of_column` finds the largest common modulus.
pub fn column_divisibility(cases: u32) -> Result<(), String> {
    run(cases, proptest::collection::vec(-30i64..=30, 2..6), |vals| {
        let got = divisibility_of_column(&vals.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>());
        let (lo, hi) = (*vals.iter().min().unwrap_or(&0), *vals.iter().max().unwrap_or(&0));
        let best = (2..=(hi - lo)).rev().find(|d| vals.iter().all(|v| (v - vals[0]).rem_euclid(*d) == 0));
        match best {
            Some(d) => prop_assert_eq!(got, Some((BigInt::from(d), BigInt::from(vals[0].rem_euclid(d))))),
            None => prop_assert_eq!(got, None),
        }
        Ok(())
    })
}
