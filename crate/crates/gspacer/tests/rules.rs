mod common;

use std::collections::BTreeSet;

use common::{client, cube, entails, equivalent, formula, ints};
use gspacer_core::formula::{Constant, Cube};
use gspacer_core::model::Model;
use gspacer_core::rules::{concretize, conjecture, find_shape, subsume_cube, SubsumeInput};

fn model(vars: &[Constant], vals: &[i64]) -> Model {
    vars.iter().cloned().zip(vals.iter().copied()).collect()
}

#[test]
fn concretize_pins_literals_over_u_to_the_model() {
    let v = ints(&["x", "y"]);
    let phi = cube("(and (<= x 3) (>= y 1))", &v);
    let u: BTreeSet<_> = [v[0].clone()].into();
    let mut o = client();
    let gamma = concretize(&phi, &u, &model(&v, &[0, 1]), &mut o).unwrap();
    assert!(equivalent(&mut o, &gamma.to_formula(), &formula("(and (<= x 0) (>= y 1))", &v)), "{gamma}");
}

#[test]
fn concretize_fixes_the_chosen_variable_at_the_model() {
    let v = ints(&["a", "b"]);
    let phi = cube("(and (<= (+ a b) 4) (>= a 0))", &v);
    let u: BTreeSet<_> = [v[1].clone()].into();
    let m = model(&v, &[1, 2]);
    let gamma = concretize(&phi, &u, &m, &mut client()).unwrap();
    let mut o = client();
    assert!(m.eval(&gamma.to_formula()));
    assert!(entails(&mut o, &gamma.to_formula(), &phi.to_formula()));
    // No literal of the result mixes b with a.
    assert!(gamma.iter().all(|l| !(l.mentions(&v[0]) && l.mentions(&v[1]))), "{gamma}");
}

#[test]
fn conjecture_needs_a_shared_shape() {
    let v = ints(&["x", "y"]);
    let phi = cube("(and (>= x 10) (<= y 10))", &v);
    let lemmas: Vec<Cube> = vec![cube("(>= y 101)", &v), cube("(>= x 3)", &v)];
    let reach = formula("(and (= x 0) (= y 0))", &v);
    assert_eq!(find_shape(&phi, &lemmas, &mut client()).unwrap(), None);
    assert_eq!(conjecture(&phi, &lemmas, &reach, &mut client()).unwrap(), None);
}

#[test]
fn conjecture_refuses_reachable_states() {
    let v = ints(&["x", "y"]);
    let phi = cube("(and (>= x 0) (>= (+ x y) 0) (<= y 10))", &v);
    let lemmas: Vec<Cube> = ["(and (>= (+ x y) 1) (<= y 100))", "(and (>= (+ x y) 1) (<= y 101))"].iter().map(|t| cube(t, &v)).collect();
    let reach = formula("(and (= x 0) (= y 0))", &v);
    assert_eq!(conjecture(&phi, &lemmas, &reach, &mut client()).unwrap(), None);
}

#[test]
fn subsume_over_a_line_of_points() {
    let v = ints(&["x", "y"]);
    let s: Vec<Cube> = [0, 3, 6].iter().map(|k| cube(&format!("(and (>= x {k}) (<= x {k}) (<= y {}))", k + 1), &v)).collect();
    let input = SubsumeInput::from_cubes(&s).unwrap();
    let mut o = client();
    let phi = subsume_cube(&input, &mut o).unwrap().expect("a cube");
    for c in &s {
        assert!(entails(&mut o, &c.to_formula(), &phi.to_formula()), "{c} vs {phi}");
    }
    // The step of 3 along x shows up as a divisibility constraint.
    assert!(phi.has_div(), "{phi}");
}

#[test]
fn subsume_rejects_differently_shaped_cubes() {
    let v = ints(&["x", "y"]);
    let s = vec![cube("(<= x 1)", &v), cube("(<= y 1)", &v)];
    assert!(SubsumeInput::from_cubes(&s).is_err());
}
