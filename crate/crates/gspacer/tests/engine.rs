mod common;

use std::time::Duration;

use common::{client, formula, load, problem, solve};
use gspacer_core::engine::{Config, SolveResult};
use gspacer_core::system::{check_invariant, invariant_failure, InvariantFailure};

const LIMIT: Duration = Duration::from_secs(60);

#[test]
fn bad_initial_state_is_unsafe_at_depth_zero() {
    let p = problem(
        "(declare-var x Int)
         (init (= x 0))
         (trans (= x' (+ x 1)))
         (bad (<= x 0))",
    );
    let run = solve(&p, Config::default(), LIMIT);
    assert_eq!(run.result, SolveResult::Unsafe { depth: 0 });
}

#[test]
fn unreachable_bad_with_trivial_invariant() {
    let p = problem(
        "(declare-var x Int)
         (init (= x 0))
         (trans (= x' x))
         (bad (>= x 1))",
    );
    let mut run = solve(&p, Config::baseline(), LIMIT);
    let SolveResult::Safe { invariant, .. } = &run.result else { panic!("{:?}", run.result) };
    assert!(check_invariant(invariant, &p.system, &mut run.client).unwrap());
}

#[test]
fn counter_overflow_found_at_exact_depth() {
    let p = problem(
        "(declare-var x Int)
         (init (= x 0))
         (trans (= x' (+ x 1)))
         (bad (>= x 5))",
    );
    for cfg in [Config::default(), Config::baseline()] {
        assert_eq!(solve(&p, cfg, LIMIT).result, SolveResult::Unsafe { depth: 5 });
    }
}

#[test]
fn every_corpus_problem_gets_its_expected_verdict() {
    for name in ["counter_pairs", "triangular_sum", "lockstep_triple", "unsafe_toy"] {
        let p = load(name);
        let mut run = solve(&p, Config::default(), LIMIT);
        let want = p.expected.expect("corpus problems record their status");
        match &run.result {
            SolveResult::Safe { invariant, .. } => {
                assert_eq!(want, gspacer::problem::Status::Safe, "{name}");
                assert!(check_invariant(invariant, &p.system, &mut run.client).unwrap(), "{name}");
            }
            SolveResult::Unsafe { .. } => assert_eq!(want, gspacer::problem::Status::Unsafe, "{name}"),
            other => panic!("{name}: {other:?}"),
        }
    }
}

#[test]
fn lockstep_invariant_relates_b_and_c() {
    let p = load("lockstep_triple");
    let mut run = solve(&p, Config::default(), LIMIT);
    let SolveResult::Safe { invariant, .. } = &run.result else { panic!("{:?}", run.result) };
    let b_le_c = formula("(<= b c)", p.system.vars());
    assert!(common::entails(&mut run.client, invariant, &b_le_c), "{invariant}");
}

#[test]
fn frame_cap_gives_unknown() {
    let run = solve(&load("counter_pairs"), Config { max_frames: 5, ..Config::baseline() }, LIMIT);
    let SolveResult::Unknown(why) = &run.result else { panic!("{:?}", run.result) };
    assert!(why.starts_with("frame limit"), "{why}");
}

#[test]
fn timeout_gives_unknown() {
    let run = solve(&load("lockstep_triple"), Config::baseline(), Duration::from_millis(300));
    assert!(matches!(run.result, SolveResult::Unknown(_)), "{:?}", run.result);
    assert!(run.elapsed < Duration::from_secs(10));
}

#[test]
fn debug_checks_run_and_hold() {
    let run = solve(&load("triangular_sum"), Config { debug_invariants: true, ..Config::default() }, LIMIT);
    assert!(matches!(run.result, SolveResult::Safe { .. }), "{:?}", run.result);
    assert!(run.stats.debug_checks > 0);
}

#[test]
fn invariant_checker_names_the_failing_condition() {
    let p = load("counter_pairs");
    let vars = p.system.vars();
    let mut o = client();
    let good = formula("(and (= (- a c) (- b d)) (not (and (<= a c) (>= b (+ d 1)))))", vars);
    assert_eq!(invariant_failure(&good, &p.system, &mut o).unwrap(), None);
    let tt = formula("true", vars);
    assert_eq!(invariant_failure(&tt, &p.system, &mut o).unwrap(), Some(InvariantFailure::Safety));
    let positive = formula("(>= a 1)", vars);
    assert_eq!(invariant_failure(&positive, &p.system, &mut o).unwrap(), Some(InvariantFailure::Initiation));

    let c = load("lockstep_triple");
    let not_bad = c.system.bad().negate();
    assert_eq!(invariant_failure(&not_bad, &c.system, &mut o).unwrap(), Some(InvariantFailure::Consecution));
}

#[test]
fn rules_reduce_smt_work_on_their_example() {
    let p = load("counter_pairs");
    let guided = solve(&p, Config::default(), LIMIT);
    let plain = solve(&p, Config { max_frames: 10, ..Config::baseline() }, LIMIT);
    assert!(matches!(guided.result, SolveResult::Safe { .. }));
    assert!(guided.stats.smt_queries < plain.stats.smt_queries);
}
