//! Helpers shared by the integration test targets. Each target uses a
//! different subset.
#![allow(dead_code)]

pub mod props;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use gspacer::problem::{parse_formula, parse_problem, Problem};
use gspacer::smt::{find_solver, SmtClient, SolverOptions};
use gspacer::Deadline;
use gspacer_core::engine::{Config, Engine, SolveResult, Stats};
use gspacer_core::formula::{Constant, Cube, Formula};
use gspacer_core::oracle::SmtOracle;

pub fn solver() -> SolverOptions {
    SolverOptions::new(find_solver().expect("the tests need z3 or cvc5 on PATH"))
}

pub fn client() -> SmtClient {
    SmtClient::new(solver()).expect("solver starts")
}

pub fn ints(names: &[&str]) -> Vec<Constant> {
    names.iter().map(|n| Constant::int(n)).collect()
}

/// A formula in problem syntax over `vars`.
pub fn formula(text: &str, vars: &[Constant]) -> Formula {
    parse_formula(text, vars).unwrap_or_else(|e| panic!("{text}: {e}"))
}

pub fn cube(text: &str, vars: &[Constant]) -> Cube {
    Cube::from_formula(&formula(text, vars)).unwrap_or_else(|| panic!("{text} is not a cube"))
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn load(name: &str) -> Problem {
    let path = corpus_dir().join(format!("{name}.smt"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_problem(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn problem(text: &str) -> Problem {
    parse_problem(text).unwrap_or_else(|e| panic!("{e}"))
}

pub struct Run {
    pub result: SolveResult,
    pub stats: Stats,
    pub elapsed: Duration,
    /// The solver used for the run, free for follow-up checks.
    pub client: SmtClient,
}

pub fn solve(p: &Problem, cfg: Config, timeout: Duration) -> Run {
    let start = Instant::now();
    let deadline = Deadline::after(Some(timeout));
    let mut client = client();
    client.set_deadline(deadline.0);
    let mut engine = Engine::new(&p.system, cfg, &mut client);
    let result = engine.run(&deadline);
    let stats = engine.stats().clone();
    drop(engine);
    client.set_deadline(None);
    Run { result, stats, elapsed: start.elapsed(), client }
}

pub fn entails(o: &mut impl SmtOracle, a: &Formula, b: &Formula) -> bool {
    o.entails(a, b).expect("solver answers")
}

pub fn equivalent(o: &mut impl SmtOracle, a: &Formula, b: &Formula) -> bool {
    entails(o, a, b) && entails(o, b, a)
}

/// Solves every corpus problem with the per-step trace checks on, guided
/// and unguided, and returns the number of checks performed.
pub fn corpus_under_debug_checks() -> Result<u64, String> {
    use gspacer::bench::load_corpus;
    use gspacer::problem::Status;

    let corpus = load_corpus(&corpus_dir()).map_err(|e| e.to_string())?;
    let mut checks = 0;
    for entry in &corpus {
        let p = entry.problem.as_ref().map_err(|e| format!("{}: {e}", entry.name))?;
        for cfg in [Config::default(), Config { max_frames: 6, ..Config::baseline() }] {
            let guided = cfg.subsume;
            let run = solve(p, Config { debug_invariants: true, ..cfg }, Duration::from_secs(120));
            checks += run.stats.debug_checks;
            let ok = match (&run.result, p.expected) {
                (SolveResult::Unknown(why), _) if why.starts_with("invariant violated") => false,
                (SolveResult::Safe { .. }, Some(Status::Safe)) | (SolveResult::Unsafe { .. }, Some(Status::Unsafe)) => true,
                (SolveResult::Unknown(_), _) => !guided,
                _ => false,
            };
            if !ok {
                return Err(format!("{} ({}): {:?}", entry.name, if guided { "all-on" } else { "all-off" }, run.result));
            }
        }
    }
    Ok(checks)
}
