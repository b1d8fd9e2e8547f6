//! `gspacer PROBLEM`: prints SAFE with an inductive invariant, UNSAFE with
//! the depth, or UNKNOWN. Exit codes: 0 safe, 1 unsafe, 2 unknown, 3 usage.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;
use gspacer::problem::{parse_problem, render_formula};
use gspacer::smt::{find_solver, SmtClient, SolverOptions};
use gspacer::Deadline;
use gspacer_core::engine::{Config, Engine, SolveResult};
use gspacer_core::system::invariant_failure;

#[derive(Parser, Debug)]
#[command(name = "gspacer", version, about = "Safety checker for transition systems over linear integer arithmetic")]
struct Args {
    /// Problem file.
    problem: PathBuf,
    /// SMT solver executable (default: z3 or cvc5 from PATH).
    #[arg(long)]
    solver: Option<PathBuf>,
    /// Concretize/Conjecture applications per pattern.
    #[arg(long, default_value_t = 100)]
    gas: u32,
    #[arg(long, default_value_t = 200)]
    max_frames: usize,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long)]
    disable_subsume: bool,
    #[arg(long)]
    disable_concretize: bool,
    #[arg(long)]
    disable_conjecture: bool,
    /// Print statistics after the verdict.
    #[arg(long)]
    stats: bool,
    /// Print the lemma clusters after the verdict.
    #[arg(long)]
    dump_clusters: bool,
    /// Check the trace invariants after every step.
    #[arg(long)]
    debug_invariants: bool,
    /// Random seed passed to the solver.
    #[arg(long)]
    seed: Option<u64>,
}

const EXIT_UNKNOWN: u8 = 2;
const EXIT_USAGE: u8 = 3;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let text = match std::fs::read_to_string(&args.problem) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.problem.display());
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let problem = match parse_problem(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {}:{e}", args.problem.display());
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let Some(solver) = args.solver.clone().or_else(find_solver) else {
        eprintln!("error: no SMT solver found; pass --solver");
        return ExitCode::from(EXIT_USAGE);
    };
    let timeout = match args.timeout {
        Some(t) if !(t.is_finite() && t > 0.0) => {
            eprintln!("error: --timeout must be a positive number of seconds");
            return ExitCode::from(EXIT_USAGE);
        }
        t => t.map(Duration::from_secs_f64),
    };
    let mut opts = SolverOptions::new(solver);
    opts.seed = args.seed;
    let mut client = match SmtClient::new(opts) {
        Ok(c) => c,
        Err(e) => {
            println!("UNKNOWN");
            eprintln!("error: cannot start solver: {e}");
            return ExitCode::from(EXIT_UNKNOWN);
        }
    };
    let cfg = Config {
        subsume: !args.disable_subsume,
        concretize: !args.disable_concretize,
        conjecture: !args.disable_conjecture,
        gas: args.gas,
        max_frames: args.max_frames,
        debug_invariants: args.debug_invariants,
        ..Config::default()
    };
    let deadline = Deadline::after(timeout);
    client.set_deadline(deadline.0);
    let mut engine = Engine::new(&problem.system, cfg, &mut client);
    let result = engine.run(&deadline);
    let stats = engine.stats().clone();
    let clusters = args.dump_clusters.then(|| engine.clusters().dump());
    drop(engine);

    let code = match result {
        SolveResult::Safe { invariant, level } => {
            client.set_deadline(None);
            match invariant_failure(&invariant, &problem.system, &mut client) {
                Ok(None) => {
                    println!("SAFE");
                    println!("{}", render_formula(&invariant));
                    eprintln!("invariant is frame {level}");
                    0
                }
                Ok(Some(f)) => {
                    println!("UNKNOWN");
                    eprintln!("error: computed invariant {f}");
                    EXIT_UNKNOWN
                }
                Err(u) => {
                    println!("UNKNOWN");
                    eprintln!("error: could not verify invariant: {u}");
                    EXIT_UNKNOWN
                }
            }
        }
        SolveResult::Unsafe { depth } => {
            println!("UNSAFE");
            println!("depth {depth}");
            1
        }
        SolveResult::Unknown(why) => {
            println!("UNKNOWN");
            eprintln!("reason: {why}");
            EXIT_UNKNOWN
        }
    };
    if args.stats {
        println!(
            "stats: {} frames, {} lemmas, {} pobs, {} SMT queries; subsume {}, concretize {}, conjecture {}",
            stats.frames, stats.lemmas, stats.pobs, stats.smt_queries, stats.subsume, stats.concretize, stats.conjecture
        );
        for (k, v) in [
            ("frames", stats.frames as u64),
            ("depth", stats.frames as u64),
            ("lemmas", stats.lemmas as u64),
            ("pobs", stats.pobs),
            ("iterations", stats.iterations),
            ("propagated", stats.propagated),
            ("reach_cubes", stats.reach_cubes as u64),
            ("subsume", stats.subsume),
            ("concretize", stats.concretize),
            ("conjecture", stats.conjecture),
            ("smt_queries", stats.smt_queries),
            ("solver_restarts", client.restarts),
            ("debug_checks", stats.debug_checks),
        ] {
            println!("{k}={v}");
        }
    }
    if let Some(d) = clusters {
        print!("{d}");
    }
    ExitCode::from(code)
}
