//! `gspacer-bench --corpus DIR --configs all-on,all-off --timeout SECS --out results.csv`

use std::fs::File;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;
use gspacer::bench::{load_corpus, named_config, run_suite, summarize, write_csv, CONFIG_NAMES};
use gspacer::smt::{find_solver, SolverOptions};
use gspacer_core::engine::Config;

#[derive(Parser, Debug)]
#[command(name = "gspacer-bench", version, about = "Run a corpus under several rule configurations")]
struct Args {
    #[arg(long)]
    corpus: PathBuf,
    /// Comma-separated configuration names.
    #[arg(long, value_delimiter = ',', default_value = "all-on,all-off")]
    configs: Vec<String>,
    /// Per-run wall-clock limit in seconds.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
    #[arg(long)]
    out: PathBuf,
    /// Runs in parallel.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    solver: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    gas: u32,
    #[arg(long, default_value_t = 200)]
    max_frames: usize,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    let base = Config { gas: args.gas, max_frames: args.max_frames, ..Config::default() };
    let mut configs = Vec::new();
    for name in &args.configs {
        match named_config(name, &base) {
            Some(c) => configs.push((name.clone(), c)),
            None => {
                eprintln!("error: unknown config {name}; known: {}", CONFIG_NAMES.join(", "));
                return ExitCode::from(3);
            }
        }
    }
    if !(args.timeout.is_finite() && args.timeout > 0.0) {
        eprintln!("error: --timeout must be positive");
        return ExitCode::from(3);
    }
    let Some(solver) = args.solver.clone().or_else(find_solver) else {
        eprintln!("error: no SMT solver found; pass --solver");
        return ExitCode::from(3);
    };
    let corpus = match load_corpus(&args.corpus) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: cannot read corpus {}: {e}", args.corpus.display());
            return ExitCode::from(3);
        }
    };
    let records = run_suite(&corpus, &configs, &SolverOptions::new(solver), Some(Duration::from_secs_f64(args.timeout)), args.jobs);
    let written = File::create(&args.out).map_err(csv::Error::from).and_then(|f| write_csv(&records, f));
    if let Err(e) = written {
        eprintln!("error: cannot write {}: {e}", args.out.display());
        return ExitCode::from(3);
    }
    let summary = summarize(&records);
    print!("{summary}");
    if summary.sound() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
