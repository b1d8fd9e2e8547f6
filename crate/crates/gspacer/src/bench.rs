//! Runs every corpus problem under several rule configurations and
//! tabulates verdicts, depths and rule counts.

use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use gspacer_core::engine::{Config, Engine, SolveResult};
use gspacer_core::system::check_invariant;

use crate::problem::{parse_problem, Problem, Status};
use crate::smt::{SmtClient, SolverOptions};
use crate::Deadline;

pub const CSV_HEADER: [&str; 9] = ["problem", "config", "verdict", "depth", "time_ms", "n_subsume", "n_concretize", "n_conjecture", "n_smt"];

pub const CONFIG_NAMES: [&str; 8] =
    ["all-on", "all-off", "no-subsume", "no-concretize", "no-conjecture", "only-subsume", "only-concretize", "only-conjecture"];

/// Rule toggles for a named configuration, on top of `base`.
pub fn named_config(name: &str, base: &Config) -> Option<Config> {
    let (s, c, j) = match name {
        "all-on" => (true, true, true),
        "all-off" => (false, false, false),
        "no-subsume" => (false, true, true),
        "no-concretize" => (true, false, true),
        "no-conjecture" => (true, true, false),
        "only-subsume" => (true, false, false),
        "only-concretize" => (false, true, false),
        "only-conjecture" => (false, false, true),
        _ => return None,
    };
    Some(Config { subsume: s, concretize: c, conjecture: j, ..base.clone() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Safe,
    Unsafe,
    Unknown,
    /// Parse failure, solver failure or an invariant that did not verify.
    Error,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Safe => "safe",
            Verdict::Unsafe => "unsafe",
            Verdict::Unknown => "unknown",
            Verdict::Error => "error",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunRecord {
    pub problem: String,
    pub config: String,
    pub verdict: Verdict,
    /// Trace length when the run stopped.
    pub depth: usize,
    pub time_ms: u128,
    pub n_subsume: u64,
    pub n_concretize: u64,
    pub n_conjecture: u64,
    pub n_smt: u64,
    pub expected: Option<Status>,
    pub note: String,
}

impl RunRecord {
    fn failed(problem: &str, config: &str, expected: Option<Status>, note: String) -> Self {
        RunRecord {
            problem: problem.into(),
            config: config.into(),
            verdict: Verdict::Error,
            depth: 0,
            time_ms: 0,
            n_subsume: 0,
            n_concretize: 0,
            n_conjecture: 0,
            n_smt: 0,
            expected,
            note,
        }
    }

    pub fn csv_row(&self) -> [String; 9] {
        [
            self.problem.clone(),
            self.config.clone(),
            self.verdict.to_string(),
            self.depth.to_string(),
            self.time_ms.to_string(),
            self.n_subsume.to_string(),
            self.n_concretize.to_string(),
            self.n_conjecture.to_string(),
            self.n_smt.to_string(),
        ]
    }
}

/// One corpus entry; parse failures are kept so they show up in the table.
pub struct Entry {
    pub name: String,
    pub problem: Result<Problem, String>,
}

/// Every `*.smt` file of `dir`, sorted by name.
pub fn load_corpus(dir: &Path) -> io::Result<Vec<Entry>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "smt"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let text = std::fs::read_to_string(&p)?;
            Ok(Entry { name, problem: parse_problem(&text).map_err(|e| e.to_string()) })
        })
        .collect()
}

pub fn run_one(name: &str, problem: &Problem, config_name: &str, cfg: &Config, solver: &SolverOptions, timeout: Option<Duration>) -> RunRecord {
    let start = Instant::now();
    let deadline = Deadline::after(timeout);
    let mut client = match SmtClient::new(solver.clone()) {
        Ok(c) => c,
        Err(e) => return RunRecord::failed(name, config_name, problem.expected, format!("cannot start solver: {e}")),
    };
    client.set_deadline(deadline.0);
    let mut engine = Engine::new(&problem.system, cfg.clone(), &mut client);
    let result = engine.run(&deadline);
    let stats = engine.stats().clone();
    drop(engine);
    let (verdict, note) = match result {
        SolveResult::Safe { invariant, .. } => {
            client.set_deadline(None);
            match check_invariant(&invariant, &problem.system, &mut client) {
                Ok(true) => (Verdict::Safe, String::new()),
                Ok(false) => (Verdict::Error, "invariant failed to verify".into()),
                Err(u) => (Verdict::Error, u.to_string()),
            }
        }
        SolveResult::Unsafe { .. } => (Verdict::Unsafe, String::new()),
        SolveResult::Unknown(why) => (Verdict::Unknown, why),
    };
    RunRecord {
        problem: name.into(),
        config: config_name.into(),
        verdict,
        depth: stats.frames,
        time_ms: start.elapsed().as_millis(),
        n_subsume: stats.subsume,
        n_concretize: stats.concretize,
        n_conjecture: stats.conjecture,
        n_smt: stats.smt_queries,
        expected: problem.expected,
        note,
    }
}

/// The cross product of `corpus` and `configs`, run on `jobs` threads.
/// Records come back in corpus-major order.
pub fn run_suite(corpus: &[Entry], configs: &[(String, Config)], solver: &SolverOptions, timeout: Option<Duration>, jobs: usize) -> Vec<RunRecord> {
    let tasks: Vec<(usize, usize)> = (0..corpus.len()).flat_map(|p| (0..configs.len()).map(move |c| (p, c))).collect();
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<RunRecord>>> = Mutex::new(vec![None; tasks.len()]);
    std::thread::scope(|s| {
        for _ in 0..jobs.max(1) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(&(p, c)) = tasks.get(i) else { break };
                let entry = &corpus[p];
                let (cname, cfg) = &configs[c];
                let rec = match &entry.problem {
                    Ok(prob) => run_one(&entry.name, prob, cname, cfg, solver, timeout),
                    Err(e) => RunRecord::failed(&entry.name, cname, None, e.clone()),
                };
                log::info!("{} / {}: {} at depth {} in {} ms", rec.problem, rec.config, rec.verdict, rec.depth, rec.time_ms);
                if let Ok(mut r) = results.lock() {
                    r[i] = Some(rec);
                }
            });
        }
    });
    results.into_inner().unwrap_or_default().into_iter().flatten().collect()
}

pub fn write_csv<W: io::Write>(records: &[RunRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.csv_row())?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Summary {
    /// Per configuration: (solved, total).
    pub solved: BTreeMap<String, (usize, usize)>,
    /// Verdicts that disagree with the file's expected status.
    pub mismatches: Vec<String>,
    /// Problems where two configurations returned opposite verdicts.
    pub contradictions: Vec<String>,
    /// Problems solved by both `all-on` and `all-off` where `all-on` needed
    /// more frames.
    pub depth_violations: Vec<String>,
    /// Problems solved by both `all-on` and `all-off`.
    pub depth_compared: usize,
}

impl Summary {
    pub fn sound(&self) -> bool {
        self.mismatches.is_empty() && self.contradictions.is_empty()
    }
}

pub fn summarize(records: &[RunRecord]) -> Summary {
    let mut s = Summary::default();
    let mut by_problem: BTreeMap<&str, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        let e = s.solved.entry(r.config.clone()).or_default();
        e.1 += 1;
        if matches!(r.verdict, Verdict::Safe | Verdict::Unsafe) {
            e.0 += 1;
        }
        let want = match r.expected {
            Some(Status::Safe) => Some(Verdict::Safe),
            Some(Status::Unsafe) => Some(Verdict::Unsafe),
            None => None,
        };
        if let Some(w) = want {
            if matches!(r.verdict, Verdict::Safe | Verdict::Unsafe) && r.verdict != w {
                s.mismatches.push(format!("{} under {}: {} but expected {}", r.problem, r.config, r.verdict, w));
            }
        }
        by_problem.entry(&r.problem).or_default().push(r);
    }
    for (p, rs) in by_problem {
        let safe = rs.iter().any(|r| r.verdict == Verdict::Safe);
        let unsafe_ = rs.iter().any(|r| r.verdict == Verdict::Unsafe);
        if safe && unsafe_ {
            s.contradictions.push(p.to_string());
        }
        let solved = |name: &str| rs.iter().find(|r| r.config == name && matches!(r.verdict, Verdict::Safe | Verdict::Unsafe));
        if let (Some(on), Some(off)) = (solved("all-on"), solved("all-off")) {
            s.depth_compared += 1;
            if on.depth > off.depth {
                s.depth_violations.push(format!("{p}: all-on depth {} > all-off depth {}", on.depth, off.depth));
            }
        }
    }
    s
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, (solved, total)) in &self.solved {
            writeln!(f, "{c}: solved {solved}/{total}")?;
        }
        for m in &self.mismatches {
            writeln!(f, "MISMATCH {m}")?;
        }
        for c in &self.contradictions {
            writeln!(f, "CONTRADICTION {c}")?;
        }
        if self.depth_violations.is_empty() {
            writeln!(f, "depth monotonicity: ok ({} problems compared)", self.depth_compared)
        } else {
            for v in &self.depth_violations {
                writeln!(f, "DEPTH {v}")?;
            }
            Ok(())
        }
    }
}
