//! SMT-LIB2 client for an external solver process.
//!
//! Every query runs in its own `push`/`pop` scope. Replies are delimited by
//! an `echo` marker so the client never has to guess how many lines a
//! response spans.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use gspacer_core::formula::{Constant, Formula};
use gspacer_core::model::Model;
use gspacer_core::oracle::{SatResult, SmtOracle};
use log::{trace, warn};

use crate::sexp::{parse_all, Sexp};
use crate::smtlib::{self, Style};

const MARKER: &str = "@d";

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub path: PathBuf,
    pub seed: Option<u64>,
    /// Limit for a single reply.
    pub query_timeout: Option<Duration>,
}

impl SolverOptions {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        SolverOptions { path: path.into(), seed: None, query_timeout: None }
    }
}

/// The first of `z3`, `cvc5` found on `PATH`.
pub fn find_solver() -> Option<PathBuf> {
    let path = std::env::var_os("PATH")?;
    for name in ["z3", "cvc5"] {
        for dir in std::env::split_paths(&path) {
            let p = dir.join(name);
            if p.is_file() {
                return Some(p);
            }
        }
    }
    None
}

fn solver_args(path: &Path) -> &'static [&'static str] {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
    if name.contains("cvc5") {
        &["--lang=smt2", "--incremental"]
    } else {
        &["-in", "-smt2"]
    }
}

struct Process {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
}

impl Drop for Process {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Owns one solver process and restarts it after errors or timeouts.
pub struct SmtClient {
    opts: SolverOptions,
    proc: Option<Process>,
    declared: BTreeSet<Constant>,
    deadline: Option<Instant>,
    pub queries: u64,
    pub restarts: u64,
}

enum Failure {
    Timeout,
    Io(String),
}

impl Failure {
    fn describe(self) -> String {
        match self {
            Failure::Timeout => "timeout".into(),
            Failure::Io(s) => s,
        }
    }
}

impl SmtClient {
    pub fn new(opts: SolverOptions) -> io::Result<Self> {
        let mut c = SmtClient { opts, proc: None, declared: BTreeSet::new(), deadline: None, queries: 0, restarts: 0 };
        c.start()?;
        Ok(c)
    }

    /// Replies arriving after `deadline` count as timeouts.
    pub fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.deadline = deadline;
    }

    fn start(&mut self) -> io::Result<()> {
        let mut child = Command::new(&self.opts.path)
            .args(solver_args(&self.opts.path))
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()?;
        let stdin = child.stdin.take().ok_or_else(|| io::Error::other("no stdin"))?;
        let stdout = child.stdout.take().ok_or_else(|| io::Error::other("no stdout"))?;
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        self.proc = Some(Process { child, stdin, lines: rx });
        self.declared.clear();
        let mut init = String::from("(set-option :print-success false)\n(set-option :produce-models true)\n(set-option :produce-unsat-cores true)\n");
        if let Some(seed) = self.opts.seed {
            let _ = writeln!(init, "(set-option :random-seed {seed})");
        }
        init.push_str("(set-logic ALL)\n");
        let reply = self.exchange(&init).map_err(|f| io::Error::other(f.describe()))?;
        if reply.contains("(error") {
            return Err(io::Error::other(format!("solver rejected setup: {reply}")));
        }
        Ok(())
    }

    fn restart(&mut self) {
        self.restarts += 1;
        self.proc = None;
        if let Err(e) = self.start() {
            warn!("solver restart failed: {e}");
        }
    }

    fn wait_limit(&self) -> Option<Duration> {
        let per_query = self.opts.query_timeout;
        let until_deadline = self.deadline.map(|d| d.saturating_duration_since(Instant::now()));
        match (per_query, until_deadline) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    /// Sends `cmds` followed by the marker echo and returns everything the
    /// solver printed before the marker.
    fn exchange(&mut self, cmds: &str) -> Result<String, Failure> {
        let limit = self.wait_limit();
        let Some(p) = self.proc.as_mut() else { return Err(Failure::Io("solver is not running".into())) };
        trace!("smt> {cmds}");
        let sent = p.stdin.write_all(cmds.as_bytes()).and_then(|_| writeln!(p.stdin, "(echo \"{MARKER}\")")).and_then(|_| p.stdin.flush());
        if let Err(e) = sent {
            return Err(Failure::Io(format!("write to solver failed: {e}")));
        }
        let start = Instant::now();
        let mut out = String::new();
        loop {
            let line = match limit {
                None => p.lines.recv().map_err(|_| Failure::Io("solver exited".into()))?,
                Some(l) => match p.lines.recv_timeout(l.saturating_sub(start.elapsed())) {
                    Ok(line) => line,
                    Err(RecvTimeoutError::Timeout) => return Err(Failure::Timeout),
                    Err(RecvTimeoutError::Disconnected) => return Err(Failure::Io("solver exited".into())),
                },
            };
            let t = line.trim();
            if t == MARKER || t == format!("\"{MARKER}\"") {
                trace!("smt< {out}");
                return Ok(out);
            }
            out.push_str(&line);
            out.push('\n');
        }
    }

    /// Drops the process; the next query starts a fresh one.
    fn fail(&mut self, why: String) -> SatResult {
        if why != "timeout" {
            warn!("solver failure: {why}");
        }
        self.proc = None;
        SatResult::Unknown(why)
    }

    fn run_query(&mut self, background: &[Formula], labeled: &[Formula]) -> Result<SatResult, String> {
        let mut consts = BTreeSet::new();
        for f in background.iter().chain(labeled) {
            f.collect_constants(&mut consts);
        }
        let mut script = String::new();
        for c in &consts {
            if !self.declared.contains(c) {
                let _ = writeln!(script, "(declare-const {} {})", smtlib::symbol(c, Style::Solver), smtlib::sort_name(c.sort()));
            }
        }
        script.push_str("(push 1)\n");
        for f in background {
            let _ = writeln!(script, "(assert {})", smtlib::formula(f, Style::Solver));
        }
        for (k, f) in labeled.iter().enumerate() {
            let _ = writeln!(script, "(assert (! {} :named L{k}))", smtlib::formula(f, Style::Solver));
        }
        script.push_str("(check-sat)\n");
        let reply = self.exchange(&script).map_err(Failure::describe)?;
        self.declared.extend(consts.iter().cloned());
        let verdict = reply.split_whitespace().last().unwrap_or("");
        if reply.contains("(error") {
            return Err(format!("solver error: {}", reply.trim()));
        }
        let result = match verdict {
            "sat" => {
                let model = self.read_model(&consts)?;
                if let Some(bad) = background.iter().chain(labeled).find(|f| !model.eval(f)) {
                    return Err(format!("model {model} violates {bad}"));
                }
                SatResult::Sat(model)
            }
            "unsat" if labeled.is_empty() => SatResult::Unsat(Vec::new()),
            "unsat" => SatResult::Unsat(self.read_core(labeled.len())?),
            "unknown" => {
                let reason = self.exchange("(get-info :reason-unknown)\n").unwrap_or_default();
                SatResult::Unknown(format!("solver returned unknown {}", reason.trim()))
            }
            other => return Err(format!("unexpected reply {other:?}")),
        };
        let popped = self.exchange("(pop 1)\n").map_err(Failure::describe)?;
        if popped.contains("(error") {
            return Err(format!("pop failed: {}", popped.trim()));
        }
        Ok(result)
    }

    fn read_model(&mut self, consts: &BTreeSet<Constant>) -> Result<Model, String> {
        let mut model = Model::new();
        if consts.is_empty() {
            return Ok(model);
        }
        let names: Vec<String> = consts.iter().map(|c| smtlib::symbol(c, Style::Solver)).collect();
        let reply = self.exchange(&format!("(get-value ({}))\n", names.join(" "))).map_err(Failure::describe)?;
        let by_name: BTreeMap<&str, &Constant> = consts.iter().map(|c| (c.name(), c)).collect();
        let parsed = parse_all(&reply).map_err(|e| format!("bad model reply: {e}"))?;
        let pairs = parsed.first().and_then(Sexp::list).ok_or_else(|| format!("bad model reply: {reply}"))?;
        for pair in pairs {
            let [name, val] = pair.list().unwrap_or(&[]) else { return Err(format!("bad model entry {pair}")) };
            let c = name.atom().and_then(|n| by_name.get(n)).ok_or_else(|| format!("unexpected model entry {pair}"))?;
            let v = smtlib::value(val).ok_or_else(|| format!("cannot read value {val}"))?;
            model.set((*c).clone(), v);
        }
        Ok(model)
    }

    fn read_core(&mut self, n: usize) -> Result<Vec<usize>, String> {
        let reply = self.exchange("(get-unsat-core)\n").map_err(Failure::describe)?;
        let parsed = parse_all(&reply).map_err(|e| format!("bad core reply: {e}"))?;
        let items = parsed.first().and_then(Sexp::list).ok_or_else(|| format!("bad core reply: {reply}"))?;
        let mut core = Vec::new();
        for it in items {
            let k = it.atom().and_then(|s| s.strip_prefix('L')).and_then(|s| s.parse::<usize>().ok());
            match k {
                Some(k) if k < n => core.push(k),
                _ => return Err(format!("unexpected core entry {it}")),
            }
        }
        core.sort_unstable();
        core.dedup();
        Ok(core)
    }
}

impl SmtOracle for SmtClient {
    fn check(&mut self, background: &[Formula], labeled: &[Formula]) -> SatResult {
        self.queries += 1;
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            return SatResult::Unknown("timeout".into());
        }
        if self.proc.is_none() {
            self.restart();
        }
        match self.run_query(background, labeled) {
            Ok(r) => r,
            Err(why) => self.fail(why),
        }
    }
}
