//! The IC3-style search: frames of lemmas, proof obligations, and the
//! global rules scheduled around blocking.

mod frames;
mod queue;

pub use frames::{Frames, Lemma};
pub use queue::{Origin, Pob, PobQueue};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use log::{debug, trace};

use crate::cluster::{Cluster, ClusterStore, LemmaId, Pattern};
use crate::formula::{Constant, Cube, Formula, LinearTerm, Literal};
use crate::BigInt;
use num_traits::One;
use crate::mbp;
use crate::model::Model;
use crate::oracle::{Budget, SatResult, SmtOracle, Unknown};
use crate::rules::{self, RuleError, SubsumeInput};
use crate::system::TransitionSystem;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub subsume: bool,
    pub concretize: bool,
    pub conjecture: bool,
    /// Applications of Concretize and Conjecture allowed per pattern.
    pub gas: u32,
    /// Give up once the trace would grow past this many frames.
    pub max_frames: usize,
    /// Smallest cluster the rules act on.
    pub min_cluster: usize,
    /// Re-check the trace invariants after every step (slow).
    pub debug_invariants: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            subsume: true,
            concretize: true,
            conjecture: true,
            gas: 100,
            max_frames: 200,
            min_cluster: 2,
            debug_invariants: false,
        }
    }
}

impl Config {
    /// Plain IC3 without global rules.
    pub fn baseline() -> Self {
        Config { subsume: false, concretize: false, conjecture: false, ..Config::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    /// `invariant` is inductive, holds initially and excludes `Bad`.
    Safe { invariant: Formula, level: usize },
    /// A bad state is reachable; `depth` is the trace length when found.
    Unsafe { depth: usize },
    Unknown(String),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub iterations: u64,
    pub smt_queries: u64,
    pub frames: usize,
    pub lemmas: usize,
    pub pobs: u64,
    pub blocked: u64,
    pub reach_cubes: usize,
    pub propagated: u64,
    pub subsume: u64,
    pub concretize: u64,
    pub conjecture: u64,
    pub debug_checks: u64,
}

struct Counting<O> {
    inner: O,
    queries: u64,
}

impl<O: SmtOracle> SmtOracle for Counting<O> {
    fn check(&mut self, background: &[Formula], labeled: &[Formula]) -> SatResult {
        self.queries += 1;
        self.inner.check(background, labeled)
    }
}

/// Escalates solver failures inside rules; other rule failures just mean
/// the rule does not apply.
fn rule_outcome<T>(r: Result<T, RuleError>) -> Result<Option<T>, Unknown> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(RuleError::Unknown(s)) => Err(Unknown(s)),
        Err(e) => {
            debug!("rule skipped: {e}");
            Ok(None)
        }
    }
}

pub struct Engine<'a, O> {
    ts: &'a TransitionSystem,
    cfg: Config,
    oracle: Counting<O>,
    frames: Frames,
    queue: PobQueue,
    reach: Vec<Formula>,
    clusters: ClusterStore,
    blocked_by: BTreeMap<Cube, Vec<LemmaId>>,
    /// Pobs (cube and level) that already produced a concretization.
    concretized: BTreeSet<(Cube, usize)>,
    /// Cluster sizes at the last Subsume attempt.
    subsumed: BTreeMap<Pattern, usize>,
    n: usize,
    stats: Stats,
    vars: BTreeSet<Constant>,
    primed_vars: BTreeSet<Constant>,
    bad: Cube,
}

/// Runs the engine to completion.
pub fn solve<O: SmtOracle>(ts: &TransitionSystem, cfg: &Config, oracle: O, budget: &impl Budget) -> (SolveResult, Stats) {
    let mut e = Engine::new(ts, cfg.clone(), oracle);
    let r = e.run(budget);
    (r, e.stats().clone())
}

impl<'a, O: SmtOracle> Engine<'a, O> {
    pub fn new(ts: &'a TransitionSystem, cfg: Config, oracle: O) -> Self {
        let gas = cfg.gas;
        Engine {
            ts,
            cfg,
            oracle: Counting { inner: oracle, queries: 0 },
            frames: Frames::default(),
            queue: PobQueue::default(),
            reach: vec![ts.init().clone()],
            clusters: ClusterStore::new(gas),
            blocked_by: BTreeMap::new(),
            concretized: BTreeSet::new(),
            subsumed: BTreeMap::new(),
            n: 0,
            stats: Stats::default(),
            vars: ts.vars().iter().cloned().collect(),
            primed_vars: ts.primed_vars(),
            bad: ts.bad().clone(),
        }
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn frames(&self) -> &Frames {
        &self.frames
    }

    pub fn clusters(&self) -> &ClusterStore {
        &self.clusters
    }

    /// Under-approximation of the reachable states, as a disjunction.
    pub fn reach(&self) -> &[Formula] {
        &self.reach
    }

    pub fn depth(&self) -> usize {
        self.n
    }

    pub fn into_oracle(self) -> O {
        self.oracle.inner
    }

    pub fn run(&mut self, budget: &impl Budget) -> SolveResult {
        let r = self.search(budget).unwrap_or_else(|u| SolveResult::Unknown(u.0));
        self.stats.smt_queries = self.oracle.queries;
        self.stats.frames = self.n;
        self.stats.lemmas = self.frames.len();
        self.stats.reach_cubes = self.reach.len();
        debug!("finished: {r:?} after {} queries", self.oracle.queries);
        r
    }

    fn search(&mut self, budget: &impl Budget) -> Result<SolveResult, Unknown> {
        self.push_pob(self.bad.clone(), 0, Origin::Bad);
        loop {
            if budget.exhausted() {
                return Err(Unknown(String::from("time budget exhausted")));
            }
            self.stats.iterations += 1;
            let Some(pob) = self.queue.pop() else {
                self.push_pob(self.bad.clone(), self.n, Origin::Bad);
                continue;
            };
            trace!("pob {} at {} ({:?})", pob.cube, pob.level, pob.origin);
            if self.cfg.concretize && self.concretize_pob(&pob)? {
                continue;
            }
            match self.blocking_query(pob.level, &pob.cube, None, true)? {
                Err(model) => {
                    if pob.level > 0 {
                        self.add_predecessor(&pob, &model)?;
                    }
                    if self.unsafe_now()? {
                        return Ok(SolveResult::Unsafe { depth: self.n });
                    }
                }
                Ok(core) => {
                    self.block(&pob, core)?;
                    self.propagate()?;
                    if let Some(j) = self.fixpoint_level() {
                        return Ok(SolveResult::Safe { invariant: self.frames.lemmas_formula(j), level: j });
                    }
                    let top = self.frames.frame(self.n, self.ts.init());
                    if self.sat(&[top, self.bad.to_formula()])?.is_none() {
                        self.n += 1;
                        if self.n > self.cfg.max_frames {
                            return Err(Unknown(format!("frame limit {} reached", self.cfg.max_frames)));
                        }
                        debug!("unfold to {} with profile {:?}", self.n, self.frames.profile(self.n));
                        self.push_pob(self.bad.clone(), self.n, Origin::Bad);
                    }
                }
            }
            if self.cfg.debug_invariants {
                self.check_trace()?;
            }
        }
    }

    fn push_pob(&mut self, cube: Cube, level: usize, origin: Origin) {
        self.stats.pobs += 1;
        self.queue.push(Pob { cube, level, origin });
    }

    fn sat(&mut self, fs: &[Formula]) -> Result<Option<Model>, Unknown> {
        self.oracle.is_sat(fs)
    }

    fn reach_formula(&self) -> Formula {
        Formula::or(self.reach.iter().cloned())
    }

    /// `F(O_j) = U′ ∨ (O_j ∧ Tr)`, optionally with `¬cube` conjoined to `O_j`.
    fn image_of_frame(&self, j: usize, strengthen: Option<&Cube>) -> Formula {
        let mut step = vec![self.frames.frame(j, self.ts.init()), self.ts.trans().clone()];
        if let Some(c) = strengthen {
            step.push(c.negate());
        }
        Formula::or([self.reach_formula().primed(), Formula::and(step)])
    }

    /// Decides whether `cube` has a predecessor in `O_{level−1}` or in the
    /// reachable states (for level 0: whether it meets them). On success
    /// returns the literals of `cube` in the unsat core.
    fn blocking_query(&mut self, level: usize, cube: &Cube, strengthen: Option<&Cube>, ordered: bool) -> Result<Result<Cube, Model>, Unknown> {
        let (bg, rename): (Formula, bool) = if level == 0 {
            (self.reach_formula(), false)
        } else {
            (self.image_of_frame(level - 1, strengthen), true)
        };
        let mut order: Vec<usize> = (0..cube.len()).collect();
        if ordered {
            order.sort_by_key(|&i| cube.literals()[i].term().num_constants());
        }
        let labeled: Vec<Formula> = order
            .iter()
            .map(|&i| {
                let l = &cube.literals()[i];
                if rename {
                    l.map_constants(&Constant::primed)
                } else {
                    Formula::Lit(l.clone())
                }
            })
            .collect();
        match self.oracle.check(core::slice::from_ref(&bg), &labeled) {
            SatResult::Sat(m) => Ok(Err(m)),
            SatResult::Unsat(core) => Ok(Ok(Cube::new(core.iter().map(|&k| cube.literals()[order[k]].clone())))),
            SatResult::Unknown(why) => Err(Unknown(why)),
        }
    }

    fn add_predecessor(&mut self, pob: &Pob, m2: &Model) -> Result<(), Unknown> {
        let phi_p = pob.cube.primed().to_formula();
        let fu = Formula::or([self.reach_formula().primed(), Formula::and([self.reach_formula(), self.ts.trans().clone()])]);
        if let Some(m1) = self.sat(&[fu.clone(), phi_p.clone()])? {
            let s = mbp::project_formula(&self.vars, &fu, &m1).map_err(|e| Unknown(format!("successor projection: {e}")))?;
            let s = s.unprimed();
            debug!("reach += {s}");
            self.reach.push(s.to_formula());
        } else {
            let body = Formula::and([self.ts.trans().clone(), phi_p]);
            let pred = mbp::project_formula(&self.primed_vars, &body, m2).map_err(|e| Unknown(format!("predecessor projection: {e}")))?;
            self.push_pob(pred, pob.level - 1, Origin::Predecessor);
            self.queue.push(pob.clone());
        }
        Ok(())
    }

    fn unsafe_now(&mut self) -> Result<bool, Unknown> {
        Ok(self.sat(&[self.reach_formula(), self.bad.to_formula()])?.is_some())
    }

    /// Drops literals from `core` while the cube stays blocked relative to
    /// its own negation.
    fn generalize(&mut self, level: usize, core: Cube) -> Result<Cube, Unknown> {
        let mut cand = core;
        let mut order: Vec<Literal> = cand.iter().cloned().collect();
        order.sort_by_key(|l| core::cmp::Reverse(l.term().num_constants()));
        for lit in order {
            if cand.len() <= 1 {
                break;
            }
            let Some(idx) = cand.iter().position(|l| *l == lit) else { continue };
            let smaller = cand.without(idx);
            if let Ok(core) = self.blocking_query(level, &smaller, Some(&smaller), false)? {
                cand = if core.is_empty() { smaller } else { core };
            }
        }
        Ok(cand)
    }

    /// Raises the bounds of `t ≤ c` literals while the cube stays blocked.
    /// Used for concretized pobs, whose bounds are model values.
    fn weaken(&mut self, level: usize, mut cand: Cube) -> Result<Cube, Unknown> {
        const ATTEMPTS: usize = 8;
        for idx in 0..cand.len() {
            let mut step = BigInt::one();
            for _ in 0..ATTEMPTS {
                let Literal::Le { term, bound } = &cand.literals()[idx] else { break };
                let Formula::Lit(looser) = Literal::le(term.clone() - LinearTerm::constant(bound + &step)) else { break };
                let mut lits = cand.literals().to_vec();
                lits[idx] = looser;
                let next = Cube::new(lits);
                if next.len() != cand.len() {
                    break;
                }
                if self.blocking_query(level, &next, Some(&next), false)?.is_ok() {
                    cand = next;
                    step *= 2;
                } else if step.is_one() {
                    break;
                } else {
                    step = BigInt::one();
                }
            }
        }
        Ok(cand)
    }

    fn block(&mut self, pob: &Pob, core: Cube) -> Result<(), Unknown> {
        self.stats.blocked += 1;
        let cube = if core.is_empty() { pob.cube.clone() } else { core };
        let mut cube = self.generalize(pob.level, cube)?;
        if pob.origin == Origin::Concretize {
            cube = self.weaken(pob.level, cube)?;
        }
        let (id, new) = self.frames.add(cube.clone(), pob.level);
        debug!("lemma {id} at {}: not({cube})", pob.level);
        self.blocked_by.entry(pob.cube.clone()).or_default().push(id);
        if new {
            self.clusters.insert(id, cube);
        }
        if self.cfg.conjecture {
            self.conjecture(pob, id)?;
        }
        if self.cfg.subsume {
            self.subsume(id)?;
        }
        Ok(())
    }

    fn cluster_cubes(&self, c: &Cluster) -> Vec<Cube> {
        c.members.keys().filter_map(|id| self.clusters.cube(*id).cloned()).collect()
    }

    /// The largest `k ≤ N` with `O_k ∧ γ` unsat, if any.
    fn may_level(&mut self, gamma: &Cube) -> Result<Option<usize>, Unknown> {
        let g = gamma.to_formula();
        let mut level = None;
        for j in 0..=self.n {
            let frame = self.frames.frame(j, self.ts.init());
            if self.sat(&[frame, g.clone()])?.is_some() {
                break;
            }
            level = Some(j);
        }
        Ok(level)
    }

    fn conjecture(&mut self, pob: &Pob, id: LemmaId) -> Result<(), Unknown> {
        let Some(cluster) = self.clusters.best_cluster(id).filter(|c| c.len() >= self.cfg.min_cluster).cloned() else {
            return Ok(());
        };
        if self.clusters.gas(&cluster.pattern) == 0 {
            return Ok(());
        }
        let cubes = self.cluster_cubes(&cluster);
        let reach = self.reach_formula();
        let Some(Some(alpha)) = rule_outcome(rules::conjecture(&pob.cube, &cubes, &reach, &mut self.oracle))? else {
            return Ok(());
        };
        self.clusters.consume_gas(&cluster.pattern);
        if let Some(level) = self.may_level(&alpha)? {
            debug!("conjecture {alpha} at {level} from {}", cluster.pattern);
            self.stats.conjecture += 1;
            self.push_pob(alpha, level, Origin::Conjecture);
        }
        Ok(())
    }

    fn subsume(&mut self, id: LemmaId) -> Result<(), Unknown> {
        let Some(cluster) = self
            .clusters
            .clusters_of(id)
            .filter(|c| c.len() >= self.cfg.min_cluster && c.pattern.has_fixed_matrix())
            .min_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.pattern.cmp(&b.pattern)))
            .cloned()
        else {
            return Ok(());
        };
        if self.subsumed.get(&cluster.pattern) == Some(&cluster.len()) {
            return Ok(());
        }
        self.subsumed.insert(cluster.pattern.clone(), cluster.len());
        let cubes = undominated(self.cluster_cubes(&cluster));
        if cubes.len() < 2 {
            return Ok(());
        }
        let Some(input) = rule_outcome(SubsumeInput::from_cubes(&cubes))? else { return Ok(()) };
        let Some(Some(phi)) = rule_outcome(rules::subsume_cube(&input, &mut self.oracle))? else {
            return Ok(());
        };
        if self.frames.find(&phi).is_some() || self.sat(&[self.ts.init().clone(), phi.to_formula()])?.is_some() {
            return Ok(());
        }
        let phi_p = phi.primed().to_formula();
        let mut level = None;
        for j in 0..=self.n {
            let img = self.image_of_frame(j, None);
            if self.sat(&[img, phi_p.clone()])?.is_some() {
                break;
            }
            level = Some(j + 1);
        }
        let Some(level) = level else { return Ok(()) };
        let phi = self.generalize(level, phi)?;
        let (new_id, new) = self.frames.add(phi.clone(), level);
        debug!("subsume lemma {new_id} at {level}: not({phi}) from {}", cluster.pattern);
        self.stats.subsume += 1;
        if new {
            self.clusters.insert(new_id, phi);
        }
        Ok(())
    }

    /// Concretize a pob that a nonlinear cluster blocks only partially.
    /// Returns whether a may-pob was pushed.
    fn concretize_pob(&mut self, pob: &Pob) -> Result<bool, Unknown> {
        if pob.cube.has_div() || self.concretized.contains(&(pob.cube.clone(), pob.level)) {
            return Ok(false);
        }
        let mut candidates: Vec<LemmaId> = self.blocked_by.get(&pob.cube).cloned().unwrap_or_default();
        for (i, l) in self.frames.lemmas().iter().enumerate() {
            if l.cube.is_subset_of(&pob.cube) {
                candidates.push(LemmaId(i));
            }
        }
        let frames = &self.frames;
        let Some(cluster) = self
            .clusters
            .cluster_for(&candidates, |id| frames.lemma(id).level)
            .filter(|c| c.len() >= self.cfg.min_cluster && c.pattern.is_nonlinear())
            .cloned()
        else {
            return Ok(false);
        };
        if self.clusters.gas(&cluster.pattern) == 0 {
            return Ok(false);
        }
        let phi = pob.cube.to_formula();
        let mut partial = Vec::new();
        for c in self.cluster_cubes(&cluster) {
            if self.sat(&[phi.clone(), c.to_formula()])?.is_some() && self.sat(&[phi.clone(), c.negate()])?.is_some() {
                partial.push(c.negate());
            }
        }
        if partial.is_empty() {
            return Ok(false);
        }
        partial.push(phi);
        let Some(model) = self.sat(&partial)? else { return Ok(false) };
        let u = cluster.pattern.var_coeff_constants();
        let Some(gamma) = rule_outcome(rules::concretize(&pob.cube, &u, &model, &mut self.oracle))? else {
            return Ok(false);
        };
        self.clusters.consume_gas(&cluster.pattern);
        let Some(level) = self.may_level(&gamma)? else { return Ok(false) };
        self.concretized.insert((pob.cube.clone(), pob.level));
        debug!("concretize {} into {gamma} at {level}", pob.cube);
        self.stats.concretize += 1;
        self.push_pob(gamma, level, Origin::Concretize);
        self.queue.push(pob.clone());
        Ok(true)
    }

    /// Pushes every lemma of `O_j \ O_{j+1}` that `O_j` proves inductive,
    /// for `j = 0..=N`.
    fn propagate(&mut self) -> Result<(), Unknown> {
        for j in 0..=self.n {
            let ids = self.frames.exactly(j);
            if ids.is_empty() {
                continue;
            }
            let base = Formula::and([self.frames.frame(j, self.ts.init()), self.ts.trans().clone()]);
            for id in ids {
                if self.frames.push_known_to_fail(id) {
                    continue;
                }
                let next = self.frames.lemma(id).cube.primed().to_formula();
                if self.sat(&[base.clone(), next])?.is_none() {
                    self.frames.raise(id, j + 1);
                    self.stats.propagated += 1;
                } else {
                    self.frames.note_failed_push(id);
                }
            }
        }
        Ok(())
    }

    /// Some frame `1 ≤ j < N` equals its successor.
    fn fixpoint_level(&self) -> Option<usize> {
        (1..self.n).find(|&j| self.frames.count_exactly(j) == 0)
    }

    /// Checks initiation, relative inductiveness and safety of the closed
    /// frames, and that every reachable cube meets the image of the ones
    /// before it.
    fn check_trace(&mut self) -> Result<(), Unknown> {
        self.stats.debug_checks += 1;
        let init = self.ts.init().clone();
        for l in self.frames.lemmas().to_vec() {
            if self.sat(&[init.clone(), l.cube.to_formula()])?.is_some() {
                return Err(Unknown(format!("invariant violated: init meets lemma not({})", l.cube)));
            }
        }
        for j in 0..self.n {
            let here = self.frames.frame(j, &init);
            let next = self.frames.lemmas_formula(j + 1).primed().not();
            if self.sat(&[here.clone(), self.ts.trans().clone(), next])?.is_some() {
                return Err(Unknown(format!("invariant violated: frame {j} is not inductive relative to {}", j + 1)));
            }
            if self.sat(&[here, self.bad.to_formula()])?.is_some() {
                return Err(Unknown(format!("invariant violated: frame {j} meets bad")));
            }
        }
        for k in 1..self.reach.len() {
            let before = Formula::or(self.reach[..k].iter().cloned());
            let image = Formula::or([before.primed(), Formula::and([before, self.ts.trans().clone()])]);
            if self.sat(&[image, self.reach[k].primed()])?.is_none() {
                return Err(Unknown(format!("invariant violated: reachable cube {} has no predecessor", self.reach[k])));
            }
        }
        Ok(())
    }
}

/// Drops cubes whose bound vector is dominated by another's (same matrix,
/// so the cube is contained in the other).
fn undominated(cubes: Vec<Cube>) -> Vec<Cube> {
    let Ok(input) = SubsumeInput::from_cubes(&cubes) else { return cubes };
    let b = &input.bounds;
    let mut keep = Vec::new();
    'outer: for i in 0..b.len() {
        for j in 0..b.len() {
            if i == j {
                continue;
            }
            let le = b[i].iter().zip(&b[j]).all(|(x, y)| x <= y);
            if le && (b[i] != b[j] || j < i) {
                continue 'outer;
            }
        }
        keep.push(cubes[i].clone());
    }
    keep
}
