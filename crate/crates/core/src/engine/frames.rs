use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::cluster::LemmaId;
use crate::formula::{Cube, Formula};

/// A lemma `¬cube` held in frames `0..=level`.
#[derive(Clone, Debug)]
pub struct Lemma {
    pub cube: Cube,
    pub level: usize,
    /// Level and frame version of the last failed push attempt.
    pub(super) failed_push: Option<(usize, u64)>,
}

/// The trace `O₀ … O_N`, stored as lemmas tagged with the highest frame
/// they belong to. `O₀` additionally includes `Init`.
#[derive(Clone, Debug, Default)]
pub struct Frames {
    lemmas: Vec<Lemma>,
    index: BTreeMap<Cube, LemmaId>,
    /// Bumped whenever a frame gains a lemma.
    version: Vec<u64>,
}

impl Frames {
    pub fn lemmas(&self) -> &[Lemma] {
        &self.lemmas
    }

    pub fn lemma(&self, id: LemmaId) -> &Lemma {
        &self.lemmas[id.0]
    }

    pub fn find(&self, cube: &Cube) -> Option<LemmaId> {
        self.index.get(cube).copied()
    }

    pub fn len(&self) -> usize {
        self.lemmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lemmas.is_empty()
    }

    pub fn version(&self, j: usize) -> u64 {
        self.version.get(j).copied().unwrap_or(0)
    }

    fn bump(&mut self, from: usize, to: usize) {
        if self.version.len() <= to {
            self.version.resize(to + 1, 0);
        }
        for v in &mut self.version[from..=to] {
            *v += 1;
        }
    }

    /// Adds `¬cube` to frames `0..=level`. An existing lemma with the same
    /// cube keeps the higher level. Returns the id and whether it is new.
    pub fn add(&mut self, cube: Cube, level: usize) -> (LemmaId, bool) {
        if let Some(id) = self.find(&cube) {
            let old = self.lemmas[id.0].level;
            if level > old {
                self.lemmas[id.0].level = level;
                self.bump(old + 1, level);
            }
            return (id, false);
        }
        let id = LemmaId(self.lemmas.len());
        self.index.insert(cube.clone(), id);
        self.lemmas.push(Lemma { cube, level, failed_push: None });
        self.bump(0, level);
        (id, true)
    }

    pub fn raise(&mut self, id: LemmaId, level: usize) {
        let old = self.lemmas[id.0].level;
        if level > old {
            self.lemmas[id.0].level = level;
            self.bump(old + 1, level);
        }
    }

    pub(super) fn note_failed_push(&mut self, id: LemmaId) {
        let lvl = self.lemmas[id.0].level;
        let v = self.version(lvl);
        self.lemmas[id.0].failed_push = Some((lvl, v));
    }

    pub(super) fn push_known_to_fail(&self, id: LemmaId) -> bool {
        let l = &self.lemmas[id.0];
        l.failed_push == Some((l.level, self.version(l.level)))
    }

    /// Ids of the lemmas in `O_j`.
    pub fn at_least(&self, j: usize) -> impl Iterator<Item = LemmaId> + '_ {
        self.lemmas.iter().enumerate().filter(move |(_, l)| l.level >= j).map(|(i, _)| LemmaId(i))
    }

    /// Ids of the lemmas in `O_j \ O_{j+1}`.
    pub fn exactly(&self, j: usize) -> Vec<LemmaId> {
        self.lemmas.iter().enumerate().filter(|(_, l)| l.level == j).map(|(i, _)| LemmaId(i)).collect()
    }

    pub fn count_exactly(&self, j: usize) -> usize {
        self.lemmas.iter().filter(|l| l.level == j).count()
    }

    /// The lemmas of `O_j` as one formula (without `Init`).
    pub fn lemmas_formula(&self, j: usize) -> Formula {
        Formula::and(self.at_least(j).map(|id| self.lemmas[id.0].cube.negate()))
    }

    /// `O_j` as a formula.
    pub fn frame(&self, j: usize, init: &Formula) -> Formula {
        if j == 0 {
            Formula::and([init.clone(), self.lemmas_formula(0)])
        } else {
            self.lemmas_formula(j)
        }
    }

    /// Lemmas per level from `0` to `top`, for diagnostics.
    pub fn profile(&self, top: usize) -> Vec<usize> {
        let mut out = vec![0; top + 2];
        for l in &self.lemmas {
            out[l.level.min(top + 1)] += 1;
        }
        out
    }
}
