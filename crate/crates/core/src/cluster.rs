//! Numeric anti-unification and clusters of syntactically similar lemmas.
//!
//! Patterns range over the cube a lemma negates. Every integer position of
//! the cube (coefficient, bound, divisor, remainder) is a [`Slot`]; a
//! placeholder occurs at most once, numbered by first occurrence.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write as _};

use num_bigint::BigInt;

use crate::formula::{Constant, Cube, LinearTerm, Literal};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Num(BigInt),
    Var(usize),
}

impl Slot {
    pub fn is_var(&self) -> bool {
        matches!(self, Slot::Var(_))
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Num(n) => write!(f, "{n}"),
            Slot::Var(i) => write!(f, "v{i}"),
        }
    }
}

/// One literal of a pattern: `Σ coeffs·consts ≤ rhs`, or with `divisor`
/// set, `divisor | (Σ coeffs·consts − rhs)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatternLiteral {
    pub divisor: Option<Slot>,
    pub consts: Vec<Constant>,
    pub coeffs: Vec<Slot>,
    pub rhs: Slot,
}

impl PatternLiteral {
    fn of(l: &Literal) -> Self {
        let (divisor, term, rhs) = match l {
            Literal::Le { term, bound } => (None, term, bound),
            Literal::Div { divisor, term, remainder } => (Some(Slot::Num(divisor.clone())), term, remainder),
        };
        PatternLiteral {
            divisor,
            consts: term.constants().cloned().collect(),
            coeffs: term.iter().map(|(_, k)| Slot::Num(k.clone())).collect(),
            rhs: Slot::Num(rhs.clone()),
        }
    }

    fn slots(&self) -> impl Iterator<Item = &Slot> {
        self.divisor.iter().chain(self.coeffs.iter()).chain(core::iter::once(&self.rhs))
    }

    fn slots_mut(&mut self) -> impl Iterator<Item = &mut Slot> {
        self.divisor.iter_mut().chain(self.coeffs.iter_mut()).chain(core::iter::once(&mut self.rhs))
    }

    fn same_shape(&self, other: &PatternLiteral) -> bool {
        self.divisor.is_some() == other.divisor.is_some() && self.consts == other.consts
    }
}

/// A cube whose integer positions may be placeholders.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    lits: Vec<PatternLiteral>,
    vars: usize,
}

impl Pattern {
    /// The pattern with no placeholders that only `cube` matches.
    pub fn concrete(cube: &Cube) -> Pattern {
        Pattern { lits: cube.iter().map(PatternLiteral::of).collect(), vars: 0 }
    }

    pub fn literals(&self) -> &[PatternLiteral] {
        &self.lits
    }

    pub fn num_vars(&self) -> usize {
        self.vars
    }

    fn slots(&self) -> impl Iterator<Item = &Slot> {
        self.lits.iter().flat_map(PatternLiteral::slots)
    }

    fn same_shape(&self, other: &Pattern) -> bool {
        self.lits.len() == other.lits.len() && self.lits.iter().zip(&other.lits).all(|(a, b)| a.same_shape(b))
    }

    /// Renumbers placeholders by first occurrence.
    fn canonical(mut self) -> Pattern {
        let mut next = 0;
        for l in &mut self.lits {
            for s in l.slots_mut() {
                if let Slot::Var(_) = s {
                    *s = Slot::Var(next);
                    next += 1;
                }
            }
        }
        self.vars = next;
        self
    }

    /// Some coefficient is a placeholder.
    pub fn is_nonlinear(&self) -> bool {
        self.lits.iter().any(|l| l.coeffs.iter().any(Slot::is_var))
    }

    /// Constants that carry a placeholder coefficient somewhere.
    pub fn var_coeff_constants(&self) -> BTreeSet<Constant> {
        let mut out = BTreeSet::new();
        for l in &self.lits {
            for (c, s) in l.consts.iter().zip(&l.coeffs) {
                if s.is_var() {
                    out.insert(c.clone());
                }
            }
        }
        out
    }

    /// The pattern reads `A·x ≤ v` with a fixed coefficient matrix and no
    /// divisibility.
    pub fn has_fixed_matrix(&self) -> bool {
        self.lits.iter().all(|l| l.divisor.is_none() && l.coeffs.iter().all(|s| !s.is_var()))
    }

    /// Numeric matching: the values of the placeholders, in order, that turn
    /// the pattern into `cube`.
    pub fn matches(&self, cube: &Cube) -> Option<Vec<BigInt>> {
        let other = Pattern::concrete(cube);
        if !self.same_shape(&other) {
            return None;
        }
        let mut sigma = Vec::with_capacity(self.vars);
        for (p, c) in self.slots().zip(other.slots()) {
            let Slot::Num(n) = c else { unreachable!() };
            match p {
                Slot::Num(m) if m == n => {}
                Slot::Num(_) => return None,
                Slot::Var(_) => sigma.push(n.clone()),
            }
        }
        Some(sigma)
    }

    /// Replaces placeholders by the slots of `sigma`; missing entries stay.
    /// Literals are rebuilt as written, without normalization.
    pub fn apply(&self, sigma: &BTreeMap<usize, Slot>) -> Pattern {
        let mut p = self.clone();
        for l in &mut p.lits {
            for s in l.slots_mut() {
                if let Slot::Var(i) = s {
                    if let Some(r) = sigma.get(i) {
                        *s = r.clone();
                    }
                }
            }
        }
        p.canonical()
    }

    /// The cube obtained by filling all placeholders in order.
    pub fn instantiate(&self, values: &[BigInt]) -> Option<Cube> {
        if values.len() != self.vars {
            return None;
        }
        let sigma = values.iter().cloned().map(Slot::Num).enumerate().collect();
        self.apply(&sigma).to_cube()
    }

    /// The cube of a placeholder-free pattern.
    pub fn to_cube(&self) -> Option<Cube> {
        let num = |s: &Slot| match s {
            Slot::Num(n) => Some(n.clone()),
            Slot::Var(_) => None,
        };
        let mut lits = Vec::with_capacity(self.lits.len());
        for l in &self.lits {
            let mut coeffs = Vec::with_capacity(l.coeffs.len());
            for (c, s) in l.consts.iter().zip(&l.coeffs) {
                coeffs.push((c.clone(), num(s)?));
            }
            let term = LinearTerm::from_parts(coeffs, BigInt::default());
            let rhs = num(&l.rhs)?;
            lits.push(match &l.divisor {
                None => Literal::Le { term, bound: rhs },
                Some(d) => Literal::Div { divisor: num(d)?, term, remainder: rhs },
            });
        }
        Some(Cube::new(lits))
    }

    /// Coefficient matrix of a fixed-matrix pattern: rows follow the
    /// literals, columns the given constants.
    pub fn coefficient_rows(&self, columns: &[Constant]) -> Option<Vec<Vec<BigInt>>> {
        self.lits
            .iter()
            .map(|l| {
                l.divisor.is_none().then_some(())?;
                columns
                    .iter()
                    .map(|c| match l.consts.iter().position(|x| x == c) {
                        None => Some(BigInt::default()),
                        Some(i) => match &l.coeffs[i] {
                            Slot::Num(n) => Some(n.clone()),
                            Slot::Var(_) => None,
                        },
                    })
                    .collect()
            })
            .collect()
    }

    pub fn constants(&self) -> BTreeSet<Constant> {
        self.lits.iter().flat_map(|l| l.consts.iter().cloned()).collect()
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            let mut term = String::new();
            for (j, (c, k)) in l.consts.iter().zip(&l.coeffs).enumerate() {
                if j > 0 {
                    term.push_str(" + ");
                }
                match k {
                    Slot::Num(n) if *n == BigInt::from(1) => write!(term, "{c}")?,
                    Slot::Num(n) if *n == BigInt::from(-1) => write!(term, "-{c}")?,
                    _ => write!(term, "{k}*{c}")?,
                }
            }
            match &l.divisor {
                None => write!(f, "{term} <= {}", l.rhs)?,
                Some(d) => write!(f, "{d} | ({term} - {})", l.rhs)?,
            }
        }
        Ok(())
    }
}

/// Most general numeric anti-unifier: positions where the two cubes agree
/// stay concrete, every differing position becomes its own placeholder.
/// `None` for different shapes or identical cubes.
pub fn anti_unify(a: &Cube, b: &Cube) -> Option<Pattern> {
    generalize(&Pattern::concrete(a), b)
}

/// Generalizes `p` just enough for `cube` to match it. `None` when the
/// shapes differ or `cube` already matches.
pub fn generalize(p: &Pattern, cube: &Cube) -> Option<Pattern> {
    let other = Pattern::concrete(cube);
    if !p.same_shape(&other) {
        return None;
    }
    let mut out = p.clone();
    let mut changed = false;
    for (l, o) in out.lits.iter_mut().zip(&other.lits) {
        for (s, t) in l.slots_mut().zip(o.slots()) {
            if let Slot::Num(_) = s {
                if s != t {
                    *s = Slot::Var(usize::MAX);
                    changed = true;
                }
            }
        }
    }
    changed.then(|| out.canonical())
}

/// Index of a lemma in the engine's lemma table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LemmaId(pub usize);

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Lemmas (as the cubes they negate) matching one pattern, each with its
/// placeholder values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    pub pattern: Pattern,
    pub members: BTreeMap<LemmaId, Vec<BigInt>>,
}

impl Cluster {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, id: LemmaId) -> bool {
        self.members.contains_key(&id)
    }
}

/// All clusters over all lemmas, plus a gas counter per pattern.
#[derive(Clone, Debug, Default)]
pub struct ClusterStore {
    cubes: BTreeMap<LemmaId, Cube>,
    clusters: BTreeMap<Pattern, Cluster>,
    by_lemma: BTreeMap<LemmaId, BTreeSet<Pattern>>,
    gas: BTreeMap<Pattern, u32>,
    initial_gas: u32,
}

impl ClusterStore {
    pub fn new(initial_gas: u32) -> Self {
        ClusterStore { initial_gas, ..ClusterStore::default() }
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn clusters(&self) -> impl Iterator<Item = &Cluster> {
        self.clusters.values()
    }

    pub fn get(&self, p: &Pattern) -> Option<&Cluster> {
        self.clusters.get(p)
    }

    pub fn cube(&self, id: LemmaId) -> Option<&Cube> {
        self.cubes.get(&id)
    }

    pub fn clusters_of(&self, id: LemmaId) -> impl Iterator<Item = &Cluster> {
        self.by_lemma.get(&id).into_iter().flatten().filter_map(|p| self.clusters.get(p))
    }

    /// The cluster of a lemma used by the rules: most members first, then
    /// pattern order.
    pub fn best_cluster(&self, id: LemmaId) -> Option<&Cluster> {
        self.clusters_of(id).min_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.pattern.cmp(&b.pattern)))
    }

    /// Among the clusters containing one of `candidates`, the one whose
    /// candidate sits at the lowest level, then the largest, then the first
    /// by pattern.
    pub fn cluster_for(&self, candidates: &[LemmaId], level: impl Fn(LemmaId) -> usize) -> Option<&Cluster> {
        let mut best: Option<(usize, &Cluster)> = None;
        for &id in candidates {
            for c in self.clusters_of(id) {
                let lvl = level(id);
                let better = match best {
                    None => true,
                    Some((bl, bc)) => (lvl, core::cmp::Reverse(c.len()), &c.pattern) < (bl, core::cmp::Reverse(bc.len()), &bc.pattern),
                };
                if better {
                    best = Some((lvl, c));
                }
            }
        }
        best.map(|(_, c)| c)
    }

    pub fn gas(&self, p: &Pattern) -> u32 {
        self.gas.get(p).copied().unwrap_or(self.initial_gas)
    }

    /// Takes one unit of gas from `p`. `false` when none is left.
    pub fn consume_gas(&mut self, p: &Pattern) -> bool {
        let g = self.gas.entry(p.clone()).or_insert(self.initial_gas);
        if *g == 0 {
            return false;
        }
        *g -= 1;
        true
    }

    /// Records a new lemma and updates clusters. Returns the patterns of
    /// the clusters that gained members or were created.
    pub fn insert(&mut self, id: LemmaId, cube: Cube) -> BTreeSet<Pattern> {
        let mut touched = BTreeSet::new();
        if self.cubes.contains_key(&id) {
            return touched;
        }
        // Join every cluster the lemma already matches.
        let matching: Vec<Pattern> = self.clusters.keys().filter(|p| p.matches(&cube).is_some()).cloned().collect();
        for p in matching {
            self.add_member(&p, id, &cube);
            touched.insert(p);
        }
        let others: Vec<(LemmaId, Cube)> = self.cubes.iter().map(|(i, c)| (*i, c.clone())).collect();
        self.cubes.insert(id, cube.clone());
        for (other, other_cube) in others {
            let Some(au) = anti_unify(&cube, &other_cube) else { continue };
            let patterns: Vec<Pattern> = self.by_lemma.get(&other).into_iter().flatten().cloned().collect();
            if patterns.is_empty() {
                self.form(au, &[id, other], &mut touched);
                continue;
            }
            for p in patterns {
                if p.matches(&cube).is_some() {
                    if self.add_member(&p, id, &cube) {
                        touched.insert(p);
                    }
                } else if let Some(g) = generalize(&p, &cube) {
                    let mut seed: Vec<LemmaId> = self.clusters[&p].members.keys().copied().collect();
                    seed.push(id);
                    self.form(g, &seed, &mut touched);
                }
            }
        }
        touched
    }

    /// Creates (or extends) the cluster of `p` with `seed` and every other
    /// known lemma matching `p`.
    fn form(&mut self, p: Pattern, seed: &[LemmaId], touched: &mut BTreeSet<Pattern>) {
        let fresh = !self.clusters.contains_key(&p);
        if fresh {
            self.clusters.insert(p.clone(), Cluster { pattern: p.clone(), members: BTreeMap::new() });
        }
        let mut ids: Vec<LemmaId> = seed.to_vec();
        if fresh {
            ids.extend(self.cubes.keys().copied());
        }
        let mut changed = fresh;
        for i in ids {
            let c = self.cubes[&i].clone();
            changed |= self.add_member(&p, i, &c);
        }
        if changed {
            touched.insert(p);
        }
    }

    fn add_member(&mut self, p: &Pattern, id: LemmaId, cube: &Cube) -> bool {
        let Some(sigma) = p.matches(cube) else { return false };
        let Some(cluster) = self.clusters.get_mut(p) else { return false };
        if cluster.members.insert(id, sigma).is_some() {
            return false;
        }
        self.by_lemma.entry(id).or_default().insert(p.clone());
        true
    }

    /// Text dump, one cluster per line group.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for c in self.clusters.values() {
            let _ = writeln!(out, "cluster !({}) gas={} size={}", c.pattern, self.gas(&c.pattern), c.len());
            for (id, sigma) in &c.members {
                let _ = write!(out, "  {id} [");
                for (i, v) in sigma.iter().enumerate() {
                    let _ = write!(out, "{}v{i}={v}", if i > 0 { ", " } else { "" });
                }
                let _ = writeln!(out, "] !({})", self.cubes[id]);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{normalize_literal, Cmp, Formula};
    use alloc::vec;
    use proptest::prelude::*;

    fn c(n: &str) -> Constant {
        Constant::int(n)
    }
    fn lin(parts: &[(i64, &str)]) -> LinearTerm {
        parts.iter().fold(LinearTerm::zero(), |t, (k, n)| t + LinearTerm::monomial(*k, c(n)))
    }
    fn le(t: LinearTerm, b: i64) -> Formula {
        normalize_literal(&t, Cmp::Le, &LinearTerm::constant(b)).unwrap()
    }
    fn ge(t: LinearTerm, b: i64) -> Formula {
        normalize_literal(&t, Cmp::Ge, &LinearTerm::constant(b)).unwrap()
    }
    fn cube(parts: Vec<Formula>) -> Cube {
        Cube::from_formula(&Formula::and(parts)).unwrap()
    }
    /// Cube negated by `a ≤ x ∨ b ≤ y`.
    fn ab(x: i64, y: i64) -> Cube {
        cube(vec![ge(lin(&[(1, "a")]), x + 1), ge(lin(&[(1, "b")]), y + 1)])
    }

    #[test]
    fn coefficient_positions_generalize() {
        let p = anti_unify(&cube(vec![le(lin(&[(3, "a"), (4, "b")]), 0)]), &cube(vec![le(lin(&[(3, "a"), (5, "b")]), 0)])).unwrap();
        assert_eq!(p.to_string(), "3*a + v0*b <= 0");
        assert!(p.is_nonlinear());
        assert_eq!(p.var_coeff_constants().into_iter().collect::<Vec<_>>(), [c("b")]);
    }

    #[test]
    fn bounds_get_separate_placeholders() {
        let p = anti_unify(&ab(6, 6), &ab(5, 5)).unwrap();
        assert_eq!(p.num_vars(), 2);
        assert!(p.has_fixed_matrix());
        assert!(p.matches(&ab(6, 6)).is_some() && p.matches(&ab(1, 9)).is_some());
    }

    #[test]
    fn sign_differences_become_placeholders() {
        let p = anti_unify(&cube(vec![le(lin(&[(1, "a"), (1, "b")]), 0)]), &cube(vec![le(lin(&[(1, "a"), (-1, "b")]), 0)])).unwrap();
        assert_eq!(p.to_string(), "a + v0*b <= 0");
    }

    #[test]
    fn shape_mismatch_and_identity_give_none() {
        assert!(anti_unify(&ab(1, 1), &ab(1, 1)).is_none());
        assert!(anti_unify(&ab(1, 1), &cube(vec![le(lin(&[(1, "a")]), 0)])).is_none());
    }

    #[test]
    fn substitution_examples() {
        let p = anti_unify(&cube(vec![le(lin(&[(3, "a"), (4, "b")]), 1)]), &cube(vec![le(lin(&[(2, "a"), (6, "b")]), 0)])).unwrap();
        assert_eq!(p.to_string(), "v0*a + v1*b <= v2");
        let sigma: BTreeMap<usize, Slot> = [(0, Slot::Num(3.into())), (1, Slot::Num(4.into())), (2, Slot::Num(0.into()))].into_iter().collect();
        assert_eq!(p.apply(&sigma).to_cube().unwrap(), cube(vec![le(lin(&[(3, "a"), (4, "b")]), 0)]));
        assert_eq!(p.apply(&BTreeMap::new()), p);
        // Not normalized: 6a + 6b <= 6 stays as written.
        let big = p.instantiate(&[6.into(), 6.into(), 6.into()]).unwrap();
        assert_eq!(big.to_string(), "6a + 6b <= 6");
    }

    #[test]
    fn insertion_groups_matching_lemmas() {
        let mut store = ClusterStore::new(100);
        store.insert(LemmaId(0), ab(5, 5));
        store.insert(LemmaId(1), ab(8, 5));
        assert_eq!(store.len(), 1);
        assert_eq!(store.clusters().next().unwrap().pattern.to_string(), "-a <= v0 & -b <= -6");
        let touched = store.insert(LemmaId(2), ab(6, 6));
        let general = anti_unify(&ab(5, 5), &ab(6, 6)).unwrap();
        assert!(touched.contains(&general));
        assert_eq!(store.get(&general).unwrap().len(), 3);
    }

    #[test]
    fn joining_and_isolation() {
        let mut store = ClusterStore::new(100);
        store.insert(LemmaId(0), ab(5, 5));
        store.insert(LemmaId(1), ab(8, 5));
        let before = store.len();
        store.insert(LemmaId(2), ab(9, 5));
        assert_eq!(store.len(), before);
        assert_eq!(store.clusters().next().unwrap().len(), 3);
        store.insert(LemmaId(3), cube(vec![le(lin(&[(1, "z")]), 0)]));
        assert_eq!(store.clusters_of(LemmaId(3)).count(), 0);
    }

    #[test]
    fn cluster_choice_is_deterministic() {
        let mut store = ClusterStore::new(100);
        for (i, (x, y)) in [(5, 5), (8, 5), (6, 6), (7, 7)].into_iter().enumerate() {
            store.insert(LemmaId(i), ab(x, y));
        }
        let level = |id: LemmaId| id.0;
        let first = store.cluster_for(&[LemmaId(1), LemmaId(3)], level).map(|c| c.pattern.clone());
        for _ in 0..3 {
            assert_eq!(store.cluster_for(&[LemmaId(1), LemmaId(3)], level).map(|c| c.pattern.clone()), first);
        }
        assert!(store.cluster_for(&[], level).is_none());
    }

    #[test]
    fn gas_runs_out() {
        let mut store = ClusterStore::new(2);
        let p = anti_unify(&ab(1, 1), &ab(2, 2)).unwrap();
        assert!(store.consume_gas(&p));
        assert!(store.consume_gas(&p));
        assert!(!store.consume_gas(&p));
        assert_eq!(store.gas(&p), 0);
    }

    fn small_cube() -> impl Strategy<Value = Vec<(i64, i64, i64)>> {
        proptest::collection::vec((-3i64..=3, -3i64..=3, -5i64..=5), 1..4)
    }

    fn build(rows: &[(i64, i64, i64)]) -> Option<Cube> {
        Cube::from_formula(&Formula::and(rows.iter().map(|(a, b, k)| le(lin(&[(*a, "x"), (*b, "y")]), *k))))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn anti_unifiers_are_sound_and_most_general(r1 in small_cube(), r2 in small_cube(), pos in any::<proptest::sample::Index>()) {
            let (Some(a), Some(b)) = (build(&r1), build(&r2)) else { return Ok(()) };
            let Some(p) = anti_unify(&a, &b) else { return Ok(()) };
            for cb in [&a, &b] {
                let sigma = p.matches(cb).unwrap();
                prop_assert_eq!(&p.instantiate(&sigma).unwrap(), cb);
            }
            // Any pattern obtained by fixing one placeholder of `p` is too
            // specific for at least one of the two cubes.
            if p.num_vars() > 0 {
                let i = pos.index(p.num_vars());
                let sa = p.matches(&a).unwrap();
                let fixed: BTreeMap<usize, Slot> = [(i, Slot::Num(sa[i].clone()))].into_iter().collect();
                let q = p.apply(&fixed);
                prop_assert!(q.matches(&b).is_none());
            }
        }

        #[test]
        fn store_members_match_their_patterns(rows in proptest::collection::vec(small_cube(), 2..7)) {
            let mut store = ClusterStore::new(100);
            for (i, r) in rows.iter().enumerate() {
                if let Some(cb) = build(r) {
                    store.insert(LemmaId(i), cb);
                }
            }
            for cl in store.clusters() {
                prop_assert!(cl.len() >= 2);
                for (id, sigma) in &cl.members {
                    prop_assert_eq!(&cl.pattern.instantiate(sigma).unwrap(), store.cube(*id).unwrap());
                }
            }
        }
    }
}
