use alloc::collections::BinaryHeap;
use core::cmp::{Ordering, Reverse};

use crate::formula::Cube;

/// Where a proof obligation came from. Only `Bad` and `Predecessor` pobs
/// are backed by an actual path to a bad state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Bad,
    Predecessor,
    Concretize,
    Conjecture,
}

impl Origin {
    pub fn is_may(self) -> bool {
        matches!(self, Origin::Concretize | Origin::Conjecture)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pob {
    pub cube: Cube,
    pub level: usize,
    pub origin: Origin,
}

#[derive(Debug, PartialEq, Eq)]
struct Entry {
    key: Reverse<(usize, usize, u64)>,
    pob: Pob,
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.cmp(&other.key)
    }
}

/// Pobs ordered by level, then size, then insertion.
#[derive(Debug, Default)]
pub struct PobQueue {
    heap: BinaryHeap<Entry>,
    seq: u64,
}

impl PobQueue {
    pub fn push(&mut self, pob: Pob) {
        self.seq += 1;
        let key = Reverse((pob.level, pob.cube.len(), self.seq));
        self.heap.push(Entry { key, pob });
    }

    pub fn pop(&mut self) -> Option<Pob> {
        self.heap.pop().map(|e| e.pob)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn clear(&mut self) {
        self.heap.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{normalize_literal, Cmp, Constant, Formula, LinearTerm};

    fn pob(level: usize, lits: usize) -> Pob {
        let parts = (0..lits).map(|i| {
            normalize_literal(&LinearTerm::var(Constant::int(&alloc::format!("x{i}"))), Cmp::Le, &LinearTerm::constant(0)).unwrap()
        });
        Pob { cube: Cube::from_formula(&Formula::and(parts)).unwrap(), level, origin: Origin::Bad }
    }

    #[test]
    fn order_is_level_size_fifo() {
        let mut q = PobQueue::default();
        q.push(pob(2, 1));
        q.push(pob(1, 3));
        q.push(pob(1, 2));
        let mut first = pob(1, 2);
        first.origin = Origin::Predecessor;
        q.push(first);
        let order: alloc::vec::Vec<(usize, usize, Origin)> =
            core::iter::from_fn(|| q.pop()).map(|p| (p.level, p.cube.len(), p.origin)).collect();
        assert_eq!(order, [(1, 2, Origin::Bad), (1, 2, Origin::Predecessor), (1, 3, Origin::Bad), (2, 1, Origin::Bad)]);
    }
}
