use std::fmt;

use fixedbitset::FixedBitSet;

use crate::automaton::StateId;

/// A set of states of one automaton, stored as a bitset of width `n_states`.
///
/// Ordering and hashing follow the canonical bit pattern, so sets can key
/// visited tables in the subset-based searches.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet(FixedBitSet);

impl StateSet {
    pub fn empty(width: usize) -> Self {
        StateSet(FixedBitSet::with_capacity(width))
    }

    pub fn full(width: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(width);
        bits.insert_range(..);
        StateSet(bits)
    }

    pub fn singleton(width: usize, q: StateId) -> Self {
        let mut s = Self::empty(width);
        s.insert(q);
        s
    }

    pub fn from_states<I: IntoIterator<Item = StateId>>(width: usize, states: I) -> Self {
        let mut s = Self::empty(width);
        for q in states {
            s.insert(q);
        }
        s
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, q: StateId) {
        self.0.insert(q);
    }

    pub fn remove(&mut self, q: StateId) {
        self.0.set(q, false);
    }

    pub fn contains(&self, q: StateId) -> bool {
        self.0.contains(q)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        self.0.ones()
    }

    /// The unique element, if the set has exactly one.
    pub fn single(&self) -> Option<StateId> {
        let mut it = self.0.ones();
        match (it.next(), it.next()) {
            (Some(q), None) => Some(q),
            _ => None,
        }
    }

    pub fn first(&self) -> Option<StateId> {
        self.0.minimum()
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &StateSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn union_with(&mut self, other: &StateSet) {
        self.0.union_with(&other.0);
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.ones()).finish()
    }
}
