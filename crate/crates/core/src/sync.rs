//! Classical (unconstrained) synchronization through the pair automaton.

use std::collections::VecDeque;

use crate::alphabet::{Symbol, Word};
use crate::automaton::{Automaton, Kind, StateId};
use crate::error::{Error, Result};

/// The automaton on unordered pairs `{q, q'}` (singletons included) induced
/// by a complete deterministic automaton.
#[derive(Debug, Clone, Copy)]
pub struct PairAutomaton<'a> {
    base: &'a Automaton,
}

impl<'a> PairAutomaton<'a> {
    pub fn new(base: &'a Automaton) -> Result<Self> {
        require_dcsa(base)?;
        Ok(PairAutomaton { base })
    }

    pub fn base(&self) -> &'a Automaton {
        self.base
    }

    /// `|Q|(|Q|+1)/2`.
    pub fn n_states(&self) -> usize {
        let n = self.base.n_states();
        n * (n + 1) / 2
    }

    pub fn index(&self, p: StateId, q: StateId) -> usize {
        let (i, j) = if p <= q { (p, q) } else { (q, p) };
        let n = self.base.n_states();
        // rows of lengths n, n-1, … precede row i
        i * (2 * n + 1 - i) / 2 + (j - i)
    }

    pub fn pair(&self, id: usize) -> (StateId, StateId) {
        let n = self.base.n_states();
        let mut rest = id;
        for i in 0..n {
            let row = n - i;
            if rest < row {
                return (i, i + rest);
            }
            rest -= row;
        }
        panic!("pair index {id} out of range");
    }

    pub fn step(&self, id: usize, x: Symbol) -> usize {
        let (p, q) = self.pair(id);
        self.index(self.base.next(p, x).unwrap(), self.base.next(q, x).unwrap())
    }

    pub fn is_singleton(&self, id: usize) -> bool {
        let (p, q) = self.pair(id);
        p == q
    }
}

fn require_dcsa(aut: &Automaton) -> Result<()> {
    if aut.is_complete() && aut.kind() != Kind::Nfa {
        Ok(())
    } else {
        Err(Error::KindViolation(
            "synchronization needs a complete deterministic automaton".into(),
        ))
    }
}

/// A word mapping every state to `sink`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncWitness {
    pub word: Word,
    pub sink: StateId,
}

/// Decides synchronizability in `O(|Σ||Q|²)`: every pair must be able to
/// reach a singleton in the pair automaton.
pub fn is_synchronizing(aut: &Automaton) -> Result<bool> {
    let pa = PairAutomaton::new(aut)?;
    let m = pa.n_states();
    let mut preds = vec![Vec::new(); m];
    for id in 0..m {
        for x in aut.alphabet().symbols() {
            preds[pa.step(id, x)].push(id);
        }
    }
    let mut good: Vec<bool> = (0..m).map(|id| pa.is_singleton(id)).collect();
    let mut queue: VecDeque<usize> = (0..m).filter(|&id| good[id]).collect();
    while let Some(id) = queue.pop_front() {
        for &p in &preds[id] {
            if !good[p] {
                good[p] = true;
                queue.push_back(p);
            }
        }
    }
    Ok(good.into_iter().all(|g| g))
}

/// Shortest word merging `p` and `q`, ties broken lexicographically.
fn shortest_merge(pa: &PairAutomaton, p: StateId, q: StateId) -> Option<Word> {
    let start = pa.index(p, q);
    let mut parent: Vec<Option<(usize, Symbol)>> = vec![None; pa.n_states()];
    let mut seen = vec![false; pa.n_states()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(id) = queue.pop_front() {
        if pa.is_singleton(id) {
            let mut word = Vec::new();
            let mut cur = id;
            while let Some((prev, x)) = parent[cur] {
                word.push(x);
                cur = prev;
            }
            word.reverse();
            return Some(word.into());
        }
        for x in pa.base().alphabet().symbols() {
            let next = pa.step(id, x);
            if !seen[next] {
                seen[next] = true;
                parent[next] = Some((id, x));
                queue.push_back(next);
            }
        }
    }
    None
}

/// Greedy pair-merging: while more than one state is active, merge the two
/// lowest active states with a shortest merging word. The result is verified
/// before it is returned and has length at most `|Q|³`.
pub fn synchronizing_word(aut: &Automaton) -> Result<Option<SyncWitness>> {
    let pa = PairAutomaton::new(aut)?;
    let mut active = aut.all_states();
    let mut word = Word::empty();
    while active.len() > 1 {
        let (p, q) = {
            let mut it = active.iter();
            (it.next().unwrap(), it.next().unwrap())
        };
        let Some(merge) = shortest_merge(&pa, p, q) else {
            return Ok(None);
        };
        active = aut.step(&active, &merge);
        word.extend_from(&merge);
    }
    let image = aut.step(&aut.all_states(), &word);
    let sink = image
        .single()
        .expect("greedy synchronization produced a non-synchronizing word");
    Ok(Some(SyncWitness { word, sink }))
}

/// DFA over pair states accepting exactly the words that merge `p` and `q`.
/// States are the pairs in index order; the initial state is `{p, q}` and the
/// finals are the singletons.
pub fn pair_merge_language(aut: &Automaton, p: StateId, q: StateId) -> Result<Automaton> {
    let pa = PairAutomaton::new(aut)?;
    if p >= aut.n_states() || q >= aut.n_states() {
        return Err(Error::DanglingState(format!("#{}", p.max(q))));
    }
    let m = pa.n_states();
    let names = (0..m)
        .map(|id| {
            let (i, j) = pa.pair(id);
            if i == j {
                aut.state_name(i).to_string()
            } else {
                format!("{}+{}", aut.state_name(i), aut.state_name(j))
            }
        })
        .collect();
    let trans: Vec<_> = (0..m)
        .flat_map(|id| aut.alphabet().symbols().map(move |x| (id, x)))
        .map(|(id, x)| (id, x, pa.step(id, x)))
        .collect();
    let finals: Vec<_> = (0..m).filter(|&id| pa.is_singleton(id)).collect();
    Automaton::new(
        Kind::Dcsa,
        aut.alphabet().clone(),
        names,
        Some(pa.index(p, q)),
        finals,
        trans,
    )
}
