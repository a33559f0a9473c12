//! The unified automaton representation.

use std::collections::HashSet;
use std::fmt;

use crate::alphabet::{check_token, Alphabet, Symbol};
use crate::error::{Error, Result};
use crate::stateset::StateSet;

/// Dense state index, `0..n_states`.
pub type StateId = usize;

/// Declared determinism class of an [`Automaton`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    /// Deterministic complete semi-automaton: exactly one successor per cell.
    /// The initial state is optional.
    Dcsa,
    /// Partial deterministic automaton: at most one successor per cell.
    Pdfa,
    /// Nondeterministic automaton.
    Nfa,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Dcsa => "dcsa",
            Kind::Pdfa => "pdfa",
            Kind::Nfa => "nfa",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A finite automaton over an [`Alphabet`] with a dense transition table.
///
/// Each `(state, symbol)` cell holds a sorted, duplicate-free successor list.
/// The declared [`Kind`] is validated on construction and never changes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    kind: Kind,
    alphabet: Alphabet,
    names: Vec<String>,
    succ: Vec<Vec<StateId>>,
    initial: Option<StateId>,
    finals: Vec<bool>,
}

/// Names `q0, q1, …` used when automata are built programmatically.
pub fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("q{i}")).collect()
}

impl Automaton {
    /// Builds and validates an automaton of the declared kind.
    pub fn new<F, T>(
        kind: Kind,
        alphabet: Alphabet,
        names: Vec<String>,
        initial: Option<StateId>,
        finals: F,
        transitions: T,
    ) -> Result<Self>
    where
        F: IntoIterator<Item = StateId>,
        T: IntoIterator<Item = (StateId, Symbol, StateId)>,
    {
        let n = names.len();
        let k = alphabet.len();
        let mut seen = HashSet::with_capacity(n);
        for name in &names {
            check_token(name).map_err(Error::KindViolation)?;
            if !seen.insert(name.as_str()) {
                return Err(Error::KindViolation(format!("duplicate state `{name}`")));
            }
        }
        let check_state = |q: StateId| {
            if q < n {
                Ok(q)
            } else {
                Err(Error::DanglingState(format!("#{q}")))
            }
        };
        if let Some(q) = initial {
            check_state(q)?;
        }
        let mut fin = vec![false; n];
        for q in finals {
            fin[check_state(q)?] = true;
        }
        let mut succ = vec![Vec::new(); n * k];
        for (p, x, q) in transitions {
            check_state(p)?;
            check_state(q)?;
            if x >= k {
                return Err(Error::UnknownSymbol(format!("#{x}")));
            }
            let cell: &mut Vec<StateId> = &mut succ[p * k + x];
            if let Err(pos) = cell.binary_search(&q) {
                cell.insert(pos, q);
            }
        }
        let aut = Automaton {
            kind,
            alphabet,
            names,
            succ,
            initial,
            finals: fin,
        };
        aut.validate()?;
        Ok(aut)
    }

    fn validate(&self) -> Result<()> {
        if matches!(self.kind, Kind::Pdfa | Kind::Nfa) && self.initial.is_none() {
            return Err(Error::KindViolation(format!(
                "{} requires an initial state",
                self.kind
            )));
        }
        if self.kind == Kind::Nfa {
            return Ok(());
        }
        for q in self.states() {
            for x in self.alphabet.symbols() {
                let len = self.successors(q, x).len();
                if len > 1 {
                    return Err(Error::KindViolation(format!(
                        "{} successors for ({}, {}) in a {}",
                        len,
                        self.names[q],
                        self.alphabet.name(x),
                        self.kind
                    )));
                }
                if len == 0 && self.kind == Kind::Dcsa {
                    return Err(Error::KindViolation(format!(
                        "missing transition for ({}, {}) in a dcsa",
                        self.names[q],
                        self.alphabet.name(x)
                    )));
                }
            }
        }
        Ok(())
    }

    /// A complete deterministic automaton given by its transition function.
    pub fn dcsa_from_fn(
        alphabet: Alphabet,
        n: usize,
        initial: Option<StateId>,
        finals: impl IntoIterator<Item = StateId>,
        delta: impl Fn(StateId, Symbol) -> StateId,
    ) -> Result<Self> {
        let k = alphabet.len();
        let trans: Vec<_> = (0..n)
            .flat_map(|q| (0..k).map(move |x| (q, x)))
            .map(|(q, x)| (q, x, delta(q, x)))
            .collect();
        Self::new(Kind::Dcsa, alphabet, default_names(n), initial, finals, trans)
    }

    /// Same structure reinterpreted under another kind (revalidated).
    pub fn with_kind(&self, kind: Kind) -> Result<Self> {
        let mut out = self.clone();
        out.kind = kind;
        out.validate()?;
        Ok(out)
    }

    pub fn with_initial(&self, initial: Option<StateId>) -> Result<Self> {
        let mut out = self.clone();
        out.initial = initial;
        out.validate()?;
        Ok(out)
    }

    pub fn with_finals(&self, finals: impl IntoIterator<Item = StateId>) -> Self {
        let mut out = self.clone();
        out.finals = vec![false; self.n_states()];
        for q in finals {
            out.finals[q] = true;
        }
        out
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn n_states(&self) -> usize {
        self.names.len()
    }

    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.names.len()
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.names[q]
    }

    pub fn state_names(&self) -> &[String] {
        &self.names
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn initial(&self) -> Option<StateId> {
        self.initial
    }

    pub fn require_initial(&self) -> Result<StateId> {
        self.initial.ok_or(Error::MissingInitial)
    }

    pub fn is_final(&self, q: StateId) -> bool {
        self.finals[q]
    }

    pub fn finals(&self) -> StateSet {
        StateSet::from_states(self.n_states(), self.states().filter(|&q| self.finals[q]))
    }

    pub fn all_states(&self) -> StateSet {
        StateSet::full(self.n_states())
    }

    pub fn successors(&self, q: StateId, x: Symbol) -> &[StateId] {
        &self.succ[q * self.alphabet.len() + x]
    }

    /// The successor of `q` on `x` when it is unique.
    pub fn next(&self, q: StateId, x: Symbol) -> Option<StateId> {
        match self.successors(q, x) {
            [p] => Some(*p),
            _ => None,
        }
    }

    /// Runs a word from a single state along a deterministic path.
    pub fn run(&self, q: StateId, word: &[Symbol]) -> Option<StateId> {
        word.iter().try_fold(q, |p, &x| self.next(p, x))
    }

    /// All transitions `(source, symbol, target)` in (source, symbol, target) order.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, Symbol, StateId)> + '_ {
        let k = self.alphabet.len();
        self.succ
            .iter()
            .enumerate()
            .flat_map(move |(cell, ts)| ts.iter().map(move |&t| (cell / k, cell % k, t)))
    }

    pub fn is_deterministic(&self) -> bool {
        self.succ.iter().all(|c| c.len() <= 1)
    }

    pub fn is_complete(&self) -> bool {
        self.succ.iter().all(|c| c.len() == 1)
    }

    /// Image of `set` under a single symbol.
    pub fn step_symbol(&self, set: &StateSet, x: Symbol) -> StateSet {
        let mut out = StateSet::empty(self.n_states());
        for q in set.iter() {
            for &p in self.successors(q, x) {
                out.insert(p);
            }
        }
        out
    }

    /// Image of `set` under `word`; empty when every run falls off a partial table.
    pub fn step(&self, set: &StateSet, word: &[Symbol]) -> StateSet {
        word.iter()
            .fold(set.clone(), |s, &x| self.step_symbol(&s, x))
    }

    /// Membership by direct subset simulation from the initial state.
    pub fn accepts(&self, word: &[Symbol]) -> bool {
        let Some(q0) = self.initial else {
            return false;
        };
        let end = self.step(&StateSet::singleton(self.n_states(), q0), word);
        let hit = end.iter().any(|q| self.finals[q]);
        hit
    }

    pub(crate) fn same_alphabet(&self, other: &Automaton) -> Result<()> {
        if self.alphabet == other.alphabet {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch {
                left: self.alphabet.to_string(),
                right: other.alphabet.to_string(),
            })
        }
    }
}
