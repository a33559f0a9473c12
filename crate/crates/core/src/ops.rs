//! Standard regular-language constructions: trimming, completion, subset
//! construction, complement, product, emptiness, inclusion and the
//! prefix/suffix/factor closures.

use std::collections::{HashMap, VecDeque};

use crate::alphabet::{Symbol, Word};
use crate::automaton::{default_names, Automaton, Kind, StateId};
use crate::error::{Error, Result};
use crate::stateset::StateSet;

/// States reachable from `from`.
pub fn reachable_from(aut: &Automaton, from: &StateSet) -> StateSet {
    let mut seen = from.clone();
    let mut queue: VecDeque<StateId> = from.iter().collect();
    while let Some(q) = queue.pop_front() {
        for x in aut.alphabet().symbols() {
            for &p in aut.successors(q, x) {
                if !seen.contains(p) {
                    seen.insert(p);
                    queue.push_back(p);
                }
            }
        }
    }
    seen
}

/// States reachable from the initial state.
pub fn accessible(aut: &Automaton) -> Result<StateSet> {
    let q0 = aut.require_initial()?;
    Ok(reachable_from(aut, &StateSet::singleton(aut.n_states(), q0)))
}

/// States from which some final state is reachable.
pub fn coaccessible(aut: &Automaton) -> StateSet {
    let n = aut.n_states();
    let mut preds = vec![Vec::new(); n];
    for (p, _, q) in aut.transitions() {
        preds[q].push(p);
    }
    let mut seen = aut.finals();
    let mut queue: VecDeque<StateId> = seen.iter().collect();
    while let Some(q) = queue.pop_front() {
        for &p in &preds[q] {
            if !seen.contains(p) {
                seen.insert(p);
                queue.push_back(p);
            }
        }
    }
    seen
}

fn kind_for(base: Kind, aut_det: bool, aut_complete: bool) -> Kind {
    match (base, aut_det, aut_complete) {
        (Kind::Nfa, ..) | (_, false, _) => Kind::Nfa,
        (Kind::Dcsa, true, true) => Kind::Dcsa,
        _ => Kind::Pdfa,
    }
}

/// Sub-automaton induced by `keep`, states renumbered in id order. The kind
/// degrades from `dcsa` to `pdfa` when cells become undefined.
pub fn restrict(aut: &Automaton, keep: &StateSet) -> Result<Automaton> {
    let mut new_id = vec![None; aut.n_states()];
    let mut names = Vec::new();
    for q in keep.iter() {
        new_id[q] = Some(names.len());
        names.push(aut.state_name(q).to_string());
    }
    let trans: Vec<_> = aut
        .transitions()
        .filter_map(|(p, x, q)| Some((new_id[p]?, x, new_id[q]?)))
        .collect();
    let initial = aut.initial().and_then(|q| new_id[q]);
    let finals: Vec<_> = aut.finals().iter().filter_map(|q| new_id[q]).collect();
    let k = aut.alphabet().len();
    let mut counts = vec![0usize; names.len() * k];
    for &(p, x, _) in &trans {
        counts[p * k + x] += 1;
    }
    let det = counts.iter().all(|&c| c <= 1);
    let complete = counts.iter().all(|&c| c == 1);
    let kind = kind_for(aut.kind(), det, complete);
    if kind != Kind::Dcsa && initial.is_none() {
        return Err(Error::MissingInitial);
    }
    Automaton::new(kind, aut.alphabet().clone(), names, initial, finals, trans)
}

/// Restriction to the states reachable from the initial state.
pub fn trim_accessible(aut: &Automaton) -> Result<Automaton> {
    restrict(aut, &accessible(aut)?)
}

/// Restriction to states that are both accessible and co-accessible. An empty
/// language yields the one-state automaton without transitions or finals.
pub fn trim(aut: &Automaton) -> Result<Automaton> {
    let q0 = aut.require_initial()?;
    let mut keep = accessible(aut)?;
    let live = coaccessible(aut);
    for q in aut.states() {
        if !live.contains(q) {
            keep.remove(q);
        }
    }
    if !keep.contains(q0) {
        let kind = if aut.kind() == Kind::Nfa { Kind::Nfa } else { Kind::Pdfa };
        return Automaton::new(
            kind,
            aut.alphabet().clone(),
            vec![aut.state_name(q0).to_string()],
            Some(0),
            [],
            [],
        );
    }
    restrict(aut, &keep)
}

fn fresh_name(aut: &Automaton, base: &str) -> String {
    if aut.state_id(base).is_none() {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|n| aut.state_id(n).is_none())
        .expect("unbounded name supply")
}

/// Completes a deterministic automaton with one fresh non-final trap state
/// when some cell is undefined. The result has kind `dcsa`.
pub fn complete(aut: &Automaton) -> Result<Automaton> {
    if !aut.is_deterministic() {
        return Err(Error::KindViolation(
            "completion needs a deterministic automaton".into(),
        ));
    }
    if aut.is_complete() {
        return aut.with_kind(Kind::Dcsa);
    }
    let n = aut.n_states();
    let mut names = aut.state_names().to_vec();
    names.push(fresh_name(aut, "trap"));
    let trans = (0..=n).flat_map(|q| {
        aut.alphabet().symbols().map(move |x| {
            let p = if q == n { n } else { aut.next(q, x).unwrap_or(n) };
            (q, x, p)
        })
    });
    Automaton::new(
        Kind::Dcsa,
        aut.alphabet().clone(),
        names,
        aut.initial(),
        aut.finals().iter().collect::<Vec<_>>(),
        trans.collect::<Vec<_>>(),
    )
}

/// Subset construction over the subsets reachable from `{initial}`.
///
/// Returns the complete DFA (kind `dcsa` with initial state and finals)
/// together with the subset each new state stands for. New states are named
/// `d0, d1, …` in breadth-first discovery order, symbols explored in id order.
/// The empty subset appears when it is reachable.
pub fn determinize_with_subsets(aut: &Automaton) -> Result<(Automaton, Vec<StateSet>)> {
    let q0 = aut.require_initial()?;
    let start = StateSet::singleton(aut.n_states(), q0);
    let mut index: HashMap<StateSet, usize> = HashMap::new();
    let mut subsets = vec![start.clone()];
    index.insert(start, 0);
    let mut trans = Vec::new();
    let mut i = 0;
    while i < subsets.len() {
        for x in aut.alphabet().symbols() {
            let next = aut.step_symbol(&subsets[i], x);
            let j = match index.get(&next) {
                Some(&j) => j,
                None => {
                    let j = subsets.len();
                    index.insert(next.clone(), j);
                    subsets.push(next);
                    j
                }
            };
            trans.push((i, x, j));
        }
        i += 1;
    }
    let finals: Vec<_> = subsets
        .iter()
        .enumerate()
        .filter(|(_, s)| s.iter().any(|q| aut.is_final(q)))
        .map(|(i, _)| i)
        .collect();
    let names = (0..subsets.len()).map(|i| format!("d{i}")).collect();
    let dfa = Automaton::new(
        Kind::Dcsa,
        aut.alphabet().clone(),
        names,
        Some(0),
        finals,
        trans,
    )?;
    Ok((dfa, subsets))
}

pub fn determinize(aut: &Automaton) -> Result<Automaton> {
    determinize_with_subsets(aut).map(|(dfa, _)| dfa)
}

/// Complement of a complete deterministic automaton with an initial state.
pub fn complement(dfa: &Automaton) -> Result<Automaton> {
    dfa.require_initial()?;
    if !dfa.is_complete() {
        return Err(Error::KindViolation(
            "complement needs a complete deterministic automaton".into(),
        ));
    }
    let finals: Vec<_> = dfa.states().filter(|&q| !dfa.is_final(q)).collect();
    Ok(dfa.with_kind(Kind::Dcsa)?.with_finals(finals))
}

/// Product over the reachable pairs; accepts `L(a1) ∩ L(a2)`.
pub fn product_intersection(a1: &Automaton, a2: &Automaton) -> Result<Automaton> {
    a1.same_alphabet(a2)?;
    let start = (a1.require_initial()?, a2.require_initial()?);
    let mut index = HashMap::new();
    let mut pairs = vec![start];
    index.insert(start, 0usize);
    let mut trans = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (p, q) = pairs[i];
        for x in a1.alphabet().symbols() {
            for &p2 in a1.successors(p, x) {
                for &q2 in a2.successors(q, x) {
                    let j = *index.entry((p2, q2)).or_insert_with(|| {
                        pairs.push((p2, q2));
                        pairs.len() - 1
                    });
                    trans.push((i, x, j));
                }
            }
        }
        i += 1;
    }
    let finals: Vec<_> = pairs
        .iter()
        .enumerate()
        .filter(|(_, &(p, q))| a1.is_final(p) && a2.is_final(q))
        .map(|(i, _)| i)
        .collect();
    let kind = match (a1.kind(), a2.kind()) {
        (Kind::Nfa, _) | (_, Kind::Nfa) => Kind::Nfa,
        (Kind::Dcsa, Kind::Dcsa) => Kind::Dcsa,
        _ => Kind::Pdfa,
    };
    Automaton::new(
        kind,
        a1.alphabet().clone(),
        default_names(pairs.len()),
        Some(0),
        finals,
        trans,
    )
}

/// True iff no final state is reachable from the initial state.
pub fn is_empty(aut: &Automaton) -> Result<bool> {
    let reach = accessible(aut)?;
    let hit = reach.iter().any(|q| aut.is_final(q));
    Ok(!hit)
}

/// Decides `L(sub) ⊆ L(sup)` through the product of `sub` with the
/// complement of the determinized `sup`.
pub fn includes(sup: &Automaton, sub: &Automaton) -> Result<bool> {
    sup.same_alphabet(sub)?;
    let comp = complement(&determinize(sup)?)?;
    is_empty(&product_intersection(sub, &comp)?)
}

/// A shortest accepted word, ties broken towards smaller symbols along the
/// breadth-first tree.
pub fn shortest_accepted(aut: &Automaton) -> Result<Option<Word>> {
    let q0 = aut.require_initial()?;
    let mut parent: Vec<Option<(StateId, Symbol)>> = vec![None; aut.n_states()];
    let mut seen = StateSet::singleton(aut.n_states(), q0);
    let mut queue = VecDeque::from([q0]);
    while let Some(q) = queue.pop_front() {
        if aut.is_final(q) {
            let mut word = Vec::new();
            let mut cur = q;
            while let Some((p, x)) = parent[cur] {
                word.push(x);
                cur = p;
            }
            word.reverse();
            return Ok(Some(word.into()));
        }
        for x in aut.alphabet().symbols() {
            for &p in aut.successors(q, x) {
                if !seen.contains(p) {
                    seen.insert(p);
                    parent[p] = Some((q, x));
                    queue.push_back(p);
                }
            }
        }
    }
    Ok(None)
}

/// Which closure [`closure_automaton`] builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureMode {
    Prefix,
    Suffix,
    Factor,
}

/// Automaton for the prefixes, suffixes or factors of `L(aut)`.
///
/// Prefix closure keeps the structure and makes every co-accessible state
/// final. Suffix closure adds a fresh initial state carrying the outgoing
/// transitions of every accessible state (an NFA in general). Factor closure
/// is the suffix closure of the prefix closure.
pub fn closure_automaton(aut: &Automaton, mode: ClosureMode) -> Result<Automaton> {
    match mode {
        ClosureMode::Prefix => {
            aut.require_initial()?;
            let live: Vec<_> = coaccessible(aut).iter().collect();
            Ok(aut.with_finals(live))
        }
        ClosureMode::Suffix => {
            let reach = accessible(aut)?;
            let n = aut.n_states();
            let mut names = aut.state_names().to_vec();
            names.push(fresh_name(aut, "start"));
            let mut trans: Vec<_> = aut.transitions().collect();
            for q in reach.iter() {
                for x in aut.alphabet().symbols() {
                    trans.extend(aut.successors(q, x).iter().map(|&p| (n, x, p)));
                }
            }
            let mut finals: Vec<_> = aut.finals().iter().collect();
            if reach.iter().any(|q| aut.is_final(q)) {
                finals.push(n);
            }
            Automaton::new(
                Kind::Nfa,
                aut.alphabet().clone(),
                names,
                Some(n),
                finals,
                trans,
            )
        }
        ClosureMode::Factor => {
            let prefix = closure_automaton(aut, ClosureMode::Prefix)?;
            closure_automaton(&prefix, ClosureMode::Suffix)
        }
    }
}
