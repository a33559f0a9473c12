//! Polycyclic automata: recognition, cycle words, the start-state normal form
//! and the closure constructions for polycyclic languages.
//!
//! A deterministic automaton is polycyclic when the words labelling loops at
//! any state `p` are all powers of one word `u_p`. Structurally this holds
//! exactly when every strongly connected component is a single cycle (or a
//! lone state without a self-loop), which is what [`is_polycyclic`] checks.

use std::collections::{BTreeMap, HashSet};

use crate::alphabet::{Alphabet, Word};
use crate::automaton::{default_names, Automaton, Kind, StateId};
use crate::error::{Error, Result};
use crate::ops;
use crate::scc::{scc, SccDecomposition};
use crate::stateset::StateSet;

fn require_deterministic(aut: &Automaton) -> Result<()> {
    if aut.kind() == Kind::Nfa || !aut.is_deterministic() {
        Err(Error::KindViolation(
            "expected a deterministic automaton (pdfa or dcsa)".into(),
        ))
    } else {
        Ok(())
    }
}

/// True iff every strongly connected component is a single cycle or trivial.
pub fn is_polycyclic(aut: &Automaton) -> Result<bool> {
    require_deterministic(aut)?;
    Ok(scc(aut).all_single_cycles())
}

fn require_polycyclic(aut: &Automaton) -> Result<()> {
    if is_polycyclic(aut)? {
        Ok(())
    } else {
        Err(Error::NotPolycyclic)
    }
}

/// Loop structure at an on-cycle state `p`: loops at `p` are exactly
/// `{cycle_word^loop_exponent}*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleInfo {
    pub state: StateId,
    pub cycle_word: Word,
    pub loop_exponent: usize,
}

impl CycleInfo {
    /// The shortest nonempty loop at `state`.
    pub fn generator(&self) -> Word {
        self.cycle_word.pow(self.loop_exponent)
    }
}

/// A polycyclic automaton together with its condensation and cycle words.
#[derive(Debug, Clone)]
pub struct PolycyclicSkeleton {
    pub base: Automaton,
    pub scc: SccDecomposition,
    pub cycle_info: BTreeMap<StateId, CycleInfo>,
    /// Whether the initial state lies on no cycle.
    pub start_unfolded: bool,
}

impl PolycyclicSkeleton {
    pub fn cycle(&self, p: StateId) -> Option<&CycleInfo> {
        self.cycle_info.get(&p)
    }

    /// `u_p^{n_p}` for on-cycle states, `None` otherwise.
    pub fn generator(&self, p: StateId) -> Option<Word> {
        self.cycle_info.get(&p).map(CycleInfo::generator)
    }
}

/// Reads the cycle word of every on-cycle state, starting at that state.
pub fn skeleton(aut: &Automaton) -> Result<PolycyclicSkeleton> {
    require_polycyclic(aut)?;
    let decomposition = scc(aut);
    let mut cycle_info = BTreeMap::new();
    for q in aut.states() {
        if !decomposition.on_cycle(q) {
            continue;
        }
        let c = decomposition.component_of(q);
        let inner = |p: StateId| {
            aut.alphabet()
                .symbols()
                .find_map(|x| {
                    aut.next(p, x)
                        .filter(|&r| decomposition.component_of(r) == c)
                        .map(|r| (x, r))
                })
                .expect("single-cycle component without an inner edge")
        };
        let mut word = Word::empty();
        let mut p = q;
        loop {
            let (x, r) = inner(p);
            word.push(x);
            p = r;
            if p == q {
                break;
            }
        }
        cycle_info.insert(
            q,
            CycleInfo {
                state: q,
                cycle_word: word,
                loop_exponent: 1,
            },
        );
    }
    let start_unfolded = aut
        .initial()
        .is_none_or(|q0| !decomposition.on_cycle(q0));
    Ok(PolycyclicSkeleton {
        base: aut.clone(),
        scc: decomposition,
        cycle_info,
        start_unfolded,
    })
}

fn fresh(taken: &HashSet<String>, base: &str) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// Equivalent polycyclic automaton whose initial state lies on no cycle.
///
/// When the start state is on a cycle a fresh start state copying its
/// outgoing transitions and finality is added; otherwise the input is
/// returned unchanged.
pub fn unfold_start(aut: &Automaton) -> Result<Automaton> {
    require_polycyclic(aut)?;
    let q0 = aut.require_initial()?;
    if !scc(aut).on_cycle(q0) {
        return Ok(aut.clone());
    }
    let n = aut.n_states();
    let taken: HashSet<String> = aut.state_names().iter().cloned().collect();
    let mut names = aut.state_names().to_vec();
    names.push(fresh(&taken, &format!("{}0", aut.state_name(q0))));
    let mut trans: Vec<_> = aut.transitions().collect();
    for x in aut.alphabet().symbols() {
        if let Some(p) = aut.next(q0, x) {
            trans.push((n, x, p));
        }
    }
    let mut finals: Vec<_> = aut.finals().iter().collect();
    if aut.is_final(q0) {
        finals.push(n);
    }
    Automaton::new(
        aut.kind(),
        aut.alphabet().clone(),
        names,
        Some(n),
        finals,
        trans,
    )
}

/// Removes the empty subset from a subset-construction result. The empty
/// subset is a sink with a self-loop on every symbol, which is never part of
/// the loop structure of the underlying automaton.
fn drop_empty_subset(dfa: &Automaton, subsets: &[StateSet]) -> Result<Automaton> {
    let keep = StateSet::from_states(
        dfa.n_states(),
        (0..subsets.len()).filter(|&i| !subsets[i].is_empty()),
    );
    let out = ops::restrict(dfa, &keep)?;
    if out.kind() == Kind::Dcsa {
        Ok(out)
    } else {
        out.with_kind(Kind::Pdfa)
    }
}

/// Deterministic automaton for `L(nfa)`: the subset construction restricted
/// to nonempty reachable subsets.
pub fn determinize_nonempty(nfa: &Automaton) -> Result<Automaton> {
    let (dfa, subsets) = ops::determinize_with_subsets(nfa)?;
    drop_empty_subset(&dfa, &subsets)
}

/// Whether every loop language of the reachable part of `nfa` lies in the
/// powers of a single word, decided on the subset automaton.
pub fn nfa_loop_condition(nfa: &Automaton) -> Result<bool> {
    is_polycyclic(&determinize_nonempty(nfa)?)
}

fn finish(candidate: Automaton) -> Result<Automaton> {
    let out = if candidate.is_deterministic() {
        let kind = if candidate.is_complete() { Kind::Dcsa } else { Kind::Pdfa };
        ops::trim_accessible(&candidate.with_kind(kind)?)?
    } else {
        determinize_nonempty(&candidate)?
    };
    Ok(out)
}

/// Complement: complete with a non-final trap, then swap final and
/// non-final states.
///
/// Over a unary alphabet the result is again polycyclic. Over larger
/// alphabets it never is: any complete automaton has a bottom component in
/// which every state keeps all of its transitions.
pub fn complement_pc(aut: &Automaton) -> Result<Automaton> {
    require_polycyclic(aut)?;
    aut.require_initial()?;
    ops::trim_accessible(&ops::complement(&ops::complete(aut)?)?)
}

fn renamed_apart(b1: &Automaton, b2: &Automaton) -> Vec<String> {
    let taken: HashSet<String> = b1.state_names().iter().cloned().collect();
    let mut used = taken.clone();
    b2.state_names()
        .iter()
        .map(|n| {
            let name = fresh(&used, n);
            used.insert(name.clone());
            name
        })
        .collect()
}

/// Union by merging unfolded start states.
///
/// With both starts off every cycle, `b2`'s start is identified with `b1`'s
/// start. The merge is determinized only when it introduced nondeterminism.
pub fn union_pc(b1: &Automaton, b2: &Automaton) -> Result<Automaton> {
    b1.same_alphabet(b2)?;
    let b1 = ops::trim_accessible(&unfold_start(b1)?)?;
    let b2 = ops::trim_accessible(&unfold_start(b2)?)?;
    let (p0, r0) = (b1.require_initial()?, b2.require_initial()?);
    let n1 = b1.n_states();
    // b2's states except its start go after b1's
    let mut map = vec![None; b2.n_states()];
    let mut names = b1.state_names().to_vec();
    let b2_names = renamed_apart(&b1, &b2);
    for r in b2.states().filter(|&r| r != r0) {
        map[r] = Some(names.len());
        names.push(b2_names[r].clone());
    }
    map[r0] = Some(p0);
    let m = |r: StateId| map[r].expect("mapped state");

    let mut trans: Vec<_> = b1.transitions().collect();
    trans.extend(b2.transitions().map(|(r, x, s)| (m(r), x, m(s))));
    let mut finals: Vec<_> = b1.finals().iter().collect();
    finals.extend(b2.finals().iter().map(m));
    let kind = Kind::Nfa;
    let merged = Automaton::new(kind, b1.alphabet().clone(), names, Some(p0), finals, trans)?;
    debug_assert!(n1 <= merged.n_states());
    finish(merged)
}

/// Intersection via the product automaton restricted to reachable pairs.
pub fn intersection_pc(b1: &Automaton, b2: &Automaton) -> Result<Automaton> {
    require_polycyclic(b1)?;
    require_polycyclic(b2)?;
    let product = ops::product_intersection(b1, b2)?;
    let names = product
        .states()
        .map(|i| format!("x{i}"))
        .collect::<Vec<_>>();
    let renamed = Automaton::new(
        product.kind(),
        product.alphabet().clone(),
        names,
        product.initial(),
        product.finals().iter().collect::<Vec<_>>(),
        product.transitions().collect::<Vec<_>>(),
    )?;
    finish(renamed)
}

/// Left quotient `u⁻¹L`: move the initial state along `u`. When the run of
/// `u` is undefined the result accepts nothing.
pub fn quotient_pc(aut: &Automaton, u: &[crate::alphabet::Symbol]) -> Result<Automaton> {
    require_polycyclic(aut)?;
    let q0 = aut.require_initial()?;
    match aut.run(q0, u) {
        Some(q) => finish(aut.with_initial(Some(q))?),
        None => empty_language(aut.alphabet()),
    }
}

/// Concatenation: unfold `b2`'s start, then let every final state of `b1`
/// continue with the outgoing transitions of that start.
pub fn concat_pc(b1: &Automaton, b2: &Automaton) -> Result<Automaton> {
    b1.same_alphabet(b2)?;
    require_polycyclic(b1)?;
    let b1 = ops::trim_accessible(b1)?;
    let b2 = ops::trim_accessible(&unfold_start(b2)?)?;
    let r0 = b2.require_initial()?;
    let mut map = vec![None; b2.n_states()];
    let mut names = b1.state_names().to_vec();
    let b2_names = renamed_apart(&b1, &b2);
    for r in b2.states().filter(|&r| r != r0) {
        map[r] = Some(names.len());
        names.push(b2_names[r].clone());
    }
    let m = |r: StateId| map[r].expect("start of the second operand has no incoming edges");

    let mut trans: Vec<_> = b1.transitions().collect();
    for (r, x, s) in b2.transitions() {
        if r == r0 {
            for pf in b1.finals().iter() {
                trans.push((pf, x, m(s)));
            }
        } else {
            trans.push((m(r), x, m(s)));
        }
    }
    let mut finals: Vec<_> = b2.finals().iter().filter(|&r| r != r0).map(m).collect();
    if b2.is_final(r0) {
        finals.extend(b1.finals().iter());
    }
    let nfa = Automaton::new(
        Kind::Nfa,
        b1.alphabet().clone(),
        names,
        b1.initial(),
        finals,
        trans,
    )?;
    finish(nfa)
}

/// One-state automaton accepting nothing.
pub fn empty_language(alphabet: &Alphabet) -> Result<Automaton> {
    Automaton::new(Kind::Pdfa, alphabet.clone(), default_names(1), Some(0), [], [])
}

/// Chain automaton accepting exactly `{word}`.
pub fn word_automaton(alphabet: &Alphabet, word: &[crate::alphabet::Symbol]) -> Result<Automaton> {
    let n = word.len() + 1;
    Automaton::new(
        Kind::Pdfa,
        alphabet.clone(),
        default_names(n),
        Some(0),
        [word.len()],
        word.iter()
            .enumerate()
            .map(|(i, &x)| (i, x, i + 1))
            .collect::<Vec<_>>(),
    )
}

/// Cycle automaton accepting `word*`; `ε*` is `{ε}`.
pub fn star_automaton(alphabet: &Alphabet, word: &[crate::alphabet::Symbol]) -> Result<Automaton> {
    let n = word.len().max(1);
    Automaton::new(
        Kind::Pdfa,
        alphabet.clone(),
        default_names(n),
        Some(0),
        [0],
        word.iter()
            .enumerate()
            .map(|(i, &x)| (i, x, (i + 1) % n))
            .collect::<Vec<_>>(),
    )
}

/// Shortest `r` with `word = r^k`.
pub fn primitive_root(word: &[crate::alphabet::Symbol]) -> Word {
    let n = word.len();
    (1..=n)
        .filter(|d| n.is_multiple_of(*d))
        .find(|&d| word.chunks(d).all(|c| c == &word[..d]))
        .map_or_else(Word::empty, |d| Word::from(&word[..d]))
}

/// A word `w` with every input in `w*`, if one exists.
///
/// Two words commute exactly when they are powers of a common word, so the
/// inputs must commute pairwise; the answer is then their common primitive
/// root. Empty inputs are ignored; if nothing nonempty remains the answer is
/// the empty word.
pub fn subset_of_single_word_powers(words: &[Word]) -> Option<Word> {
    let nonempty: Vec<&Word> = words.iter().filter(|w| !w.is_empty()).collect();
    let Some(first) = nonempty.first() else {
        return Some(Word::empty());
    };
    for (i, x) in nonempty.iter().enumerate() {
        for y in &nonempty[i + 1..] {
            if x.concat(y) != y.concat(x) {
                return None;
            }
        }
    }
    Some(primitive_root(first))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::words_up_to;
    use crate::format::parse_automaton;

    const LOOP3: &str = "kind: pdfa\nalphabet: a b\nstates: q1 q2 q3 q4 q5 q6\ninitial: q1\nfinal: q6\n\
        trans: q1 b q2\ntrans: q2 a q3\ntrans: q3 a q4\ntrans: q3 b q6\ntrans: q4 b q5\ntrans: q5 a q3\n";
    const BAB: &str = "kind: pdfa\nalphabet: a b\nstates: q1 q2 q3\ninitial: q1\nfinal: q3\n\
        trans: q1 b q2\ntrans: q2 a q2\ntrans: q2 b q3\n";

    fn ab() -> Alphabet {
        Alphabet::from_chars("ab").unwrap()
    }

    fn agree(a: &Automaton, lang: impl Fn(&Word) -> bool, max_len: usize) {
        for w in words_up_to(a.alphabet().len(), max_len) {
            assert_eq!(a.accepts(&w), lang(&w), "word {}", a.alphabet().format_word(&w));
        }
    }

    fn is_ba_star_b(w: &Word) -> bool {
        w.len() >= 2 && w[0] == 1 && w[w.len() - 1] == 1 && w[1..w.len() - 1].iter().all(|&x| x == 0)
    }

    #[test]
    fn recognition() {
        assert!(is_polycyclic(&parse_automaton(LOOP3).unwrap()).unwrap());
        assert!(is_polycyclic(&parse_automaton(BAB).unwrap()).unwrap());
        let all = Automaton::dcsa_from_fn(ab(), 1, Some(0), [0], |_, _| 0).unwrap();
        assert!(!is_polycyclic(&all).unwrap());
    }

    #[test]
    fn cycle_words() {
        let loop3 = skeleton(&parse_automaton(LOOP3).unwrap()).unwrap();
        assert_eq!(ab().format_word(&loop3.cycle(2).unwrap().cycle_word), "aba");
        assert_eq!(ab().format_word(&loop3.cycle(3).unwrap().cycle_word), "baa");
        assert!(loop3.start_unfolded);
        assert_eq!(loop3.cycle_info.len(), 3);
        let bab = skeleton(&parse_automaton(BAB).unwrap()).unwrap();
        assert_eq!(ab().format_word(&bab.cycle(1).unwrap().cycle_word), "a");
        let chain = word_automaton(&ab(), &[0, 1]).unwrap();
        assert!(skeleton(&chain).unwrap().cycle_info.is_empty());
        let all = Automaton::dcsa_from_fn(ab(), 1, Some(0), [0], |_, _| 0).unwrap();
        assert!(matches!(skeleton(&all), Err(Error::NotPolycyclic)));
    }

    #[test]
    fn unfolding() {
        let loop3 = parse_automaton(LOOP3).unwrap();
        assert_eq!(unfold_start(&loop3).unwrap(), loop3);
        let a = Alphabet::from_chars("a").unwrap();
        let loop1 = star_automaton(&a, &[0]).unwrap();
        let unfolded = unfold_start(&loop1).unwrap();
        assert_eq!(unfolded.n_states(), 2);
        assert!(skeleton(&unfolded).unwrap().start_unfolded);
        agree(&unfolded, |_| true, 6);
    }

    #[test]
    fn loop_condition() {
        assert!(nfa_loop_condition(&parse_automaton(LOOP3).unwrap().with_kind(Kind::Nfa).unwrap()).unwrap());
        let two_loops = Automaton::new(
            Kind::Nfa,
            ab(),
            default_names(1),
            Some(0),
            [0],
            [(0, 0, 0), (0, 1, 0)],
        )
        .unwrap();
        assert!(!nfa_loop_condition(&two_loops).unwrap());
    }

    #[test]
    fn complement_flips_membership() {
        let bab = parse_automaton(BAB).unwrap();
        let c = complement_pc(&bab).unwrap();
        agree(&c, |w| !is_ba_star_b(w), 6);
        // the complement contains aΣ*, so no polycyclic automaton accepts it
        assert!(!is_polycyclic(&c).unwrap());
        let a = Alphabet::from_chars("a").unwrap();
        let unary = complement_pc(&star_automaton(&a, &[0, 0]).unwrap()).unwrap();
        assert!(is_polycyclic(&unary).unwrap());
        agree(&unary, |w| w.len() % 2 == 1, 8);
    }

    #[test]
    fn union_of_generators() {
        let bab = parse_automaton(BAB).unwrap();
        let aba = parse_automaton(&BAB.replace("q1 b", "q1 a").replace("q2 a", "q2 b").replace("q2 b q3", "q2 a q3"))
            .unwrap();
        let u = union_pc(&bab, &aba).unwrap();
        assert!(is_polycyclic(&u).unwrap());
        let is_ab_star_a = |w: &Word| {
            w.len() >= 2 && w[0] == 0 && w[w.len() - 1] == 0 && w[1..w.len() - 1].iter().all(|&x| x == 1)
        };
        agree(&u, |w| is_ba_star_b(w) || is_ab_star_a(w), 6);
    }

    #[test]
    fn quotient_moves_the_start() {
        let bab = parse_automaton(BAB).unwrap();
        let q = quotient_pc(&bab, &[1]).unwrap();
        agree(&q, |w| !w.is_empty() && w[w.len() - 1] == 1 && w[..w.len() - 1].iter().all(|&x| x == 0), 6);
        let dead = quotient_pc(&bab, &[0]).unwrap();
        assert!(ops::is_empty(&dead).unwrap());
    }

    #[test]
    fn concat_rebuilds_ba_star_b() {
        let b = word_automaton(&ab(), &[1]).unwrap();
        let a_star = star_automaton(&ab(), &[0]).unwrap();
        let ba = concat_pc(&b, &a_star).unwrap();
        let bab = concat_pc(&ba, &b).unwrap();
        assert!(is_polycyclic(&bab).unwrap());
        agree(&bab, is_ba_star_b, 6);
        let eps = word_automaton(&ab(), &[]).unwrap();
        agree(&concat_pc(&bab, &eps).unwrap(), is_ba_star_b, 6);
        agree(&concat_pc(&eps, &bab).unwrap(), is_ba_star_b, 6);
    }

    #[test]
    fn common_roots() {
        let w = |s: &str| ab().parse_word(s).unwrap();
        let show = |o: Option<Word>| o.map(|w| ab().format_word(&w));
        assert_eq!(show(subset_of_single_word_powers(&[w("ab"), w("abab")])), Some("ab".into()));
        assert_eq!(show(subset_of_single_word_powers(&[w("a"), w("b")])), None);
        assert_eq!(show(subset_of_single_word_powers(&[w("abab"), w("ababab")])), Some("ab".into()));
        assert_eq!(primitive_root(&w("abaaba")).to_vec(), w("aba").to_vec());
    }
}
