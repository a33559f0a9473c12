//! Brute-force reference procedures and random generators shared by the
//! integration tests. Nothing here calls the decision procedures under test.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use polysync::alphabet::words_up_to;
use polysync::automaton::default_names;
use polysync::{Alphabet, Automaton, Kind, StateId, Symbol, Word};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn alphabet(k: usize) -> Alphabet {
    Alphabet::from_chars(&"abcdefgh"[..k]).unwrap()
}

pub fn random_dcsa(rng: &mut impl Rng, n: usize, k: usize) -> Automaton {
    let table: Vec<StateId> = (0..n * k).map(|_| rng.random_range(0..n)).collect();
    Automaton::dcsa_from_fn(alphabet(k), n, None, [], |q, x| table[q * k + x]).unwrap()
}

/// Random PDFA: each cell is defined with probability `density`.
pub fn random_pdfa(rng: &mut impl Rng, n: usize, k: usize, density: f64) -> Automaton {
    let mut trans = Vec::new();
    for q in 0..n {
        for x in 0..k {
            if rng.random_bool(density) {
                trans.push((q, x, rng.random_range(0..n)));
            }
        }
    }
    let finals: Vec<StateId> = (0..n).filter(|_| rng.random_bool(0.4)).collect();
    Automaton::new(Kind::Pdfa, alphabet(k), default_names(n), Some(0), finals, trans).unwrap()
}

pub fn random_nfa(rng: &mut impl Rng, n: usize, k: usize) -> Automaton {
    let mut trans = Vec::new();
    for q in 0..n {
        for x in 0..k {
            for p in 0..n {
                if rng.random_bool(0.3) {
                    trans.push((q, x, p));
                }
            }
        }
    }
    let finals: Vec<StateId> = (0..n).filter(|_| rng.random_bool(0.4)).collect();
    Automaton::new(Kind::Nfa, alphabet(k), default_names(n), Some(0), finals, trans).unwrap()
}

/// Random PDFA whose strongly connected components are single cycles,
/// checked here by the simple-cycle count rather than by the library.
pub fn random_polycyclic(rng: &mut impl Rng, max_states: usize, k: usize) -> Automaton {
    loop {
        let n = rng.random_range(1..=max_states);
        let density = rng.random_range(0.3..0.9);
        let aut = random_pdfa(rng, n, k, density);
        if brute_polycyclic_structure(&aut) {
            return aut;
        }
    }
}

/// Membership by exploring all runs, without subset sets.
pub fn nfa_accepts(aut: &Automaton, word: &[Symbol]) -> bool {
    fn go(aut: &Automaton, q: StateId, w: &[Symbol]) -> bool {
        match w.split_first() {
            None => aut.is_final(q),
            Some((&x, rest)) => aut.successors(q, x).iter().any(|&p| go(aut, p, rest)),
        }
    }
    aut.initial().is_some_and(|q0| go(aut, q0, word))
}

/// Words of length at most `max_len` labelling a path from `p` back to `p`.
pub fn loop_words(aut: &Automaton, p: StateId, max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut frontier = vec![(Word::empty(), p)];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (w, q) in frontier {
            for x in aut.alphabet().symbols() {
                for &r in aut.successors(q, x) {
                    let mut w2 = w.clone();
                    w2.push(x);
                    if r == p {
                        out.push(w2.clone());
                    }
                    next.push((w2, r));
                }
            }
        }
        frontier = next;
    }
    out
}

/// Whether all words of `words` are powers of one word, by trying every
/// prefix of the shortest word as a root.
pub fn brute_common_root(words: &[Word]) -> bool {
    let Some(shortest) = words.iter().min_by_key(|w| w.len()) else {
        return true;
    };
    (1..=shortest.len()).any(|d| {
        let root = &shortest[..d];
        words.iter().all(|w| w.len() % d == 0 && w.chunks(d).all(|c| c == root))
    })
}

/// The loop-language characterization: every state's loop words of length
/// at most `max_len` lie in the powers of a single word.
pub fn brute_loop_condition(aut: &Automaton, max_len: usize) -> bool {
    aut.states().all(|p| brute_common_root(&loop_words(aut, p, max_len)))
}

fn reach_matrix(aut: &Automaton) -> Vec<Vec<bool>> {
    let n = aut.n_states();
    let mut r = vec![vec![false; n]; n];
    for (p, _, q) in aut.transitions() {
        r[p][q] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if r[i][k] && r[k][j] {
                    r[i][j] = true;
                }
            }
        }
    }
    r
}

/// Components as sorted state lists, by mutual reachability.
pub fn brute_components(aut: &Automaton) -> Vec<Vec<StateId>> {
    let r = reach_matrix(aut);
    let mut seen = vec![false; aut.n_states()];
    let mut out = Vec::new();
    for p in aut.states() {
        if seen[p] {
            continue;
        }
        let comp: Vec<StateId> = aut
            .states()
            .filter(|&q| q == p || (r[p][q] && r[q][p]))
            .collect();
        for &q in &comp {
            seen[q] = true;
        }
        out.push(comp);
    }
    out.sort();
    out
}

/// Number of simple cycles (as edge sequences, parallel edges distinct)
/// inside `comp`, capped at 2.
pub fn simple_cycles_in(aut: &Automaton, comp: &[StateId]) -> usize {
    let inside: HashSet<StateId> = comp.iter().copied().collect();
    let edges: Vec<(StateId, StateId)> = aut
        .transitions()
        .filter(|(p, _, q)| inside.contains(p) && inside.contains(q))
        .map(|(p, _, q)| (p, q))
        .collect();
    let mut count = 0;
    // cycles rooted at their smallest state
    for &root in comp {
        let mut stack = vec![(root, vec![root])];
        while let Some((v, path)) = stack.pop() {
            for &(p, q) in &edges {
                if p != v {
                    continue;
                }
                if q == root {
                    count += 1;
                    if count >= 2 {
                        return count;
                    }
                } else if q > root && !path.contains(&q) {
                    let mut path2 = path.clone();
                    path2.push(q);
                    stack.push((q, path2));
                }
            }
        }
    }
    count
}

/// Every component carries at most one simple cycle.
pub fn brute_polycyclic_structure(aut: &Automaton) -> bool {
    brute_components(aut)
        .iter()
        .all(|c| simple_cycles_in(aut, c) <= 1)
}

/// Synchronizability by breadth-first search over subsets.
pub fn subset_bfs_synchronizing(aut: &Automaton) -> bool {
    let start: Vec<StateId> = aut.states().collect();
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(set) = queue.pop_front() {
        if set.len() == 1 {
            return true;
        }
        for x in aut.alphabet().symbols() {
            let mut next: Vec<StateId> = set.iter().map(|&q| aut.next(q, x).unwrap()).collect();
            next.sort_unstable();
            next.dedup();
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    false
}

/// Image of a set of states under a word in a complete automaton.
pub fn image(aut: &Automaton, states: &[StateId], word: &[Symbol]) -> Vec<StateId> {
    let mut out: Vec<StateId> = states
        .iter()
        .map(|&q| word.iter().fold(q, |p, &x| aut.next(p, x).unwrap()))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub fn all_words(k: usize, max_len: usize) -> Vec<Word> {
    words_up_to(k, max_len)
}

pub fn random_word(rng: &mut impl Rng, k: usize, max_len: usize) -> Word {
    let len = rng.random_range(0..=max_len);
    (0..len).map(|_| rng.random_range(0..k)).collect()
}

/// Every complete automaton over `k` symbols with `n` states, as tables.
pub fn all_dcsas(n: usize, k: usize) -> impl Iterator<Item = Automaton> {
    let cells = n * k;
    let total = n.pow(cells as u32);
    (0..total).map(move |mut code| {
        let mut table = vec![0; cells];
        for cell in table.iter_mut() {
            *cell = code % n;
            code /= n;
        }
        Automaton::dcsa_from_fn(alphabet(k), n, None, [], |q, x| table[q * k + x]).unwrap()
    })
}

/// Exact decision for constrained synchronization by breadth-first search
/// over (sorted state list of A, state of B) with plain vectors.
pub fn brute_constrained(a: &Automaton, b: &Automaton) -> bool {
    let start = (a.states().collect::<Vec<_>>(), b.initial().unwrap());
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some((set, p)) = queue.pop_front() {
        if set.len() == 1 && b.is_final(p) {
            return true;
        }
        for x in a.alphabet().symbols() {
            let Some(p2) = b.next(p, x) else { continue };
            let node = (image(a, &set, &[x]), p2);
            if seen.insert(node.clone()) {
                queue.push_back(node);
            }
        }
    }
    false
}

/// NFA for `L(b1) ∪ L(b2)`: disjoint copies plus a fresh initial state with
/// the outgoing transitions of both initial states.
pub fn side_by_side(b1: &Automaton, b2: &Automaton) -> Automaton {
    let n1 = b1.n_states();
    let n = n1 + b2.n_states() + 1;
    let start = n - 1;
    let mut trans: Vec<(usize, usize, usize)> = b1.transitions().collect();
    trans.extend(b2.transitions().map(|(p, x, q)| (p + n1, x, q + n1)));
    let (s1, s2) = (b1.initial().unwrap(), b2.initial().unwrap() + n1);
    let from_start: Vec<_> = trans
        .iter()
        .filter(|(p, _, _)| *p == s1 || *p == s2)
        .map(|&(_, x, q)| (start, x, q))
        .collect();
    trans.extend(from_start);
    let mut finals: Vec<usize> = b1.states().filter(|&q| b1.is_final(q)).collect();
    finals.extend(b2.states().filter(|&q| b2.is_final(q)).map(|q| q + n1));
    if b1.is_final(s1) || b2.is_final(s2 - n1) {
        finals.push(start);
    }
    let names = default_names(n);
    Automaton::new(Kind::Nfa, b1.alphabet().clone(), names, Some(start), finals, trans).unwrap()
}

pub const LOOP3: &str = "\
kind: pdfa
alphabet: a b
states: q1 q2 q3 q4 q5 q6
initial: q1
final: q6
trans: q1 b q2
trans: q2 a q3
trans: q3 a q4
trans: q3 b q6
trans: q4 b q5
trans: q5 a q3
";

pub const BAB: &str = "\
kind: pdfa
alphabet: a b
states: q1 q2 q3
initial: q1
final: q3
trans: q1 b q2
trans: q2 a q2
trans: q2 b q3
";
