//! Constrained synchronization with a polycyclic constraint automaton.
//!
//! Given a complete input automaton `A` and a constraint PDFA `B`, decide
//! whether some word of `L(B)` synchronizes `A`. Synchronizing words can be
//! exponentially long, so witnesses are kept in a compressed form, the
//! [`WCode`]: a short list of segments `u_p^n · v`, each pumping the loop
//! generator of a state `p` of `B` some number of times and then reading a
//! short connector `v`.
//!
//! Four procedures are provided:
//!
//! * [`oracle`]: breadth-first search over pairs (active set of `A`, state
//!   of `B`). Exact for any PDFA `B`, exponential in `|Q|`.
//! * [`solve`]: a depth-first search over segment sequences. At a pump the
//!   candidate exponents are the distinct points of the subset orbit
//!   `S, δ(S,g), δ(S,g²), …`, so every reachable image is covered.
//! * [`solve_p_case`]: the same search with exponents below `|Q|`, valid when
//!   [`p_case_applicable`] holds.
//! * [`verify_wcode`]: replays a code using orbit arithmetic, so exponents of
//!   any size are checked in time polynomial in their bit length.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::alphabet::{Symbol, Word};
use crate::automaton::{Automaton, Kind, StateId};
use crate::error::{Error, Result};
use crate::ops::{self, ClosureMode};
use crate::polycyclic::{self, PolycyclicSkeleton};
use crate::stateset::StateSet;

fn require_complete(aut: &Automaton) -> Result<()> {
    if aut.kind() != Kind::Nfa && aut.is_complete() {
        Ok(())
    } else {
        Err(Error::KindViolation(
            "input automaton must be complete and deterministic".into(),
        ))
    }
}

fn require_constraint(b: &Automaton) -> Result<StateId> {
    if b.kind() == Kind::Nfa || !b.is_deterministic() {
        return Err(Error::KindViolation(
            "constraint automaton must be deterministic".into(),
        ));
    }
    b.require_initial()
}

/// The eventually periodic sequence `q, δ(q,u), δ(q,u²), …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub state: StateId,
    pub word: Word,
    pub tail: usize,
    pub cycle: usize,
    /// `δ(q, u^i)` for `i < tail + cycle`, pairwise distinct.
    pub visited: Vec<StateId>,
}

impl Orbit {
    /// `δ(q, u^x)`.
    pub fn at(&self, x: &BigUint) -> StateId {
        if let Some(i) = x.to_usize().filter(|&i| i < self.visited.len()) {
            return self.visited[i];
        }
        let offset = (x - self.tail) % self.cycle;
        let offset = offset.to_usize().expect("remainder below cycle length");
        self.visited[self.tail + offset]
    }
}

/// Tail and cycle of `q` under repeated application of `u`.
pub fn orbit(aut: &Automaton, q: StateId, u: &[Symbol]) -> Result<Orbit> {
    require_complete(aut)?;
    if u.is_empty() {
        return Err(Error::EmptyWord);
    }
    let mut first_seen = vec![usize::MAX; aut.n_states()];
    let mut visited = Vec::new();
    let mut cur = q;
    while first_seen[cur] == usize::MAX {
        first_seen[cur] = visited.len();
        visited.push(cur);
        cur = aut.run(cur, u).expect("complete automaton");
    }
    let tail = first_seen[cur];
    Ok(Orbit {
        state: q,
        word: Word::from(u),
        tail,
        cycle: visited.len() - tail,
        visited,
    })
}

/// `δ(S, u^x)`, computed per state from its `u`-orbit.
pub fn power_step(aut: &Automaton, s: &StateSet, u: &[Symbol], x: &BigUint) -> Result<StateSet> {
    require_complete(aut)?;
    if x.is_zero() || u.is_empty() {
        return Ok(s.clone());
    }
    let mut out = StateSet::empty(aut.n_states());
    for q in s.iter() {
        out.insert(orbit(aut, q, u)?.at(x));
    }
    Ok(out)
}

/// Distinct images `S, δ(S,g), δ(S,g²), …` up to the first repetition.
fn subset_orbit(aut: &Automaton, s: &StateSet, g: &[Symbol]) -> Vec<StateSet> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut cur = s.clone();
    while seen.insert(cur.clone()) {
        let next = aut.step(&cur, g);
        out.push(cur);
        cur = next;
    }
    out
}

/// One segment `u_p^n · v` of a [`WCode`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Segment {
    pub pump: StateId,
    pub exponent: BigUint,
    pub connector: Word,
}

/// Compressed witness `u_{p1}^{n1} v1 u_{p2}^{n2} v2 ⋯`.
///
/// Text form: segments joined by `;`, each written `p=<state>,n=<decimal>,v=<word>`
/// with `-` for the empty connector, e.g. `p=q3,n=12,v=b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WCode {
    pub segments: Vec<Segment>,
}

impl WCode {
    /// A single segment with exponent zero; used for plain words.
    pub fn plain(start: StateId, word: Word) -> Self {
        WCode {
            segments: vec![Segment {
                pump: start,
                exponent: BigUint::zero(),
                connector: word,
            }],
        }
    }

    /// Splits the run of `word` in the polycyclic `b` at the states where it
    /// enters a cycle: each visited cycle is pumped as often as the word goes
    /// around it, and the rest becomes a connector of fewer than `|P|` symbols.
    pub fn from_word(b: &Automaton, word: &[Symbol]) -> Result<Self> {
        let sk = polycyclic::skeleton(b)?;
        let mut p = b.require_initial()?;
        let mut pos = 0;
        let mut segments = Vec::new();
        loop {
            let mut exponent = 0usize;
            if let Some(g) = sk.generator(p) {
                while word[pos..].starts_with(&g) {
                    pos += g.len();
                    exponent += 1;
                }
            }
            let pump = p;
            let comp = sk.scc.component_of(pump);
            let mut connector = Word::empty();
            let mut next_segment = false;
            while pos < word.len() {
                let x = word[pos];
                let r = b.next(p, x).ok_or_else(|| undefined(b, p, x))?;
                connector.push(x);
                pos += 1;
                p = r;
                if sk.scc.on_cycle(r) && sk.scc.component_of(r) != comp {
                    next_segment = true;
                    break;
                }
            }
            segments.push(Segment {
                pump,
                exponent: BigUint::from(exponent),
                connector,
            });
            if !next_segment {
                return Ok(WCode { segments });
            }
        }
    }

    /// Canonical text form.
    pub fn encode(&self, b: &Automaton) -> String {
        self.segments
            .iter()
            .map(|s| {
                format!(
                    "p={},n={},v={}",
                    b.state_name(s.pump),
                    s.exponent,
                    b.alphabet().format_word(&s.connector)
                )
            })
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Parses the canonical text form against the state names of `b`.
    pub fn parse(text: &str, b: &Automaton) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::MalformedCode("empty code".into()));
        }
        let mut segments = Vec::new();
        for (i, seg) in text.split(';').enumerate() {
            let bad = |msg: &str| Error::MalformedCode(format!("segment {}: {msg}", i + 1));
            let fields: Vec<&str> = seg.split(',').collect();
            let [p, n, v] = fields.as_slice() else {
                return Err(bad("expected `p=…,n=…,v=…`"));
            };
            fn value<'t>(f: &'t str, key: &str) -> Option<&'t str> {
                f.trim().strip_prefix(key)?.strip_prefix('=').map(str::trim)
            }
            let missing = |key: &str| bad(&format!("expected `{key}=`"));
            let p = value(p, "p").ok_or_else(|| missing("p"))?;
            let pump = b
                .state_id(p)
                .ok_or_else(|| bad(&format!("unknown state `{p}`")))?;
            let n = value(n, "n").ok_or_else(|| missing("n"))?;
            if n.is_empty() || !n.bytes().all(|c| c.is_ascii_digit()) {
                return Err(bad(&format!("`{n}` is not a decimal exponent")));
            }
            let exponent = n.parse::<BigUint>().map_err(|e| bad(&e.to_string()))?;
            let connector = b
                .alphabet()
                .parse_word(value(v, "v").ok_or_else(|| missing("v"))?)
                .map_err(|e| bad(&e.to_string()))?;
            segments.push(Segment {
                pump,
                exponent,
                connector,
            });
        }
        Ok(WCode { segments })
    }

    /// The form `1^{p}#bin(n)v` per segment, states numbered from 1 and
    /// connector symbols written by name. Informational only.
    pub fn binary_encoding(&self, b: &Automaton) -> String {
        let mut out = String::new();
        for s in &self.segments {
            out.push_str(&"1".repeat(s.pump + 1));
            let _ = write!(out, "#{:b}", s.exponent);
            for &x in s.connector.iter() {
                out.push_str(b.alphabet().name(x));
            }
        }
        out
    }

    fn generator(sk: &PolycyclicSkeleton, i: usize, s: &Segment) -> Result<Word> {
        if s.exponent.is_zero() {
            return Ok(Word::empty());
        }
        sk.generator(s.pump).ok_or_else(|| {
            Error::MalformedCode(format!(
                "segment {}: pump state `{}` lies on no cycle",
                i + 1,
                sk.base.state_name(s.pump)
            ))
        })
    }

    /// Length of the expanded word.
    pub fn expanded_length(&self, b: &Automaton) -> Result<BigUint> {
        let sk = polycyclic::skeleton(b)?;
        let mut total = BigUint::zero();
        for (i, s) in self.segments.iter().enumerate() {
            let g = Self::generator(&sk, i, s)?;
            total += &s.exponent * g.len() + s.connector.len();
        }
        Ok(total)
    }

    /// The expanded word, or `None` when it is longer than `max_len`.
    pub fn expand(&self, b: &Automaton, max_len: usize) -> Result<Option<Word>> {
        if self.expanded_length(b)? > BigUint::from(max_len) {
            return Ok(None);
        }
        let sk = polycyclic::skeleton(b)?;
        let mut w = Word::empty();
        for (i, s) in self.segments.iter().enumerate() {
            let g = Self::generator(&sk, i, s)?;
            let n = s.exponent.to_usize().expect("bounded by max_len");
            w.extend_from(&g.pow(n));
            w.extend_from(&s.connector);
        }
        Ok(Some(w))
    }
}

fn undefined(b: &Automaton, p: StateId, x: Symbol) -> Error {
    Error::UndefinedTransition {
        state: b.state_name(p).to_string(),
        symbol: b.alphabet().name(x).to_string(),
    }
}

/// Decision with an optional compressed witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstrSyncResult {
    pub decision: bool,
    pub witness: Option<WCode>,
    pub expanded_length: Option<BigUint>,
}

impl ConstrSyncResult {
    fn no() -> Self {
        ConstrSyncResult {
            decision: false,
            witness: None,
            expanded_length: None,
        }
    }

    fn yes(code: WCode, length: BigUint) -> Self {
        ConstrSyncResult {
            decision: true,
            witness: Some(code),
            expanded_length: Some(length),
        }
    }
}

/// Exact reference procedure: breadth-first search from `(Q, p0)` for a pair
/// `({q}, p)` with `p` final. The witness is a shortest word, ties broken
/// towards smaller symbols; it is segmented with [`WCode::from_word`] when
/// `b` is polycyclic and stored as one plain segment otherwise.
pub fn oracle(a: &Automaton, b: &Automaton) -> Result<ConstrSyncResult> {
    a.same_alphabet(b)?;
    require_complete(a)?;
    let p0 = require_constraint(b)?;
    let start = (a.all_states(), p0);
    let mut nodes = vec![start.clone()];
    let mut parent: Vec<Option<(usize, Symbol)>> = vec![None];
    let mut seen = HashMap::from([(start, 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (s, p) = nodes[i].clone();
        if s.len() == 1 && b.is_final(p) {
            let mut word = Vec::new();
            let mut cur = i;
            while let Some((prev, x)) = parent[cur] {
                word.push(x);
                cur = prev;
            }
            word.reverse();
            let word = Word::from(word);
            let len = BigUint::from(word.len());
            let code = if polycyclic::is_polycyclic(b)? {
                WCode::from_word(b, &word)?
            } else {
                WCode::plain(p0, word)
            };
            return Ok(ConstrSyncResult::yes(code, len));
        }
        for x in a.alphabet().symbols() {
            let Some(p2) = b.next(p, x) else { continue };
            let node = (a.step_symbol(&s, x), p2);
            if !seen.contains_key(&node) {
                seen.insert(node.clone(), nodes.len());
                queue.push_back(nodes.len());
                nodes.push(node);
                parent.push(Some((i, x)));
            }
        }
    }
    Ok(ConstrSyncResult::no())
}

/// Replays `code` on `(Q, p0)` and accepts iff it ends in a singleton with
/// `B` in a final state.
pub fn verify_wcode(a: &Automaton, b: &Automaton, code: &WCode) -> Result<bool> {
    a.same_alphabet(b)?;
    require_complete(a)?;
    let sk = polycyclic::skeleton(b)?;
    let mut p = require_constraint(b)?;
    let mut s = a.all_states();
    for (i, seg) in code.segments.iter().enumerate() {
        if !seg.exponent.is_zero() {
            if seg.pump != p {
                return Err(Error::PumpStateMismatch {
                    segment: i + 1,
                    expected: b.state_name(seg.pump).to_string(),
                    actual: b.state_name(p).to_string(),
                });
            }
            let g = WCode::generator(&sk, i, seg)?;
            s = power_step(a, &s, &g, &seg.exponent)?;
        }
        for &x in seg.connector.iter() {
            p = b.next(p, x).ok_or_else(|| undefined(b, p, x))?;
            s = a.step_symbol(&s, x);
        }
    }
    Ok(s.len() == 1 && b.is_final(p))
}

/// Words of length below `max_len` defined in `b` from `p`, in shortlex
/// order, with the state each one leads to.
fn connectors(b: &Automaton, p: StateId, max_len: usize) -> Vec<(Word, StateId)> {
    let mut out = vec![(Word::empty(), p)];
    let mut layer_start = 0;
    for _ in 1..max_len {
        let layer_end = out.len();
        for i in layer_start..layer_end {
            for x in b.alphabet().symbols() {
                let (w, q) = &out[i];
                if let Some(r) = b.next(*q, x) {
                    let mut w = w.clone();
                    w.push(x);
                    out.push((w, r));
                }
            }
        }
        layer_start = layer_end;
    }
    out
}

enum Exponents {
    /// Every distinct point of the subset orbit.
    Orbit,
    /// Exponents `0..bound`.
    Below(usize),
}

struct Search<'a> {
    a: &'a Automaton,
    b: &'a Automaton,
    sk: PolycyclicSkeleton,
    connectors: Vec<Vec<(Word, StateId)>>,
    exponents: Exponents,
    memo: HashMap<(StateSet, StateId), usize>,
    path: Vec<Segment>,
}

impl Search<'_> {
    fn pumps(&self, s: &StateSet, p: StateId) -> Vec<(usize, StateSet)> {
        let Some(g) = self.sk.generator(p) else {
            return vec![(0, s.clone())];
        };
        match self.exponents {
            Exponents::Orbit => subset_orbit(self.a, s, &g).into_iter().enumerate().collect(),
            Exponents::Below(bound) => {
                let mut seen = HashSet::new();
                let mut out = Vec::new();
                let mut cur = s.clone();
                for k in 0..bound.max(1) {
                    if seen.insert(cur.clone()) {
                        out.push((k, cur.clone()));
                    }
                    cur = self.a.step(&cur, &g);
                }
                out
            }
        }
    }

    fn run(&mut self, s: &StateSet, p: StateId, remaining: usize) -> bool {
        if remaining == 0 {
            return false;
        }
        let key = (s.clone(), p);
        if self.memo.get(&key).is_some_and(|&r| r >= remaining) {
            return false;
        }
        self.memo.insert(key, remaining);
        for (k, pumped) in self.pumps(s, p) {
            for c in 0..self.connectors[p].len() {
                let (v, p2) = self.connectors[p][c].clone();
                let s2 = self.a.step(&pumped, &v);
                self.path.push(Segment {
                    pump: p,
                    exponent: BigUint::from(k),
                    connector: v,
                });
                if (s2.len() == 1 && self.b.is_final(p2)) || self.run(&s2, p2, remaining - 1) {
                    return true;
                }
                self.path.pop();
            }
        }
        false
    }
}

const CANONICAL_LIMIT: usize = 1 << 16;

fn search(a: &Automaton, b: &Automaton, exponents: Exponents) -> Result<ConstrSyncResult> {
    a.same_alphabet(b)?;
    require_complete(a)?;
    let p0 = require_constraint(b)?;
    let sk = polycyclic::skeleton(b)?;
    let m = b.n_states();
    let mut run = Search {
        a,
        b,
        connectors: b.states().map(|p| connectors(b, p, m)).collect(),
        sk,
        exponents,
        memo: HashMap::new(),
        path: Vec::new(),
    };
    if !run.run(&a.all_states(), p0, m) {
        return Ok(ConstrSyncResult::no());
    }
    let mut code = WCode {
        segments: std::mem::take(&mut run.path),
    };
    // short witnesses are re-segmented along their run in B
    if let Some(word) = code.expand(b, CANONICAL_LIMIT)? {
        code = WCode::from_word(b, &word)?;
    }
    let len = code.expanded_length(b)?;
    debug_assert!(verify_wcode(a, b, &code)?);
    Ok(ConstrSyncResult::yes(code, len))
}

/// Complete search over codes with at most `|P|` segments and connectors
/// shorter than `|P|`, exponents taken from the subset orbit at each pump.
pub fn solve(a: &Automaton, b: &Automaton) -> Result<ConstrSyncResult> {
    search(a, b, Exponents::Orbit)
}

/// Whether `L(B_{p0,{p}}) ⊆ S({g_p}*)` for every reachable on-cycle `p`,
/// where `g_p` is the loop generator at `p` and `S` the suffix closure.
pub fn p_case_applicable(b: &Automaton) -> Result<bool> {
    let sk = polycyclic::skeleton(b)?;
    let reach = ops::accessible(b)?;
    for (&p, info) in &sk.cycle_info {
        if !reach.contains(p) {
            continue;
        }
        let to_p = b.with_finals([p]);
        let loops = polycyclic::star_automaton(b.alphabet(), &info.generator())?;
        let suffixes = ops::closure_automaton(&loops, ClosureMode::Suffix)?;
        if !ops::includes(&suffixes, &to_p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The search of [`solve`] with every exponent below `|Q|`. Under the
/// suffix condition the images `δ(S, g^k)` shrink monotonically in `k`, so
/// they stabilise before `|Q|`.
pub fn solve_p_case(a: &Automaton, b: &Automaton) -> Result<ConstrSyncResult> {
    if !p_case_applicable(b)? {
        return Err(Error::PCaseNotApplicable);
    }
    search(a, b, Exponents::Below(a.n_states()))
}
