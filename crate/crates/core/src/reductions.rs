//! Set transport problems, their reductions, and the hardness gadget for
//! constraint languages of the form `u v* U`.

use std::collections::{HashMap, HashSet};
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::alphabet::{Alphabet, Symbol, Word};
use crate::automaton::{default_names, Automaton, Kind, StateId};
use crate::error::{Error, Result};
use crate::format::parse_automaton;
use crate::ops::{self, ClosureMode};
use crate::polycyclic;
use crate::solver;
use crate::stateset::StateSet;

/// A complete automaton with a source set `S` and a target set `T`; asks
/// whether some word maps `S` into `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetTransporterInstance {
    pub aut: Automaton,
    pub source: StateSet,
    pub target: StateSet,
}

impl SetTransporterInstance {
    pub fn new(aut: Automaton, source: StateSet, target: StateSet) -> Result<Self> {
        if aut.kind() == Kind::Nfa || !aut.is_complete() {
            return Err(Error::InvalidInstance(
                "automaton must be complete and deterministic".into(),
            ));
        }
        let n = aut.n_states();
        if source.width() != n || target.width() != n {
            return Err(Error::InvalidInstance("set width differs from state count".into()));
        }
        if source.is_empty() || target.is_empty() {
            return Err(Error::InvalidInstance("S and T must be nonempty".into()));
        }
        Ok(SetTransporterInstance {
            aut,
            source,
            target,
        })
    }

    pub fn is_disjoint(&self) -> bool {
        self.source.is_disjoint(&self.target)
    }

    pub fn is_unary(&self) -> bool {
        self.aut.alphabet().len() == 1
    }

    fn names(&self, set: &StateSet) -> String {
        set.iter()
            .map(|q| self.aut.state_name(q))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Instance file: an automaton file plus `S:` and `T:` lines naming states.
pub fn parse_instance(text: &str) -> Result<SetTransporterInstance> {
    let mut body = String::with_capacity(text.len());
    let mut sets: HashMap<&str, (usize, Vec<&str>)> = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("");
        let mut toks = content.split_whitespace();
        match toks.next() {
            Some(key @ ("S:" | "T:")) => {
                if sets.insert(key, (i + 1, toks.collect())).is_some() {
                    return Err(Error::Syntax {
                        line: i + 1,
                        column: 1,
                        message: format!("duplicate `{key}` line"),
                    });
                }
                body.push('\n');
            }
            _ => {
                body.push_str(line);
                body.push('\n');
            }
        }
    }
    let aut = parse_automaton(&body)?;
    let mut resolve = |key: &str| -> Result<StateSet> {
        let (_, names) = sets.remove(key).ok_or_else(|| Error::Syntax {
            line: text.lines().count().max(1),
            column: 1,
            message: format!("missing `{key}` line"),
        })?;
        let mut set = StateSet::empty(aut.n_states());
        for name in names {
            let q = aut
                .state_id(name)
                .ok_or_else(|| Error::DanglingState(name.to_string()))?;
            set.insert(q);
        }
        Ok(set)
    };
    let source = resolve("S:")?;
    let target = resolve("T:")?;
    SetTransporterInstance::new(aut, source, target)
}

impl fmt::Display for SetTransporterInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.aut)?;
        writeln!(f, "S: {}", self.names(&self.source))?;
        writeln!(f, "T: {}", self.names(&self.target))
    }
}

/// Shortest word `w` with `δ(S, w) ⊆ T`, ties broken towards smaller
/// symbols, found by breadth-first search over the images of `S`.
pub fn set_transporter_bruteforce(inst: &SetTransporterInstance) -> Option<Word> {
    let aut = &inst.aut;
    let mut nodes = vec![inst.source.clone()];
    let mut parent: Vec<Option<(usize, Symbol)>> = vec![None];
    let mut seen = HashSet::from([inst.source.clone()]);
    let mut i = 0;
    while i < nodes.len() {
        if nodes[i].is_subset(&inst.target) {
            let mut word = Vec::new();
            let mut cur = i;
            while let Some((prev, x)) = parent[cur] {
                word.push(x);
                cur = prev;
            }
            word.reverse();
            return Some(word.into());
        }
        for x in aut.alphabet().symbols() {
            let next = aut.step_symbol(&nodes[i], x);
            if seen.insert(next.clone()) {
                nodes.push(next);
                parent.push(Some((i, x)));
            }
        }
        i += 1;
    }
    None
}

fn unique_names(mut names: Vec<String>, fallback: usize) -> Vec<String> {
    let distinct: HashSet<&String> = names.iter().collect();
    if distinct.len() != names.len() {
        names = default_names(fallback);
    }
    names
}

/// Adds a copy `s'` of every `s ∈ S` with the same outgoing transitions and
/// makes the copies the new source set, so that `S' ∩ T = ∅`. Nonempty
/// witnesses transfer verbatim in both directions.
pub fn disjointify(inst: &SetTransporterInstance) -> Result<SetTransporterInstance> {
    if inst.source.is_subset(&inst.target) {
        return Err(Error::InvalidInstance(
            "S ⊆ T already holds with the empty word".into(),
        ));
    }
    let aut = &inst.aut;
    let n = aut.n_states();
    let sources: Vec<StateId> = inst.source.iter().collect();
    let mut taken: HashSet<String> = aut.state_names().iter().cloned().collect();
    let mut names = aut.state_names().to_vec();
    for &s in &sources {
        let mut name = format!("{}'", aut.state_name(s));
        while taken.contains(&name) {
            name.push('\'');
        }
        taken.insert(name.clone());
        names.push(name);
    }
    let mut trans: Vec<_> = aut.transitions().collect();
    for (i, &s) in sources.iter().enumerate() {
        for x in aut.alphabet().symbols() {
            trans.push((n + i, x, aut.next(s, x).expect("complete automaton")));
        }
    }
    let m = names.len();
    let out = Automaton::new(Kind::Dcsa, aut.alphabet().clone(), names, None, [], trans)?;
    SetTransporterInstance::new(
        out,
        StateSet::from_states(m, n..m),
        StateSet::from_states(m, inst.target.iter()),
    )
}

/// Disjoint union of the (completed) DFAs with `S` their initial states and
/// `T` the union of their final states. A word maps `S` into `T` iff every
/// DFA accepts it.
pub fn intersection_to_settransporter(dfas: &[Automaton]) -> Result<SetTransporterInstance> {
    let Some(first) = dfas.first() else {
        return Err(Error::InvalidInstance("no automata given".into()));
    };
    let mut names = Vec::new();
    let mut trans = Vec::new();
    let mut initials = Vec::new();
    let mut finals = Vec::new();
    for (i, dfa) in dfas.iter().enumerate() {
        first.same_alphabet(dfa)?;
        let dfa = ops::complete(dfa)?;
        let offset = names.len();
        initials.push(offset + dfa.require_initial()?);
        finals.extend(dfa.finals().iter().map(|q| offset + q));
        trans.extend(dfa.transitions().map(|(p, x, q)| (offset + p, x, offset + q)));
        names.extend(dfa.state_names().iter().map(|s| format!("{}.{s}", i + 1)));
    }
    let n = names.len();
    let aut = Automaton::new(Kind::Dcsa, first.alphabet().clone(), names, None, [], trans)?;
    if finals.is_empty() {
        return Err(Error::InvalidInstance("no automaton has a final state".into()));
    }
    SetTransporterInstance::new(
        aut,
        StateSet::from_states(n, initials),
        StateSet::from_states(n, finals),
    )
}

/// One DFA per `s ∈ S`: the instance automaton started in `s` with final
/// set `T`. Their common words are exactly the transporting words.
pub fn settransporter_to_intersection(inst: &SetTransporterInstance) -> Result<Vec<Automaton>> {
    let targets: Vec<StateId> = inst.target.iter().collect();
    inst.source
        .iter()
        .map(|s| Ok(inst.aut.with_initial(Some(s))?.with_finals(targets.iter().copied())))
        .collect()
}

/// `(u, v, U)` describing the constraint language `u v* U`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardnessTriple {
    pub u: Word,
    pub v: Word,
    pub tail: Automaton,
}

/// The three side conditions of the hardness criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CriterionReport {
    /// `u ∉ F(v*)`.
    pub u_not_factor_of_v_star: bool,
    /// `v ∉ F(U)`.
    pub v_not_factor_of_tail: bool,
    /// `P(v*) ∩ U = ∅`.
    pub tail_avoids_prefixes: bool,
}

impl CriterionReport {
    pub fn holds(&self) -> bool {
        self.u_not_factor_of_v_star && self.v_not_factor_of_tail && self.tail_avoids_prefixes
    }
}

impl HardnessTriple {
    pub fn alphabet(&self) -> &Alphabet {
        self.tail.alphabet()
    }

    /// Evaluates each condition separately.
    pub fn criterion(&self) -> Result<CriterionReport> {
        if ops::is_empty(&self.tail)? {
            return Err(Error::EmptyU);
        }
        let (u, v) = (&self.u, &self.v);
        let u_in = if v.is_empty() {
            u.is_empty()
        } else {
            v.pow(u.len().div_ceil(v.len()) + 1).contains_factor(u)
        };
        let factors = ops::closure_automaton(&self.tail, ClosureMode::Factor)?;
        let v_in = factors.accepts(v);
        let star = polycyclic::star_automaton(self.alphabet(), v)?;
        let prefixes = ops::closure_automaton(&star, ClosureMode::Prefix)?;
        let meet = ops::product_intersection(&prefixes, &self.tail)?;
        Ok(CriterionReport {
            u_not_factor_of_v_star: !u_in,
            v_not_factor_of_tail: !v_in,
            tail_avoids_prefixes: ops::is_empty(&meet)?,
        })
    }

    /// Chooses or validates the tail word used by the gadget: it must lie in
    /// `U`, must not contain `v` as a factor and must not be a prefix of a
    /// word of `v*`. Without a candidate the shortest word of `U` is taken.
    pub fn tail_word(&self, candidate: Option<&Word>) -> Result<Word> {
        let w = match candidate {
            Some(w) => w.clone(),
            None => ops::shortest_accepted(&self.tail)?.ok_or(Error::EmptyU)?,
        };
        let show = |w: &Word| self.alphabet().format_word(w);
        if !self.tail.accepts(&w) {
            return Err(Error::CriterionFailed(format!("`{}` is not in U", show(&w))));
        }
        if !self.v.is_empty() && w.contains_factor(&self.v) {
            return Err(Error::CriterionFailed(format!(
                "`{}` contains `{}` as a factor",
                show(&w),
                show(&self.v)
            )));
        }
        let prefix_of_power = !self.v.is_empty() && self.v.pow(w.len() / self.v.len() + 1).starts_with(&w);
        if w.is_empty() || prefix_of_power {
            return Err(Error::CriterionFailed(format!(
                "`{}` is a prefix of a power of `{}`",
                show(&w),
                show(&self.v)
            )));
        }
        Ok(w)
    }

    /// Polycyclic automaton for `u v* U`, built by concatenation.
    pub fn constraint(&self) -> Result<Automaton> {
        let tail = polycyclic::unfold_start(&ops::trim(&self.tail)?)?;
        self.constraint_with(&tail)
    }

    /// Polycyclic automaton for `u v* {w}`.
    pub fn constraint_for_word(&self, w: &[Symbol]) -> Result<Automaton> {
        self.constraint_with(&polycyclic::word_automaton(self.alphabet(), w)?)
    }

    fn constraint_with(&self, tail: &Automaton) -> Result<Automaton> {
        let sigma = self.alphabet();
        let head = polycyclic::word_automaton(sigma, &self.u)?;
        let star = polycyclic::star_automaton(sigma, &self.v)?;
        let vu = polycyclic::concat_pc(&star, tail)?;
        polycyclic::concat_pc(&head, &vu)
    }
}

/// Whether `u v* U` satisfies all three conditions.
pub fn check_np_hard_criterion(t: &HardnessTriple) -> Result<bool> {
    Ok(t.criterion()?.holds())
}

/// Builds the synchronization gadget from a unary instance with disjoint
/// `S` and `T`.
///
/// With `v^{|u|} = x_1 ⋯ x_n`, the states are `n` copies `Q_0, …, Q_{n-1}` of
/// `Q` and a trap `t`. Reading `x_{i+1}` moves the copy of `q` in `Q_i` to
/// `Q_{i+1}`, and from `Q_{n-1}` to `δ(q, a)` in `Q_0`. Any other symbol sends
/// states of `S` back to their `Q_0` copy, states of `T` to `t`, and all
/// remaining states to the lowest state of `S`.
pub fn build_hardness_gadget(
    inst: &SetTransporterInstance,
    t: &HardnessTriple,
    w: &Word,
) -> Result<Automaton> {
    if !inst.is_unary() {
        return Err(Error::InvalidInstance("instance must be unary".into()));
    }
    if !inst.is_disjoint() {
        return Err(Error::InvalidInstance("S and T must be disjoint".into()));
    }
    let report = t.criterion()?;
    if !report.holds() {
        return Err(Error::CriterionFailed(format!("{report:?}")));
    }
    t.tail_word(Some(w))?;

    let base = &inst.aut;
    let q = base.n_states();
    let block = t.v.pow(t.u.len());
    let n = block.len();
    let trap = q * n;
    let s_hat = inst.source.first().expect("nonempty source");
    let id = |i: usize, state: StateId| i * q + state;

    let mut names = Vec::with_capacity(trap + 1);
    for i in 0..n {
        for state in base.states() {
            let name = base.state_name(state);
            names.push(if i == 0 { name.to_string() } else { format!("{name}~{i}") });
        }
    }
    names.push("trap".to_string());
    let names = unique_names(names, trap + 1);

    let sigma = t.alphabet();
    let mut trans = Vec::with_capacity((trap + 1) * sigma.len());
    for i in 0..n {
        for state in base.states() {
            for x in sigma.symbols() {
                let target = if x == block[i] {
                    if i + 1 < n {
                        id(i + 1, state)
                    } else {
                        base.next(state, 0).expect("complete automaton")
                    }
                } else if inst.source.contains(state) {
                    state
                } else if inst.target.contains(state) {
                    trap
                } else {
                    s_hat
                };
                trans.push((id(i, state), x, target));
            }
        }
    }
    trans.extend(sigma.symbols().map(|x| (trap, x, trap)));
    Automaton::new(Kind::Dcsa, sigma.clone(), names, None, [], trans)
}

/// Looks for a decomposition `L(b) = u v* U` meeting the hardness criterion.
///
/// For each reachable on-cycle state `p` in id order, with `x` a shortest
/// word leading to `p` and `g` the loop generator at `p`, every split
/// `x = u s` where `s` is a suffix of a power of `g` is tried with `v` the
/// rotation `s g s⁻¹` and `U = u⁻¹L(b) ∖ vΣ*`. Candidates are confirmed by
/// language equality.
pub fn find_hardness_triple(b: &Automaton) -> Result<Option<HardnessTriple>> {
    let sk = polycyclic::skeleton(b)?;
    let reach = ops::accessible(b)?;
    for (&p, info) in &sk.cycle_info {
        if !reach.contains(p) {
            continue;
        }
        let Some(x) = ops::shortest_accepted(&b.with_finals([p]))? else {
            continue;
        };
        let g = info.generator();
        for k in 0..=x.len() {
            let (u, s) = x.split_at(x.len() - k);
            if !g.pow(k / g.len() + 1).ends_with(s) {
                break;
            }
            let mut v = Word::from(s);
            v.extend_from(&g);
            let v = Word::from(&v[..g.len()]);
            let quotient = polycyclic::quotient_pc(b, u)?;
            let tail = ops::trim(&ops::product_intersection(
                &quotient,
                &not_starting_with(b.alphabet(), &v)?,
            )?)?;
            if ops::is_empty(&tail)? {
                continue;
            }
            let t = HardnessTriple {
                u: Word::from(u),
                v,
                tail,
            };
            if !check_np_hard_criterion(&t)? {
                continue;
            }
            let candidate = t.constraint()?;
            if ops::includes(b, &candidate)? && ops::includes(&candidate, b)? {
                return Ok(Some(t));
            }
        }
    }
    Ok(None)
}

/// Words that do not begin with `v`.
fn not_starting_with(alphabet: &Alphabet, v: &[Symbol]) -> Result<Automaton> {
    let sink = v.len();
    let mut trans = Vec::new();
    for (i, &y) in v.iter().enumerate() {
        for x in alphabet.symbols() {
            if x == y {
                if i + 1 < v.len() {
                    trans.push((i, x, i + 1));
                }
            } else {
                trans.push((i, x, sink));
            }
        }
    }
    trans.extend(alphabet.symbols().map(|x| (sink, x, sink)));
    Automaton::new(
        Kind::Pdfa,
        alphabet.clone(),
        default_names(v.len() + 1),
        Some(0),
        0..=sink,
        trans,
    )
}

/// Outcome of one instance of a gadget batch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchCase {
    pub index: usize,
    pub instance: SetTransporterInstance,
    pub transporter: bool,
    pub gadget: bool,
}

/// Result of [`gadget_equivalence_batch`], ordered by instance index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchReport {
    pub seed: u64,
    pub triple: String,
    pub cases: Vec<BatchCase>,
}

impl BatchReport {
    pub fn agreements(&self) -> usize {
        self.cases.iter().filter(|c| c.transporter == c.gadget).count()
    }

    pub fn counterexamples(&self) -> impl Iterator<Item = &BatchCase> {
        self.cases.iter().filter(|c| c.transporter != c.gadget)
    }
}

impl fmt::Display for BatchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "triple {}", self.triple)?;
        writeln!(f, "seed {}", self.seed)?;
        writeln!(f, "instances {}", self.cases.len())?;
        let yes = self.cases.iter().filter(|c| c.transporter).count();
        writeln!(f, "transporter-yes {yes}")?;
        for c in self.counterexamples() {
            let word = |b: bool| if b { "yes" } else { "no" };
            writeln!(
                f,
                "counterexample {}: transporter {} gadget {}",
                c.index,
                word(c.transporter),
                word(c.gadget)
            )?;
            for line in c.instance.to_string().lines() {
                writeln!(f, "  {line}")?;
            }
        }
        writeln!(f, "agreement {}/{}", self.agreements(), self.cases.len())
    }
}

/// Random unary instance with `2 ≤ |Q| ≤ max_q` and disjoint nonempty
/// `S`, `T`.
pub fn random_unary_instance(rng: &mut impl Rng, max_q: usize) -> Result<SetTransporterInstance> {
    if max_q < 2 {
        return Err(Error::InvalidInstance("max-q must be at least 2".into()));
    }
    let n = rng.random_range(2..=max_q);
    let table: Vec<StateId> = (0..n).map(|_| rng.random_range(0..n)).collect();
    let aut = Automaton::dcsa_from_fn(Alphabet::new(["a"])?, n, None, [], |q, _| table[q])?;
    let mut order: Vec<StateId> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut source = StateSet::from_states(n, [order[0]]);
    let mut target = StateSet::from_states(n, [order[1]]);
    for &q in &order[2..] {
        match rng.random_range(0..3) {
            0 => source.insert(q),
            1 => target.insert(q),
            _ => {}
        }
    }
    SetTransporterInstance::new(aut, source, target)
}

/// Compares the set transporter brute force with the constrained oracle on
/// the gadget for `count` random unary instances. Instance `i` is drawn from
/// a ChaCha stream seeded with `seed` and stream number `i`, so the report
/// does not depend on scheduling.
pub fn gadget_equivalence_batch(
    count: usize,
    max_q: usize,
    t: &HardnessTriple,
    w: &Word,
    seed: u64,
) -> Result<BatchReport> {
    if !check_np_hard_criterion(t)? {
        return Err(Error::CriterionFailed(format!("{:?}", t.criterion()?)));
    }
    let w = t.tail_word(Some(w))?;
    let constraint = t.constraint_for_word(&w)?;
    let sigma = t.alphabet();
    let triple = format!(
        "{},{},{}",
        sigma.format_word(&t.u),
        sigma.format_word(&t.v),
        sigma.format_word(&w)
    );
    let cases = (0..count)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index as u64);
            let instance = random_unary_instance(&mut rng, max_q)?;
            let gadget = build_hardness_gadget(&instance, t, &w)?;
            Ok(BatchCase {
                index,
                transporter: set_transporter_bruteforce(&instance).is_some(),
                gadget: solver::oracle(&gadget, &constraint)?.decision,
                instance,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BatchReport {
        seed,
        triple,
        cases,
    })
}

/// A shortest word accepted by every automaton in `dfas`.
pub fn common_word(dfas: &[Automaton]) -> Result<Option<Word>> {
    let Some(first) = dfas.first() else {
        return Ok(Some(Word::empty()));
    };
    let mut product = first.clone();
    for d in &dfas[1..] {
        product = ops::product_intersection(&product, d)?;
    }
    ops::shortest_accepted(&product)
}
