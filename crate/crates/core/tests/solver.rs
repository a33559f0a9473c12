mod common;

use common::*;
use num_bigint::BigUint;
use num_traits::Zero;
use polysync::polycyclic::{self, skeleton, union_pc};
use polysync::reductions::{build_hardness_gadget, HardnessTriple, SetTransporterInstance};
use polysync::solver::*;
use polysync::{Automaton, Error, StateSet, Word};
use proptest::prelude::*;
use rand::Rng;

fn aut(text: &str) -> Automaton {
    text.parse().unwrap()
}

fn word(text: &str) -> Word {
    alphabet(2).parse_word(text).unwrap()
}

fn reset() -> Automaton {
    // b sends everything to 0, a swaps 1 and 2
    Automaton::dcsa_from_fn(alphabet(2), 3, None, [], |q, x| match (q, x) {
        (_, 1) | (0, _) => 0,
        (1, _) => 2,
        _ => 1,
    })
    .unwrap()
}

/// Replays `code` and returns the image before each segment.
fn images_before_segments(a: &Automaton, b: &Automaton, code: &WCode) -> Vec<StateSet> {
    let sk = skeleton(b).unwrap();
    let mut s = a.all_states();
    let mut out = Vec::new();
    for seg in &code.segments {
        out.push(s.clone());
        if !seg.exponent.is_zero() {
            let g = sk.generator(seg.pump).unwrap();
            s = power_step(a, &s, &g, &seg.exponent).unwrap();
        }
        s = a.step(&s, &seg.connector);
    }
    out
}

#[test]
fn orbit_examples() {
    let cycle = Automaton::dcsa_from_fn(alphabet(1), 5, None, [], |q, _| (q + 1) % 5).unwrap();
    let o = orbit(&cycle, 0, &[0]).unwrap();
    assert_eq!((o.tail, o.cycle), (0, 5));
    let chain = Automaton::dcsa_from_fn(alphabet(1), 3, None, [], |q, _| (q + 1).min(2)).unwrap();
    let o = orbit(&chain, 0, &[0]).unwrap();
    assert_eq!((o.tail, o.cycle), (2, 1));
    assert_eq!(o.visited, vec![0, 1, 2]);
    assert_eq!(orbit(&chain, 0, &[]).unwrap_err(), Error::EmptyWord);
}

#[test]
fn orbits_match_iteration() {
    let mut rng = rng(31);
    for _ in 0..100 {
        let a = random_dcsa(&mut rng, 8, 2);
        let u: Word = (0..3).map(|_| rng.random_range(0..2)).collect();
        for q in a.states() {
            let o = orbit(&a, q, &u).unwrap();
            assert!(o.tail + o.cycle <= a.n_states());
            let distinct: std::collections::HashSet<_> = o.visited.iter().collect();
            assert_eq!(distinct.len(), o.visited.len());
            let mut cur = q;
            for x in 0..=100u32 {
                assert_eq!(o.at(&BigUint::from(x)), cur);
                cur = a.run(cur, &u).unwrap();
            }
        }
    }
}

#[test]
fn power_step_examples() {
    let cycle = Automaton::dcsa_from_fn(alphabet(1), 5, None, [], |q, _| (q + 1) % 5).unwrap();
    let s = StateSet::from_states(5, [0]);
    assert_eq!(power_step(&cycle, &s, &[0], &BigUint::zero()).unwrap(), s);
    let x = BigUint::from(10u32).pow(12);
    assert_eq!(power_step(&cycle, &s, &[0], &x).unwrap(), s);
}

#[test]
fn oracle_examples() {
    let one = Automaton::dcsa_from_fn(alphabet(2), 1, None, [], |_, _| 0).unwrap();
    let bab = aut(BAB);
    let r = oracle(&one, &bab).unwrap();
    assert!(r.decision);
    let w = r.witness.unwrap().expand(&bab, 100).unwrap().unwrap();
    assert_eq!(w, word("bb"));
    let empty = polycyclic::empty_language(&alphabet(2)).unwrap();
    assert!(!oracle(&one, &empty).unwrap().decision);
    assert!(!oracle(&reset(), &empty).unwrap().decision);
    let unary = Automaton::dcsa_from_fn(alphabet(1), 1, None, [], |_, _| 0).unwrap();
    assert!(matches!(oracle(&unary, &bab), Err(Error::AlphabetMismatch { .. })));
}

fn gadget(n: usize, succ: impl Fn(usize) -> usize, s: &[usize], t: &[usize]) -> (Automaton, Automaton, bool) {
    let base = Automaton::dcsa_from_fn(alphabet(1), n, None, [], |q, _| succ(q)).unwrap();
    let inst = SetTransporterInstance::new(
        base,
        StateSet::from_states(n, s.iter().copied()),
        StateSet::from_states(n, t.iter().copied()),
    )
    .unwrap();
    let triple = HardnessTriple {
        u: word("b"),
        v: word("a"),
        tail: polycyclic::word_automaton(&alphabet(2), &word("b")).unwrap(),
    };
    let w = word("b");
    let g = build_hardness_gadget(&inst, &triple, &w).unwrap();
    let yes = polysync::reductions::set_transporter_bruteforce(&inst).is_some();
    (g, triple.constraint_for_word(&w).unwrap(), yes)
}

#[test]
fn oracle_on_gadgets() {
    let (g, b, yes) = gadget(5, |q| (q + 1) % 5, &[0], &[2]);
    assert!(yes);
    assert!(oracle(&g, &b).unwrap().decision);
    assert!(brute_constrained(&g, &b));
    assert!(solve(&g, &b).unwrap().decision);
    let (g, b, yes) = gadget(3, |q| q, &[0], &[1]);
    assert!(!yes);
    assert!(!oracle(&g, &b).unwrap().decision);
    assert!(!brute_constrained(&g, &b));
    assert!(!solve(&g, &b).unwrap().decision);
}

#[test]
fn verification_of_replayed_witnesses() {
    let mut rng = rng(32);
    let mut checked = 0;
    for _ in 0..300 {
        let b = random_polycyclic(&mut rng, 4, 2);
        let a = random_dcsa(&mut rng, 4, 2);
        let r = oracle(&a, &b).unwrap();
        let Some(code) = r.witness else { continue };
        checked += 1;
        assert!(verify_wcode(&a, &b, &code).unwrap());
        let w = code.expand(&b, 1 << 12).unwrap().unwrap();
        let plain = WCode::plain(b.initial().unwrap(), w.clone());
        assert!(verify_wcode(&a, &b, &plain).unwrap());
        let resegmented = WCode::from_word(&b, &w).unwrap();
        assert_eq!(resegmented.expand(&b, 1 << 12).unwrap().unwrap(), w);
    }
    assert!(checked > 20);
}

#[test]
fn rejects_words_outside_the_constraint() {
    let bab = aut(BAB);
    let a = reset();
    // "ba" synchronizes reset but stops before the final state
    let code = WCode::plain(0, word("ba"));
    assert!(!verify_wcode(&a, &bab, &code).unwrap());
    let code = WCode::plain(0, word("bab"));
    assert!(verify_wcode(&a, &bab, &code).unwrap());
    let off = WCode::plain(0, word("bba"));
    assert!(matches!(verify_wcode(&a, &bab, &off), Err(Error::UndefinedTransition { .. })));
}

#[test]
fn huge_exponents_reduce_to_the_subset_orbit() {
    let mut rng = rng(33);
    let mut exercised = 0;
    for _ in 0..300 {
        let b = random_polycyclic(&mut rng, 4, 2);
        let a = random_dcsa(&mut rng, 5, 2);
        let Some(code) = solve(&a, &b).unwrap().witness else { continue };
        let sk = skeleton(&b).unwrap();
        let before = images_before_segments(&a, &b, &code);
        for (i, seg) in code.segments.iter().enumerate() {
            let Some(g) = sk.generator(seg.pump) else { continue };
            let big = (BigUint::from(1u32) << a.n_states()) + 3u32;
            let target = power_step(&a, &before[i], &g, &big).unwrap();
            let mut reduced = 0u32;
            while power_step(&a, &before[i], &g, &BigUint::from(reduced)).unwrap() != target {
                reduced += 1;
            }
            assert!(reduced < 1 << a.n_states());
            let with = |x: BigUint| {
                let mut c = code.clone();
                c.segments[i].exponent = x;
                verify_wcode(&a, &b, &c)
            };
            match (with(big), with(BigUint::from(reduced))) {
                (Ok(x), Ok(y)) => {
                    assert_eq!(x, y);
                    exercised += 1;
                }
                (Err(Error::PumpStateMismatch { .. }), Err(Error::PumpStateMismatch { .. })) => {}
                (Err(Error::PumpStateMismatch { .. }), Ok(_)) if reduced == 0 => {}
                other => panic!("unexpected verdicts {other:?}"),
            }
        }
    }
    assert!(exercised > 20);
}

#[test]
fn exponent_reduction_keeps_acceptance() {
    let mut rng = rng(34);
    for _ in 0..300 {
        let b = random_polycyclic(&mut rng, 4, 2);
        let a = random_dcsa(&mut rng, 5, 2);
        let Some(code) = solve(&a, &b).unwrap().witness else { continue };
        let sk = skeleton(&b).unwrap();
        let before = images_before_segments(&a, &b, &code);
        let mut reduced = code.clone();
        for (i, seg) in code.segments.iter().enumerate() {
            let Some(g) = sk.generator(seg.pump) else { continue };
            let target = power_step(&a, &before[i], &g, &seg.exponent).unwrap();
            let mut x = 0u32;
            while a.step(&before[i], &g.pow(x as usize)) != target {
                x += 1;
            }
            reduced.segments[i].exponent = BigUint::from(x);
        }
        // zero exponents never trigger the pump-state check
        assert!(verify_wcode(&a, &b, &reduced).unwrap());
    }
}

#[test]
fn expanded_witnesses_synchronize() {
    let mut rng = rng(35);
    for _ in 0..300 {
        let b = random_polycyclic(&mut rng, 4, 2);
        let a = random_dcsa(&mut rng, 5, 2);
        let r = solve(&a, &b).unwrap();
        assert_eq!(r.decision, brute_constrained(&a, &b));
        let Some(code) = r.witness else { continue };
        if code.segments.iter().any(|s| s.exponent > BigUint::from(1u32 << 10)) {
            continue;
        }
        let w = code.expand(&b, usize::MAX).unwrap().unwrap();
        assert_eq!(BigUint::from(w.len()), r.expanded_length.unwrap());
        let all: Vec<usize> = a.states().collect();
        assert_eq!(image(&a, &all, &w).len(), 1);
        assert!(nfa_accepts(&b, &w));
    }
}

#[test]
fn short_words_need_no_pumping() {
    let a = reset();
    let b = polycyclic::word_automaton(&alphabet(2), &word("ab")).unwrap();
    let r = solve(&a, &b).unwrap();
    let code = r.witness.unwrap();
    assert!(code.segments.iter().all(|s| s.exponent.is_zero()));
    assert_eq!(code.expand(&b, 10).unwrap().unwrap(), word("ab"));
}

#[test]
fn loop3_witnesses_verify() {
    let loop3 = aut(LOOP3);
    let mut rng = rng(36);
    let mut yes = 0;
    for _ in 0..200 {
        let n = rng.random_range(1..=5);
        let a = random_dcsa(&mut rng, n, 2);
        let expected = oracle(&a, &loop3).unwrap().decision;
        let r = solve(&a, &loop3).unwrap();
        let p = solve_p_case(&a, &loop3).unwrap();
        assert_eq!(r.decision, expected);
        assert_eq!(p.decision, expected);
        if let Some(code) = &r.witness {
            yes += 1;
            assert!(verify_wcode(&a, &loop3, code).unwrap());
            assert!(verify_wcode(&a, &loop3, p.witness.as_ref().unwrap()).unwrap());
        }
    }
    assert!(yes > 0);
}

#[test]
fn p_case_criterion_examples() {
    assert!(p_case_applicable(&aut(LOOP3)).unwrap());
    assert!(!p_case_applicable(&aut(BAB)).unwrap());
    let chain = polycyclic::word_automaton(&alphabet(2), &word("abba")).unwrap();
    assert!(p_case_applicable(&chain).unwrap());
    let a = reset();
    assert_eq!(solve_p_case(&a, &aut(BAB)).unwrap_err(), Error::PCaseNotApplicable);
}

#[test]
fn p_case_with_a_sink() {
    let a = reset();
    // (aa)*: a permutes the non-sink states, so no word of a's synchronizes
    let aa = polycyclic::star_automaton(&alphabet(2), &word("aa")).unwrap();
    assert!(p_case_applicable(&aa).unwrap());
    assert!(!solve_p_case(&a, &aa).unwrap().decision);
    // (ab)*: ab maps everything to the sink
    let ab = polycyclic::star_automaton(&alphabet(2), &word("ab")).unwrap();
    let r = solve_p_case(&a, &ab).unwrap();
    assert!(r.decision);
    let w = r.witness.unwrap().expand(&ab, 100).unwrap().unwrap();
    let all: Vec<usize> = a.states().collect();
    assert_eq!(image(&a, &all, &w), vec![0]);
}

#[test]
fn p_case_single_state() {
    let one = Automaton::dcsa_from_fn(alphabet(2), 1, None, [], |_, _| 0).unwrap();
    let mut rng = rng(37);
    for _ in 0..100 {
        let b = random_polycyclic(&mut rng, 4, 2);
        if !p_case_applicable(&b).unwrap() {
            continue;
        }
        let nonempty = all_words(2, 4).iter().any(|w| nfa_accepts(&b, w));
        assert_eq!(solve_p_case(&one, &b).unwrap().decision, nonempty);
    }
}

#[test]
fn p_case_agrees_with_search() {
    let mut rng = rng(38);
    let mut applicable = 0;
    for _ in 0..600 {
        let b = random_polycyclic(&mut rng, 4, 2);
        if !p_case_applicable(&b).unwrap() {
            continue;
        }
        applicable += 1;
        let a = random_dcsa(&mut rng, 5, 2);
        assert_eq!(solve_p_case(&a, &b).unwrap().decision, solve(&a, &b).unwrap().decision, "{b}");
    }
    assert!(applicable > 50);
}

#[test]
fn larger_constraint_keeps_yes() {
    let mut rng = rng(39);
    for _ in 0..200 {
        let b = random_polycyclic(&mut rng, 4, 2);
        let extra = random_polycyclic(&mut rng, 4, 2);
        let bigger = union_pc(&b, &extra).unwrap();
        let a = random_dcsa(&mut rng, 4, 2);
        if solve(&a, &b).unwrap().decision {
            assert!(solve(&a, &bigger).unwrap().decision);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn code_text_round_trip(seed in 0u64..5000, raw in proptest::collection::vec((0u64..u64::MAX, 0usize..5), 1..4)) {
        let mut rng = rng(seed);
        let b = random_polycyclic(&mut rng, 4, 2);
        let segments: Vec<Segment> = raw
            .into_iter()
            .enumerate()
            .map(|(i, (n, len))| Segment {
                pump: (i * 7 + len) % b.n_states(),
                exponent: BigUint::from(n) * BigUint::from(n),
                connector: random_word(&mut rng, 2, len),
            })
            .collect();
        let code = WCode { segments };
        let text = code.encode(&b);
        prop_assert_eq!(WCode::parse(&text, &b).unwrap(), code.clone());
        let binary = code.binary_encoding(&b);
        prop_assert!(binary.chars().all(|c| "01#ab".contains(c)));
        prop_assert_eq!(binary.matches('#').count(), code.segments.len());
    }
}
