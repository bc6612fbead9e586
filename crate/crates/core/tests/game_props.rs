mod common;

use proptest::prelude::*;

use suspension_adg::automaton::compose;
use suspension_adg::fixtures::{gen_random_automaton, RandomParams};
use suspension_adg::game::{compute_invalid, naive_invalid_states, Move};
use suspension_adg::testcase::{distinguishes, is_test_case_for};
use suspension_adg::{
    check_suspension, pairwise_distinguisher, parse_automaton, Automaton, CompatibilityTable,
};

/// Round in which each state first becomes invalid when all states are
/// updated simultaneously.
fn synchronous_ranks(a: &Automaton) -> Vec<Option<u32>> {
    let mut rank: Vec<Option<u32>> = a.states().map(|q| a.is_blocking(q).then_some(0)).collect();
    for round in 1.. {
        let done =
            |q: suspension_adg::StateId, r: &[Option<u32>]| r[q.index()].is_some_and(|k| k < round);
        let next: Vec<Option<u32>> = a
            .states()
            .map(|q| {
                rank[q.index()].or_else(|| {
                    let by_input = a.ins(q).any(|i| done(a.succ(q, i).unwrap(), &rank));
                    let by_outputs = a.outs(q).all(|x| done(a.succ(q, x).unwrap(), &rank));
                    (by_input || by_outputs).then_some(round)
                })
            })
            .collect();
        if next == rank {
            break;
        }
        rank = next;
    }
    rank
}

fn random(seed: u64, states: usize, inputs: usize, outputs: usize, density: f64) -> Automaton {
    gen_random_automaton(&RandomParams {
        states,
        inputs,
        outputs,
        density,
        seed,
    })
    .unwrap()
}

#[test]
fn worklist_agrees_with_naive_fixpoint() {
    for seed in 0..200 {
        let a = random(
            seed,
            1 + seed as usize % 8,
            1 + seed as usize % 3,
            1 + seed as usize / 3 % 3,
            0.4,
        );
        let g = compute_invalid(&a);
        assert_eq!(g.invalid, naive_invalid_states(&a), "seed {seed}");
        assert!(g.visits <= 2 * a.num_transitions(), "seed {seed}");
    }
}

proptest! {
    #[test]
    fn moves_and_levels_are_consistent(seed in any::<u64>(), n in 1usize..12, d in 0.2f64..0.8) {
        let a = random(seed, n, 2, 2, d);
        let g = compute_invalid(&a);
        let ranks = synchronous_ranks(&a);
        for q in a.states() {
            prop_assert_eq!(g.level(q), ranks[q.index()]);
            match g.move_of(q) {
                None => prop_assert!(g.level(q).is_none()),
                Some(Move::Input(i)) => {
                    prop_assert!(a.alphabet().is_input(i));
                    let t = a.succ(q, i).unwrap();
                    prop_assert_eq!(g.level(t).map(|k| k + 1), g.level(q));
                }
                Some(Move::Theta) => {
                    let level = g.level(q).unwrap();
                    for x in a.outs(q) {
                        let t = a.succ(q, x).unwrap();
                        prop_assert!(g.level(t).is_some_and(|k| k < level));
                    }
                }
            }
        }
        prop_assert!(g.visits <= 2 * a.num_transitions());
    }

    #[test]
    fn compatibility_is_reflexive_and_symmetric(seed in any::<u64>(), n in 1usize..9) {
        let a = random(seed, n, 2, 2, 0.5);
        let Ok(s) = check_suspension(a) else { return Ok(()) };
        let table = CompatibilityTable::new(&s);
        let product = compose(&s, &s).unwrap();
        let invalid = compute_invalid(&product.automaton).invalid;
        for q in s.states() {
            prop_assert!(table.compatible(q, q));
            for r in s.states() {
                prop_assert_eq!(table.compatible(q, r), table.compatible(r, q));
                let p = product.state_of(q, r).unwrap();
                prop_assert_eq!(table.compatible(q, r), !invalid.contains(p));
            }
        }
    }
}

#[test]
fn distinguishers_for_random_incompatible_pairs() {
    for s in common::small_corpus(150) {
        let table = CompatibilityTable::new(&s);
        for (q, r) in table.incompatible_pairs_in(&s.all_states()) {
            let t = pairwise_distinguisher(&s, &table, q, r).unwrap();
            assert!(t.is_deterministic());
            let tc = t.associated_automaton().unwrap();
            assert!(tc.automaton.is_acyclic());
            let pair = [q, r].into_iter().collect();
            assert_eq!(is_test_case_for(&t.arena, t.root, &s, &pair), Ok(()));
            assert_eq!(distinguishes(&t.arena, t.root, &s, q, r), Ok(true), "{t}");
        }
    }
}

#[test]
fn compatibility_is_not_transitive() {
    let text = std::fs::read_to_string(common::fixtures_dir().join("nontransitive.sa")).unwrap();
    let s = check_suspension(parse_automaton(&text).unwrap()).unwrap();
    let table = CompatibilityTable::new(&s);
    let st = |n: &str| s.state(n).unwrap();
    assert!(table.compatible(st("2"), st("5")));
    assert!(table.compatible(st("5"), st("3")));
    assert!(!table.compatible(st("2"), st("3")));
}
