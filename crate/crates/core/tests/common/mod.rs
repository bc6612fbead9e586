#![allow(dead_code)]

use std::path::PathBuf;

use suspension_adg::fixtures::{fixture_automaton, gen_random, FixtureName, RandomParams};
use suspension_adg::SuspensionAutomaton;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Every automaton fixture, paired with its name.
pub fn fixture_automata() -> Vec<(FixtureName, SuspensionAutomaton)> {
    FixtureName::ALL
        .into_iter()
        .filter(|&f| f != FixtureName::CcsExample)
        .map(|f| (f, fixture_automaton(f)))
        .collect()
}

/// Parameters of the `i`-th small random automaton: 2 to 8 states and up
/// to three labels of each kind.
pub fn small_params(i: u64) -> RandomParams {
    RandomParams {
        states: 2 + (i % 7) as usize,
        inputs: 1 + (i / 7 % 3) as usize,
        outputs: 1 + (i / 21 % 3) as usize,
        density: [0.3, 0.5, 0.7][(i / 63 % 3) as usize],
        seed: 1000 + i,
    }
}

pub fn small_corpus(count: u64) -> Vec<SuspensionAutomaton> {
    (0..count)
        .map(|i| gen_random(&small_params(i)).unwrap())
        .collect()
}

/// The 200-state corpus used for the statistics comparison.
pub fn large_params(seed: u64) -> RandomParams {
    RandomParams {
        states: 200,
        inputs: 2,
        outputs: 3,
        density: 0.3,
        seed,
    }
}
