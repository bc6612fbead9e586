//! Inputs shared by the benchmarks.

use suspension_adg::fixtures::{gen_random, gen_sn, RandomParams};
use suspension_adg::SuspensionAutomaton;

pub fn sn(n: usize) -> SuspensionAutomaton {
    gen_sn(n).expect("n >= 2")
}

/// A seeded random suspension automaton with two inputs and three outputs.
pub fn random(states: usize, density: f64, seed: u64) -> SuspensionAutomaton {
    gen_random(&RandomParams {
        states,
        inputs: 2,
        outputs: 3,
        density,
        seed,
    })
    .expect("feasible parameters")
}
