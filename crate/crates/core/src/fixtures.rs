//! Named example automata and seeded random generators.
//!
//! Random automata come from a SplitMix64 stream, so a seed yields the same
//! automaton on every platform. State names are `"1"`, `"2"`, ...; inputs
//! are `a1`, `a2`, ... and outputs `x1`, `x2`, .... A generator asked for
//! zero inputs declares the unused input `a0`, since the input alphabet may
//! not be empty.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::automaton::{
    check_suspension, serialize_automaton, Automaton, AutomatonBuilder, Format, SuspensionAutomaton,
};
use crate::testcase::CcsTerm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FixtureName {
    RunningExample,
    NoAdg,
    InducedSplitTrap,
    CompatFailure,
    Nondisjunct,
    CcsExample,
}

impl FixtureName {
    pub const ALL: [FixtureName; 6] = [
        FixtureName::RunningExample,
        FixtureName::NoAdg,
        FixtureName::InducedSplitTrap,
        FixtureName::CompatFailure,
        FixtureName::Nondisjunct,
        FixtureName::CcsExample,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FixtureName::RunningExample => "running_example",
            FixtureName::NoAdg => "no_adg",
            FixtureName::InducedSplitTrap => "induced_split_trap",
            FixtureName::CompatFailure => "compat_failure",
            FixtureName::Nondisjunct => "nondisjunct",
            FixtureName::CcsExample => "ccs_example",
        }
    }

    /// File name under `fixtures/`.
    pub fn file_name(self) -> String {
        let ext = if self == FixtureName::CcsExample {
            "ccs"
        } else {
            "sa"
        };
        format!("{}.{ext}", self.as_str())
    }
}

impl fmt::Display for FixtureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("S_n needs n >= 3, got {0}")]
    SnTooSmall(usize),
    #[error("infeasible parameters: {0}")]
    Infeasible(&'static str),
}

impl FromStr for FixtureName {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, GenError> {
        FixtureName::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| GenError::UnknownFixture(s.to_string()))
    }
}

#[derive(Clone, Debug)]
pub enum Fixture {
    Automaton(SuspensionAutomaton),
    Term(CcsTerm),
}

fn build(
    inputs: &[&str],
    outputs: &[&str],
    initial: &str,
    trans: &[(&str, &str, &str)],
) -> Automaton {
    let mut b = AutomatonBuilder::default();
    for i in inputs {
        b.input(*i);
    }
    for o in outputs {
        b.output(*o);
    }
    b.initial(initial);
    for &(f, l, t) in trans {
        b.transition(f, l, t);
    }
    b.build().expect("fixture is well formed")
}

fn automaton_fixture(name: FixtureName) -> Automaton {
    match name {
        FixtureName::RunningExample | FixtureName::CcsExample => build(
            &["a"],
            &["x", "y"],
            "1",
            &[
                ("1", "x", "1"),
                ("1", "y", "1"),
                ("1", "a", "3"),
                ("2", "a", "4"),
                ("2", "x", "4"),
                ("3", "x", "4"),
                ("4", "y", "2"),
            ],
        ),
        FixtureName::NoAdg => build(
            &["a", "b"],
            &["x", "y"],
            "1",
            &[
                ("1", "a", "1"),
                ("1", "y", "2"),
                ("1", "b", "2"),
                ("2", "a", "1"),
                ("2", "b", "3"),
                ("2", "x", "2"),
                ("3", "y", "2"),
                ("3", "a", "2"),
                ("3", "b", "3"),
            ],
        ),
        FixtureName::InducedSplitTrap => build(
            &["a"],
            &["x", "y", "z"],
            "1",
            &[
                ("1", "x", "1"),
                ("1", "a", "3"),
                ("2", "x", "2"),
                ("2", "a", "4"),
                ("3", "z", "4"),
                ("4", "z", "6"),
                ("5", "z", "3"),
                ("5", "a", "7"),
                ("6", "z", "5"),
                ("6", "a", "8"),
                ("7", "x", "8"),
                ("8", "y", "8"),
            ],
        ),
        FixtureName::CompatFailure => build(
            &["a", "b"],
            &["t", "x", "y", "z"],
            "1",
            &[
                ("1", "t", "1"),
                ("2", "x", "2"),
                ("3", "x", "3"),
                ("4", "x", "4"),
                ("5", "z", "5"),
                ("6", "y", "6"),
                ("7", "y", "7"),
                ("8", "y", "8"),
                ("2", "a", "6"),
                ("3", "a", "6"),
                ("4", "a", "8"),
                ("6", "a", "2"),
                ("7", "a", "2"),
                ("8", "a", "4"),
                ("2", "b", "1"),
                ("6", "b", "1"),
                ("4", "b", "5"),
                ("8", "b", "5"),
            ],
        ),
        FixtureName::Nondisjunct => build(
            &["a"],
            &["x", "y"],
            "1",
            &[
                ("1", "x", "2"),
                ("2", "x", "3"),
                ("2", "y", "3"),
                ("3", "y", "1"),
            ],
        ),
    }
}

pub const CCS_EXAMPLE: &str = "a.(x.0 + y.0)";

pub fn fixture(name: FixtureName) -> Fixture {
    let a = automaton_fixture(name);
    if name == FixtureName::CcsExample {
        let t = CcsTerm::parse(a.alphabet().clone(), CCS_EXAMPLE).expect("valid term");
        return Fixture::Term(t);
    }
    Fixture::Automaton(check_suspension(a).expect("fixtures are non-blocking"))
}

/// The automaton of a fixture; the term fixture yields the automaton its
/// alphabet is taken from.
pub fn fixture_automaton(name: FixtureName) -> SuspensionAutomaton {
    check_suspension(automaton_fixture(name)).expect("fixtures are non-blocking")
}

/// Canonical file contents of a fixture.
pub fn fixture_text(name: FixtureName) -> String {
    match fixture(name) {
        Fixture::Automaton(a) => serialize_automaton(&a, Format::Sa),
        Fixture::Term(t) => format!("{t}\n"),
    }
}

/// The family `S_n` whose splitting graph has `2^(n-1)` nodes.
pub fn gen_sn(n: usize) -> Result<SuspensionAutomaton, GenError> {
    if n < 3 {
        return Err(GenError::SnTooSmall(n));
    }
    let mut b = AutomatonBuilder::default();
    b.input("a0").initial("1");
    for x in 1..=n {
        b.output(x.to_string());
    }
    b.transition(n.to_string(), n.to_string(), "1");
    for s in 1..n {
        for x in (1..n).filter(|&x| x != s) {
            b.transition(s.to_string(), x.to_string(), (s + 1).to_string());
        }
    }
    let a = b.build().expect("S_n is well formed");
    Ok(check_suspension(a).expect("S_n is non-blocking"))
}

/// SplitMix64 pseudo-random stream.
#[derive(Clone, Debug)]
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomParams {
    pub states: usize,
    pub inputs: usize,
    pub outputs: usize,
    /// Probability that a `(state, label)` pair has a transition.
    pub density: f64,
    pub seed: u64,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            states: 6,
            inputs: 2,
            outputs: 2,
            density: 0.5,
            seed: 0,
        }
    }
}

fn random(p: &RandomParams, force_output: bool) -> Result<Automaton, GenError> {
    if p.outputs == 0 {
        return Err(GenError::Infeasible("at least one output is required"));
    }
    if p.states == 0 {
        return Err(GenError::Infeasible("at least one state is required"));
    }
    if !(0.0..=1.0).contains(&p.density) {
        return Err(GenError::Infeasible("density must lie in [0, 1]"));
    }
    let mut rng = SplitMix64::new(p.seed);
    let inputs: Vec<String> = if p.inputs == 0 {
        vec!["a0".to_string()]
    } else {
        (1..=p.inputs).map(|i| format!("a{i}")).collect()
    };
    let outputs: Vec<String> = (1..=p.outputs).map(|i| format!("x{i}")).collect();
    let mut b = AutomatonBuilder::default();
    for i in &inputs {
        b.input(i.as_str());
    }
    for o in &outputs {
        b.output(o.as_str());
    }
    b.initial("1");
    let real_inputs = if p.inputs == 0 { &[][..] } else { &inputs[..] };
    for q in 1..=p.states {
        b.state(q.to_string());
        let mut has_output = false;
        for (i, label) in real_inputs.iter().chain(&outputs).enumerate() {
            if rng.next_f64() < p.density {
                let t = 1 + rng.below(p.states);
                b.transition(q.to_string(), label.as_str(), t.to_string());
                has_output |= i >= real_inputs.len();
            }
        }
        if force_output && !has_output {
            let x = &outputs[rng.below(outputs.len())];
            let t = 1 + rng.below(p.states);
            b.transition(q.to_string(), x.as_str(), t.to_string());
        }
    }
    Ok(b.build().expect("generated automaton is well formed"))
}

/// A random suspension automaton; states without outputs get one.
pub fn gen_random(p: &RandomParams) -> Result<SuspensionAutomaton, GenError> {
    let a = random(p, true)?;
    Ok(check_suspension(a).expect("every state has an output"))
}

/// A random automaton that may contain blocking states.
pub fn gen_random_automaton(p: &RandomParams) -> Result<Automaton, GenError> {
    random(p, false)
}
