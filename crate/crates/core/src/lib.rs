//! Adaptive distinguishing test cases for suspension automata.
//!
//! The pipeline runs from an [`automaton::SuspensionAutomaton`] through the
//! compatibility game ([`game::CompatibilityTable`]) and a splitting graph
//! ([`splitting::build_splitting_graph`]) to an extracted test case
//! ([`extraction::comp_dg`]).

pub mod automaton;
pub mod extraction;
pub mod fixtures;
pub mod game;
pub mod splitting;
pub mod testcase;

pub use automaton::{
    check_suspension, parse_automaton, serialize_automaton, Alphabet, Automaton, AutomatonError,
    Format, LabelId, StateId, StateSet, SuspensionAutomaton,
};
pub use extraction::{comp_dg, extract_report, AdgReport, ExtractError, Extraction};
pub use game::{pairwise_distinguisher, CompatibilityTable};
pub use splitting::{build_splitting_graph, SplitError, SplitPolicy, SplittingGraph};
pub use testcase::{CcsArena, CcsTerm, TermId};
