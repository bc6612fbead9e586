//! Extraction of an adaptive distinguishing test case from a complete
//! splitting graph, plus the statistics reported for it.
//!
//! [`comp_dg`] walks the witnesses of the graph while tracking the current
//! set of specification states. Whenever a leaf of the term under
//! construction still holds an incompatible pair, the witness of a least
//! common ancestor of that set is grafted onto it.

mod oracle;
mod stats;

use std::collections::HashMap;

use serde_json::json;
use thiserror::Error;

use crate::automaton::{Automaton, LabelId, StateId, StateSet};
use crate::game::CompatibilityTable;
use crate::splitting::LossWalker;
use crate::splitting::{LcaChoice, SplittingGraph};
use crate::testcase::{
    classify_pairs, is_test_case_for, CcsArena, CcsNode, CcsTerm, ShapeError, TermId,
};

pub use oracle::{adg_exists_oracle, OracleError, OracleOutcome, ORACLE_STATE_LIMIT};
pub use stats::{pair_percentage, stats_table, StatsRow, STATS_COLUMNS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtractError {
    #[error("splitting graph is incomplete: {0} has no least common ancestor")]
    Incomplete(String),
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

/// Result of [`comp_dg`].
#[derive(Clone, Debug)]
pub struct Extraction {
    pub term: CcsTerm,
    /// Most witness grafts performed along a single branch.
    pub max_grafts: usize,
}

struct Extractor<'a> {
    s: &'a Automaton,
    table: &'a CompatibilityTable,
    y: &'a SplittingGraph,
    choice: LcaChoice,
    arena: CcsArena,
    memo: HashMap<(StateSet, TermId), (TermId, usize)>,
    loss: LossWalker,
}

impl Extractor<'_> {
    fn comp(&mut self, p: StateSet, f: TermId) -> Result<(TermId, usize), ExtractError> {
        if self.table.all_compatible(&p) {
            return Ok((f, 0));
        }
        let key = (p, f);
        if let Some(&hit) = self.memo.get(&key) {
            return Ok(hit);
        }
        let (p, f) = key;
        let result = match self.arena.node(f) {
            CcsNode::Nil => {
                let lcas = self.y.lca_set(&p);
                if lcas.is_empty() {
                    return Err(ExtractError::Incomplete(p.display(self.s).to_string()));
                }
                let v = match self.choice {
                    LcaChoice::First => lcas[0],
                    LcaChoice::MostPreserved => {
                        let pairs = self.table.incompatible_pairs_in(&p);
                        self.loss.choose(self.y, self.s, self.table, &lcas, &pairs)
                    }
                };
                let w = self.y.witness(v).expect("internal node");
                let (t, grafts) = self.comp(p.clone(), w)?;
                (t, grafts + 1)
            }
            CcsNode::Prefix(mu, body) => {
                let (t, grafts) = self.comp(self.s.after(&p, &[mu]), body)?;
                (self.arena.prefix(mu, t), grafts)
            }
            CcsNode::Sum(l, r) => {
                let (tl, gl) = self.comp(p.clone(), l)?;
                let (tr, gr) = self.comp(p.clone(), r)?;
                (self.arena.sum(tl, tr), gl.max(gr))
            }
        };
        self.memo.insert((p, f), result);
        Ok(result)
    }
}

/// Retrieves a test case from a complete splitting graph.
pub fn comp_dg(
    s: &Automaton,
    table: &CompatibilityTable,
    y: &SplittingGraph,
    choice: LcaChoice,
) -> Result<Extraction, ExtractError> {
    let mut ex = Extractor {
        s,
        table,
        y,
        choice,
        arena: y.arena().clone(),
        memo: HashMap::new(),
        loss: LossWalker::default(),
    };
    let (root, max_grafts) = ex.comp(s.all_states(), TermId::NIL)?;
    let mut arena = CcsArena::new(s.alphabet().clone());
    let root = arena.import(&ex.arena, root);
    Ok(Extraction {
        term: CcsTerm { arena, root },
        max_grafts,
    })
}

/// Checks that every observation of `t` ends in a pairwise compatible
/// current set, returning a counterexample trace otherwise.
pub fn check_post_contract(
    s: &Automaton,
    table: &CompatibilityTable,
    term: &CcsTerm,
) -> Result<(), Vec<LabelId>> {
    let mut seen = std::collections::HashSet::new();
    let mut trace = Vec::new();
    match post_walk(
        s,
        table,
        &term.arena,
        term.root,
        s.all_states(),
        &mut seen,
        &mut trace,
    ) {
        Some(t) => Err(t),
        None => Ok(()),
    }
}

fn post_walk(
    s: &Automaton,
    table: &CompatibilityTable,
    arena: &CcsArena,
    g: TermId,
    p: StateSet,
    seen: &mut std::collections::HashSet<(TermId, StateSet)>,
    trace: &mut Vec<LabelId>,
) -> Option<Vec<LabelId>> {
    if p.len() <= 1 {
        return None;
    }
    let d = arena.transitions(g);
    if d.is_empty() {
        return (!table.all_compatible(&p)).then(|| trace.clone());
    }
    if !seen.insert((g, p.clone())) {
        return None;
    }
    for (l, next) in d {
        trace.push(l);
        if let Some(t) = post_walk(s, table, arena, next, s.after(&p, &[l]), seen, trace) {
            return Some(t);
        }
        trace.pop();
    }
    None
}

/// Statistics of an extracted test case.
#[derive(Clone, Debug)]
pub struct AdgReport {
    pub term: CcsTerm,
    pub states: usize,
    pub compatible_pairs: usize,
    pub depth: usize,
    pub incompatible_pairs: usize,
    pub distinguished: usize,
    pub missed: Vec<(StateId, StateId)>,
    pub splitting_nodes: usize,
    /// Per observation, the number of states enabling it; `None` when the
    /// observations exceed the enumeration cap.
    pub leaf_sizes: Option<Vec<usize>>,
    /// Why the term is not a test case for all states, if it is not.
    pub test_case_violation: Option<String>,
    pub max_grafts: usize,
}

impl AdgReport {
    pub fn to_json(&self, s: &Automaton) -> serde_json::Value {
        let missed: Vec<_> = self
            .missed
            .iter()
            .map(|&(q, r)| json!([s.state_name(q), s.state_name(r)]))
            .collect();
        json!({
            "term": self.term.to_string(),
            "states": self.states,
            "compatible_pairs": self.compatible_pairs,
            "depth": self.depth,
            "incompatible_pairs": self.incompatible_pairs,
            "distinguished": self.distinguished,
            "missed": missed,
            "splitting_nodes": self.splitting_nodes,
            "leaf_sizes": self.leaf_sizes,
            "test_case": self.test_case_violation.is_none(),
            "test_case_violation": self.test_case_violation,
        })
    }
}

/// Runs [`comp_dg`] and classifies every incompatible pair.
pub fn extract_report(
    s: &Automaton,
    table: &CompatibilityTable,
    y: &SplittingGraph,
    choice: LcaChoice,
    obs_cap: usize,
) -> Result<AdgReport, ExtractError> {
    let Extraction { term, max_grafts } = comp_dg(s, table, y, choice)?;
    let all = s.all_states();
    let check = classify_pairs(&term.arena, term.root, s, &all, table)?;
    let test_case_violation = is_test_case_for(&term.arena, term.root, s, &all)
        .err()
        .map(|e| e.to_string());
    let leaf_sizes = match term.obs(obs_cap) {
        Ok(obs) => Some(
            obs.iter()
                .map(|sigma| {
                    s.states()
                        .filter(|&q| s.after_state(q, sigma).is_some())
                        .count()
                })
                .collect(),
        ),
        Err(ShapeError::ObsCapExceeded(_)) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(AdgReport {
        depth: term.depth(),
        states: s.num_states(),
        compatible_pairs: table.compatible_pairs().len(),
        incompatible_pairs: check.distinguished.len() + check.missed.len(),
        distinguished: check.distinguished.len(),
        missed: check.missed,
        splitting_nodes: y.len(),
        leaf_sizes,
        test_case_violation,
        max_grafts,
        term,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{check_suspension, parse_automaton, SuspensionAutomaton};
    use crate::splitting::{build_splitting_graph, SplitPolicy};

    const RUNNING: &str = "inputs a\noutputs x y\ninitial 1\n\
        trans 1 x 1\ntrans 1 y 1\ntrans 1 a 3\ntrans 2 a 4\ntrans 2 x 4\ntrans 3 x 4\ntrans 4 y 2\n";

    fn running() -> SuspensionAutomaton {
        check_suspension(parse_automaton(RUNNING).unwrap()).unwrap()
    }

    #[test]
    fn running_example_adg() {
        let s = running();
        let table = CompatibilityTable::new(&s);
        let y = build_splitting_graph(&s, &table, SplitPolicy::default()).unwrap();
        let ex = comp_dg(&s, &table, &y, LcaChoice::MostPreserved).unwrap();
        assert_eq!(
            ex.term.to_string(),
            "x.(x.0 + y.a.(x.0 + y.0)) + y.a.(x.0 + y.0)"
        );
        assert!(ex.max_grafts < s.num_states());
        assert_eq!(check_post_contract(&s, &table, &ex.term), Ok(()));
        let r = extract_report(&s, &table, &y, LcaChoice::MostPreserved, 1000).unwrap();
        assert_eq!(r.incompatible_pairs, 5);
        assert!(r.missed.is_empty());
        assert_eq!(r.depth, 4);
        assert_eq!(r.splitting_nodes, 8);
        assert!(r.test_case_violation.is_none());
        // observations xx, xyax, xyay, yax, yay
        assert_eq!(r.leaf_sizes, Some(vec![1, 1, 2, 1, 1]));
    }

    #[test]
    fn all_compatible_automaton_yields_nil() {
        let s = check_suspension(
            parse_automaton("inputs a\noutputs x\ninitial 1\ntrans 1 x 2\ntrans 2 x 1\n").unwrap(),
        )
        .unwrap();
        let table = CompatibilityTable::new(&s);
        let y = build_splitting_graph(&s, &table, SplitPolicy::default()).unwrap();
        assert_eq!(y.len(), 1);
        let ex = comp_dg(&s, &table, &y, LcaChoice::MostPreserved).unwrap();
        assert!(ex.term.is_nil());
    }

    #[test]
    fn incomplete_graph_is_reported() {
        let s = running();
        let table = CompatibilityTable::new(&s);
        let y = SplittingGraph::new(&s);
        assert!(matches!(
            comp_dg(&s, &table, &y, LcaChoice::First),
            Err(ExtractError::Incomplete(_))
        ));
    }
}
