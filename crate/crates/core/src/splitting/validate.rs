use std::collections::HashSet;
use std::fmt;

use super::{NodeId, SplittingGraph};
use crate::automaton::{Automaton, LabelId, StateId, StateSet};
use crate::game::CompatibilityTable;
use crate::testcase::TermId;

/// One broken splitting-graph condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    RootNotFullSet,
    ExtraRoot(NodeId),
    NotProperSubset {
        parent: NodeId,
        child: NodeId,
    },
    UnionMismatch(NodeId),
    MissingWitness(NodeId),
    /// An observation of the witness whose enabled states no child contains.
    UnsoundWitness {
        node: NodeId,
        trace: Vec<LabelId>,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RootNotFullSet => write!(f, "root is not the full state set"),
            Violation::ExtraRoot(v) => write!(f, "node {} has no parent", v.index()),
            Violation::NotProperSubset { parent, child } => write!(
                f,
                "child {} is not a proper subset of {}",
                child.index(),
                parent.index()
            ),
            Violation::UnionMismatch(v) => {
                write!(f, "node {} is not the union of its children", v.index())
            }
            Violation::MissingWitness(v) => write!(f, "internal node {} has no witness", v.index()),
            Violation::UnsoundWitness { node, trace } => write!(
                f,
                "witness of node {} does not isolate a child after {} labels",
                node.index(),
                trace.len()
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SplittingReport {
    pub violations: Vec<Violation>,
}

impl SplittingReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every defining condition of a splitting graph for `s`.
pub fn check_splitting_graph(s: &Automaton, y: &SplittingGraph) -> SplittingReport {
    let mut violations = Vec::new();
    if y.set(y.root()) != &s.all_states() {
        violations.push(Violation::RootNotFullSet);
    }
    for v in y.ids() {
        if v != y.root() && y.parents(v).is_empty() {
            violations.push(Violation::ExtraRoot(v));
        }
    }
    for v in y.internal_nodes() {
        let set = y.set(v);
        let mut union = StateSet::new();
        for &c in y.children(v) {
            if !y.set(c).is_proper_subset(set) {
                violations.push(Violation::NotProperSubset {
                    parent: v,
                    child: c,
                });
            }
            union = union.union(y.set(c));
        }
        if &union != set {
            violations.push(Violation::UnionMismatch(v));
        }
        match y.witness(v) {
            None => violations.push(Violation::MissingWitness(v)),
            Some(w) => {
                let mut walk = WitnessWalk {
                    s,
                    y,
                    node: v,
                    seen: HashSet::new(),
                    trace: Vec::new(),
                };
                let start: Vec<(StateId, StateId)> = set.iter().map(|q| (q, q)).collect();
                if let Some(trace) = walk.run(w, start) {
                    violations.push(Violation::UnsoundWitness { node: v, trace });
                }
            }
        }
    }
    SplittingReport { violations }
}

struct WitnessWalk<'a> {
    s: &'a Automaton,
    y: &'a SplittingGraph,
    node: NodeId,
    seen: HashSet<(TermId, Vec<(StateId, StateId)>)>,
    trace: Vec<LabelId>,
}

impl WitnessWalk<'_> {
    /// `tracked` holds `(origin, current)` for every origin enabling the trace so far.
    fn run(&mut self, g: TermId, tracked: Vec<(StateId, StateId)>) -> Option<Vec<LabelId>> {
        let origins: StateSet = tracked.iter().map(|&(o, _)| o).collect();
        let y = self.y;
        if y.children(self.node)
            .iter()
            .any(|&c| origins.is_subset(y.set(c)))
        {
            return None;
        }
        if !self.seen.insert((g, tracked.clone())) {
            return None;
        }
        let d = y.arena().transitions(g);
        if d.is_empty() {
            return Some(self.trace.clone());
        }
        for (l, next) in d {
            let moved: Vec<(StateId, StateId)> = tracked
                .iter()
                .filter_map(|&(o, r)| self.s.succ(r, l).map(|r2| (o, r2)))
                .collect();
            if moved.is_empty() {
                continue;
            }
            self.trace.push(l);
            if let Some(t) = self.run(next, moved) {
                return Some(t);
            }
            self.trace.pop();
        }
        None
    }
}

/// Whether `mu` keeps every incompatible pair of `set` apart.
pub fn label_injective(
    s: &Automaton,
    table: &CompatibilityTable,
    set: &StateSet,
    mu: LabelId,
) -> bool {
    let output = s.alphabet().is_output(mu);
    table.incompatible_pairs_in(set).into_iter().all(|(q, r)| {
        match (s.succ(q, mu), s.succ(r, mu)) {
            (Some(q2), Some(r2)) => !table.compatible(q2, r2),
            _ => output,
        }
    })
}

/// Every leaf is pairwise compatible.
pub fn is_complete(y: &SplittingGraph, table: &CompatibilityTable) -> bool {
    y.leaves().all(|l| table.all_compatible(y.set(l)))
}
