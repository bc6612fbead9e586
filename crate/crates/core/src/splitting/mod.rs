//! Splitting graphs: DAGs of state sets rooted at the full state set, where
//! every internal node is the union of its children and carries a witness
//! test case whose observations each isolate one child.

mod build;
mod validate;

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use serde_json::json;
use thiserror::Error;

use crate::automaton::{Automaton, LabelId, StateSet};
use crate::testcase::{CcsArena, CcsTerm, TermId};

pub(crate) use build::LossWalker;
pub use build::{
    build_splitting_graph, split_node, Injectivity, InputChildren, LcaChoice, LeafOrder,
    SplitError, SplitPolicy, SplitPreference,
};
pub use validate::{
    check_splitting_graph, is_complete, label_injective, SplittingReport, Violation,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// How a node was split.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitKind {
    Output,
    Input(LabelId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitInfo {
    pub kind: SplitKind,
    pub injective: bool,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InducedSplitError {
    #[error("node is a leaf")]
    Leaf,
    #[error("successor set is not contained in the node")]
    NotContained,
}

#[derive(Clone, Debug)]
pub struct SplittingGraph {
    nodes: Vec<StateSet>,
    children: Vec<Vec<NodeId>>,
    parents: Vec<Vec<NodeId>>,
    witness: Vec<Option<TermId>>,
    info: Vec<Option<SplitInfo>>,
    index: HashMap<StateSet, NodeId>,
    arena: CcsArena,
}

impl SplittingGraph {
    /// The trivial graph with the single node `Q`.
    pub fn new(s: &Automaton) -> Self {
        let root = s.all_states();
        SplittingGraph {
            nodes: vec![root.clone()],
            children: vec![Vec::new()],
            parents: vec![Vec::new()],
            witness: vec![None],
            info: vec![None],
            index: HashMap::from([(root, NodeId::ROOT)]),
            arena: CcsArena::new(s.alphabet().clone()),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> NodeId {
        NodeId::ROOT
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn set(&self, v: NodeId) -> &StateSet {
        &self.nodes[v.index()]
    }

    pub fn node_of(&self, set: &StateSet) -> Option<NodeId> {
        self.index.get(set).copied()
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[v.index()]
    }

    pub fn parents(&self, v: NodeId) -> &[NodeId] {
        &self.parents[v.index()]
    }

    pub fn witness(&self, v: NodeId) -> Option<TermId> {
        self.witness[v.index()]
    }

    pub fn split_info(&self, v: NodeId) -> Option<SplitInfo> {
        self.info[v.index()]
    }

    /// The witness of `v` as a standalone term.
    pub fn witness_term(&self, v: NodeId) -> Option<CcsTerm> {
        self.witness(v).map(|w| {
            let mut arena = CcsArena::new(self.arena.alphabet().clone());
            let root = arena.import(&self.arena, w);
            CcsTerm { arena, root }
        })
    }

    pub fn arena(&self) -> &CcsArena {
        &self.arena
    }

    pub fn arena_mut(&mut self) -> &mut CcsArena {
        &mut self.arena
    }

    pub fn is_leaf(&self, v: NodeId) -> bool {
        self.children[v.index()].is_empty()
    }

    pub fn leaves(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.ids().filter(|&v| self.is_leaf(v))
    }

    pub fn internal_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.ids().filter(|&v| !self.is_leaf(v))
    }

    /// Node sets in canonical order.
    pub fn node_sets(&self) -> Vec<StateSet> {
        let mut v = self.nodes.clone();
        v.sort();
        v
    }

    /// Least common ancestors of `p`: internal nodes containing `p` none of
    /// whose children contains `p`, in canonical set order.
    pub fn lca_set(&self, p: &StateSet) -> Vec<NodeId> {
        let mut out = Vec::new();
        self.descend(p, |v| {
            if !self.is_leaf(v) {
                out.push(v);
            }
            false
        });
        out.sort_by(|a, b| self.set(*a).cmp(self.set(*b)));
        out
    }

    /// `Ok` if `p` has a least common ancestor, otherwise the leaves
    /// containing `p` at which every descent from the root stops.
    pub(crate) fn lca_frontier(&self, p: &StateSet) -> Result<(), Vec<NodeId>> {
        let mut leaves = Vec::new();
        let mut found = false;
        self.descend(p, |v| {
            if self.is_leaf(v) {
                leaves.push(v);
                false
            } else {
                found = true;
                true
            }
        });
        if found {
            Ok(())
        } else {
            Err(leaves)
        }
    }

    /// Visits the least common ancestors of `p`, and the leaves containing
    /// it, until `visit` returns true.
    fn descend(&self, p: &StateSet, mut visit: impl FnMut(NodeId) -> bool) {
        if !p.is_subset(self.set(NodeId::ROOT)) {
            return;
        }
        let mut seen = HashSet::from([NodeId::ROOT]);
        let mut stack = vec![NodeId::ROOT];
        while let Some(v) = stack.pop() {
            let mut below = false;
            for &c in self.children(v) {
                if p.is_subset(self.set(c)) {
                    below = true;
                    if seen.insert(c) {
                        stack.push(c);
                    }
                }
            }
            if !below && visit(v) {
                return;
            }
        }
    }

    /// `Π(p, μ, v)`: the nonempty sets `{q ∈ p | T(q, μ) ∈ c}` for children `c` of `v`.
    pub fn induced_split(
        &self,
        s: &Automaton,
        p: &StateSet,
        mu: LabelId,
        v: NodeId,
    ) -> Result<Vec<StateSet>, InducedSplitError> {
        if self.is_leaf(v) {
            return Err(InducedSplitError::Leaf);
        }
        if !s.after(p, &[mu]).is_subset(self.set(v)) {
            return Err(InducedSplitError::NotContained);
        }
        Ok(self.induced_split_unchecked(s, p, mu, v))
    }

    pub(crate) fn induced_split_unchecked(
        &self,
        s: &Automaton,
        p: &StateSet,
        mu: LabelId,
        v: NodeId,
    ) -> Vec<StateSet> {
        let mut out: Vec<StateSet> = self
            .children(v)
            .iter()
            .map(|&c| {
                let c = self.set(c);
                p.iter()
                    .filter(|&q| s.succ(q, mu).is_some_and(|t| c.contains(t)))
                    .collect::<StateSet>()
            })
            .filter(|d| !d.is_empty())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Turns leaf `l` into an internal node without checking any invariant.
    ///
    /// Children equal to existing nodes are shared. Returns the child ids.
    pub fn insert_split_unchecked(
        &mut self,
        l: NodeId,
        children: Vec<StateSet>,
        witness: TermId,
        info: Option<SplitInfo>,
    ) -> Vec<NodeId> {
        let mut ids = Vec::with_capacity(children.len());
        for c in children {
            let id = match self.index.get(&c) {
                Some(&id) => id,
                None => {
                    let id = NodeId(self.nodes.len() as u32);
                    self.index.insert(c.clone(), id);
                    self.nodes.push(c);
                    self.children.push(Vec::new());
                    self.parents.push(Vec::new());
                    self.witness.push(None);
                    self.info.push(None);
                    id
                }
            };
            if !ids.contains(&id) {
                ids.push(id);
                self.parents[id.index()].push(l);
            }
        }
        self.children[l.index()] = ids.clone();
        self.witness[l.index()] = Some(witness);
        self.info[l.index()] = info;
        ids
    }

    pub fn to_json(&self, s: &Automaton) -> serde_json::Value {
        let nodes: Vec<Vec<&str>> = self
            .nodes
            .iter()
            .map(|set| set.iter().map(|q| s.state_name(q)).collect())
            .collect();
        let edges: Vec<[usize; 2]> = self
            .ids()
            .flat_map(|v| self.children(v).iter().map(move |c| [v.index(), c.index()]))
            .collect();
        let witnesses: Vec<Option<String>> = self
            .witness
            .iter()
            .map(|w| w.map(|w| self.arena.print(w)))
            .collect();
        json!({ "nodes": nodes, "edges": edges, "witnesses": witnesses })
    }

    pub fn to_dot(&self, s: &Automaton) -> String {
        let mut out = String::from("digraph splitting {\n  node [shape=box];\n");
        for v in self.ids() {
            let mut label = self.set(v).display(s).to_string();
            if let Some(w) = self.witness(v) {
                label.push_str("\\n");
                label.push_str(&self.arena.print(w));
            }
            let _ = writeln!(
                out,
                "  n{} [label=\"{}\"];",
                v.index(),
                label.replace('"', "\\\"")
            );
        }
        for v in self.ids() {
            for c in self.children(v) {
                let _ = writeln!(out, "  n{} -> n{};", v.index(), c.index());
            }
        }
        out.push_str("}\n");
        out
    }
}
