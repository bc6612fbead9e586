use std::collections::{BTreeSet, HashMap, HashSet};
use std::rc::Rc;

use thiserror::Error;

use super::validate::label_injective;
use super::{NodeId, SplitInfo, SplitKind, SplittingGraph};
use crate::automaton::{Automaton, LabelId, StateId, StateSet};
use crate::game::CompatibilityTable;
use crate::testcase::{CcsArena, TermId};

/// Which split to try first when a leaf admits both kinds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SplitPreference {
    #[default]
    Output,
    Input,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Injectivity {
    /// Take the first available split.
    #[default]
    Ignore,
    /// Search every leaf for an injective split, falling back to any split.
    Prefer,
    /// Only perform injective splits.
    Require,
}

/// Children of an input split.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InputChildren {
    /// `d ∪ (l \ enabled(l, a))` for each induced part `d`.
    #[default]
    WithDisabled,
    /// The induced parts alone. Unsound; kept to demonstrate the failure.
    InducedOnly,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LeafOrder {
    /// Leaves holding the incompatible pair of least level first.
    #[default]
    MinLevel,
    Canonical,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LcaChoice {
    /// The ancestor whose witness keeps the most incompatible pairs apart.
    #[default]
    MostPreserved,
    First,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SplitPolicy {
    pub preference: SplitPreference,
    pub injectivity: Injectivity,
    pub input_children: InputChildren,
    pub leaf_order: LeafOrder,
    pub lca_choice: LcaChoice,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SplitError {
    #[error("splitting graph is already complete")]
    Complete,
    #[error("no leaf can be split")]
    NoSplittableLeaf,
    #[error("no injective split of {leaf}")]
    NoInjectiveSplit { leaf: String },
    #[error("split of {leaf} has no children")]
    EmptyChildren { leaf: String },
    #[error("children of {leaf} cover {union} instead")]
    UnionViolation { leaf: String, union: String },
    #[error("child {child} of {leaf} is not a proper nonempty subset")]
    NotProperSubset { leaf: String, child: String },
}

struct Plan {
    kind: SplitKind,
    children: Vec<StateSet>,
    witness: TermId,
    injective: bool,
}

/// Counts, per candidate ancestor, the incompatible pairs its witness keeps apart.
#[derive(Default)]
pub(crate) struct LossWalker {
    memo: HashMap<(TermId, StateId, StateId), bool>,
}

impl LossWalker {
    /// Whether running `g` from `q` and `r` can make the pair indistinguishable:
    /// the states become compatible, or one of them refuses an input.
    pub(crate) fn lost(
        &mut self,
        arena: &CcsArena,
        s: &Automaton,
        table: &CompatibilityTable,
        g: TermId,
        q: StateId,
        r: StateId,
    ) -> bool {
        if table.compatible(q, r) {
            return true;
        }
        let key = if q <= r { (g, q, r) } else { (g, r, q) };
        if let Some(&b) = self.memo.get(&key) {
            return b;
        }
        let d = arena.transitions(g);
        let result = d
            .iter()
            .any(|&(l, next)| match (s.succ(q, l), s.succ(r, l)) {
                (Some(q2), Some(r2)) => self.lost(arena, s, table, next, q2, r2),
                (None, None) => false,
                _ => s.alphabet().is_input(l),
            });
        self.memo.insert(key, result);
        result
    }

    /// Picks among `candidates` the node whose witness loses the fewest of `pairs`.
    pub(crate) fn choose(
        &mut self,
        y: &SplittingGraph,
        s: &Automaton,
        table: &CompatibilityTable,
        candidates: &[NodeId],
        pairs: &[(StateId, StateId)],
    ) -> NodeId {
        if candidates.len() == 1 || pairs.is_empty() {
            return candidates[0];
        }
        let mut best = candidates[0];
        let mut best_score = None;
        for &v in candidates {
            let w = y.witness(v).expect("internal node");
            let score = pairs
                .iter()
                .filter(|&&(q, r)| !self.lost(y.arena(), s, table, w, q, r))
                .count();
            if best_score.is_none_or(|b| score > b) {
                best = v;
                best_score = Some(score);
            }
        }
        best
    }
}

type Key = (u32, StateSet, NodeId);

struct Builder<'a> {
    s: &'a Automaton,
    table: &'a CompatibilityTable,
    policy: SplitPolicy,
    loss: LossWalker,
    /// Unsplit leaves holding an incompatible pair, in the policy's order.
    queue: BTreeSet<Key>,
    keys: HashMap<NodeId, Key>,
    /// Per pass (injective only, then any), leaves that may admit a split.
    ready: [BTreeSet<Key>; 2],
    synced: usize,
    info: HashMap<NodeId, Rc<LeafInfo>>,
    /// Leaf and label pairs whose successor set has no least common ancestor.
    blocked: HashSet<(NodeId, LabelId)>,
    watchers: HashMap<NodeId, Vec<(NodeId, LabelId)>>,
}

/// Enabled labels of a leaf.
struct LeafInfo {
    outputs: Vec<LabelId>,
    /// Outputs enabled by every state of the leaf.
    full: Vec<LabelId>,
    inputs: Vec<LabelId>,
    outputs_injective: bool,
    injective_inputs: Vec<LabelId>,
}

impl<'a> Builder<'a> {
    fn new(s: &'a Automaton, table: &'a CompatibilityTable, policy: SplitPolicy) -> Self {
        Builder {
            s,
            table,
            policy,
            loss: LossWalker::default(),
            queue: BTreeSet::new(),
            keys: HashMap::new(),
            ready: [BTreeSet::new(), BTreeSet::new()],
            synced: 0,
            info: HashMap::new(),
            blocked: HashSet::new(),
            watchers: HashMap::new(),
        }
    }

    fn sync(&mut self, y: &SplittingGraph) {
        for l in y.ids().skip(self.synced).filter(|&l| y.is_leaf(l)) {
            let set = y.set(l);
            let level = set
                .pairs()
                .filter_map(|(q, r)| self.table.level(q, r))
                .min();
            if let Some(level) = level {
                let level = match self.policy.leaf_order {
                    LeafOrder::MinLevel => level,
                    LeafOrder::Canonical => 0,
                };
                let key = (level, set.clone(), l);
                self.queue.insert(key.clone());
                self.keys.insert(l, key.clone());
                self.wake(y, l);
            }
        }
        self.synced = y.len();
    }

    /// Makes an unsplit leaf eligible for both passes again.
    fn wake(&mut self, y: &SplittingGraph, l: NodeId) {
        let Some(key) = self.keys.get(&l).cloned() else {
            return;
        };
        let info = self.leaf_info(y, l);
        if info.outputs_injective || !info.injective_inputs.is_empty() {
            self.ready[0].insert(key.clone());
        }
        self.ready[1].insert(key);
    }

    /// Incompatible pairs of `l` with both states enabling `mu`, mapped through `mu`.
    fn mapped_pairs(&self, l: &StateSet, mu: LabelId) -> Vec<(StateId, StateId)> {
        self.table
            .incompatible_pairs_in(l)
            .into_iter()
            .filter_map(|(q, r)| Some((self.s.succ(q, mu)?, self.s.succ(r, mu)?)))
            .collect()
    }

    /// Whether `l after mu` has a least common ancestor. A failure is
    /// remembered until one of the leaves blocking the descent is split.
    fn reachable_lca(&mut self, y: &SplittingGraph, l: NodeId, mu: LabelId) -> bool {
        if self.blocked.contains(&(l, mu)) {
            return false;
        }
        match y.lca_frontier(&self.s.after(y.set(l), &[mu])) {
            Ok(()) => true,
            Err(leaves) => {
                self.blocked.insert((l, mu));
                for leaf in leaves {
                    self.watchers.entry(leaf).or_default().push((l, mu));
                }
                false
            }
        }
    }

    fn pick_lca(&mut self, y: &SplittingGraph, l: NodeId, mu: LabelId) -> Option<NodeId> {
        if !self.reachable_lca(y, l, mu) {
            return None;
        }
        let set = y.set(l);
        let lcas = y.lca_set(&self.s.after(set, &[mu]));
        Some(match self.policy.lca_choice {
            LcaChoice::First => lcas[0],
            LcaChoice::MostPreserved => {
                let pairs = self.mapped_pairs(set, mu);
                self.loss.choose(y, self.s, self.table, &lcas, &pairs)
            }
        })
    }

    fn leaf_info(&mut self, y: &SplittingGraph, l: NodeId) -> Rc<LeafInfo> {
        let (s, table) = (self.s, self.table);
        self.info
            .entry(l)
            .or_insert_with(|| {
                let set = y.set(l);
                let outputs: Vec<LabelId> = s.outs_of(set).into_iter().collect();
                let inputs: Vec<LabelId> = s.ins_of(set).into_iter().collect();
                Rc::new(LeafInfo {
                    full: outputs
                        .iter()
                        .copied()
                        .filter(|&x| set.iter().all(|q| s.enables(q, x)))
                        .collect(),
                    outputs_injective: outputs.iter().all(|&x| label_injective(s, table, set, x)),
                    injective_inputs: inputs
                        .iter()
                        .copied()
                        .filter(|&a| label_injective(s, table, set, a))
                        .collect(),
                    outputs,
                    inputs,
                })
            })
            .clone()
    }

    fn output_plan(&mut self, y: &mut SplittingGraph, l: NodeId, info: &LeafInfo) -> Option<Plan> {
        if !info.full.iter().all(|&x| self.reachable_lca(y, l, x)) {
            return None;
        }
        let set = y.set(l).clone();
        let mut children = BTreeSet::new();
        let mut branches = Vec::with_capacity(info.outputs.len());
        for &x in &info.outputs {
            if info.full.contains(&x) {
                let v = self.pick_lca(y, l, x)?;
                children.extend(y.induced_split_unchecked(self.s, &set, x, v));
                let w = y.witness(v).expect("internal node");
                branches.push(y.arena_mut().prefix(x, w));
            } else {
                children.insert(self.s.enabled(&set, &[x]));
                branches.push(y.arena_mut().prefix(x, TermId::NIL));
            }
        }
        let arena = y.arena_mut();
        let mut it = branches.into_iter();
        let first = it.next()?;
        let witness = it.fold(first, |acc, b| arena.sum(acc, b));
        Some(Plan {
            kind: SplitKind::Output,
            children: children.into_iter().collect(),
            witness,
            injective: info.outputs_injective,
        })
    }

    fn input_plan(
        &mut self,
        y: &mut SplittingGraph,
        l: NodeId,
        a: LabelId,
        info: &LeafInfo,
    ) -> Option<Plan> {
        let v = self.pick_lca(y, l, a)?;
        let set = y.set(l).clone();
        let parts = y.induced_split_unchecked(self.s, &set, a, v);
        let disabled = set.difference(&self.s.enabled(&set, &[a]));
        let children: BTreeSet<StateSet> = match self.policy.input_children {
            InputChildren::WithDisabled => parts.iter().map(|d| d.union(&disabled)).collect(),
            InputChildren::InducedOnly => parts.into_iter().collect(),
        };
        let w = y.witness(v).expect("internal node");
        let witness = y.arena_mut().prefix(a, w);
        Some(Plan {
            kind: SplitKind::Input(a),
            children: children.into_iter().collect(),
            witness,
            injective: info.injective_inputs.contains(&a),
        })
    }

    /// The first split of `l` in preference order; with `injective_only`,
    /// labels that are not injective for `l` are skipped.
    fn plans(&mut self, y: &mut SplittingGraph, l: NodeId, injective_only: bool) -> Option<Plan> {
        let info = self.leaf_info(y, l);
        let inputs = if injective_only {
            &info.injective_inputs
        } else {
            &info.inputs
        };
        let try_outputs = |b: &mut Self, y: &mut SplittingGraph| {
            if !injective_only || info.outputs_injective {
                b.output_plan(y, l, &info)
            } else {
                None
            }
        };
        let try_inputs = |b: &mut Self, y: &mut SplittingGraph| {
            inputs.iter().find_map(|&a| b.input_plan(y, l, a, &info))
        };
        match self.policy.preference {
            SplitPreference::Output => try_outputs(self, y).or_else(|| try_inputs(self, y)),
            SplitPreference::Input => try_inputs(self, y).or_else(|| try_outputs(self, y)),
        }
    }

    fn commit(
        &mut self,
        y: &mut SplittingGraph,
        l: NodeId,
        plan: Plan,
    ) -> Result<NodeId, SplitError> {
        let set = y.set(l);
        let name = |p: &StateSet| p.display(self.s).to_string();
        if plan.children.is_empty() {
            return Err(SplitError::EmptyChildren { leaf: name(set) });
        }
        let mut union = StateSet::new();
        for c in &plan.children {
            if c.is_empty() || !c.is_proper_subset(set) {
                return Err(SplitError::NotProperSubset {
                    leaf: name(set),
                    child: name(c),
                });
            }
            union = union.union(c);
        }
        if &union != set {
            return Err(SplitError::UnionViolation {
                leaf: name(set),
                union: name(&union),
            });
        }
        let info = SplitInfo {
            kind: plan.kind,
            injective: plan.injective,
        };
        y.insert_split_unchecked(l, plan.children, plan.witness, Some(info));
        if let Some(key) = self.keys.remove(&l) {
            self.queue.remove(&key);
            self.ready[0].remove(&key);
            self.ready[1].remove(&key);
        }
        for w in self.watchers.remove(&l).unwrap_or_default() {
            if self.blocked.remove(&w) {
                self.wake(y, w.0);
            }
        }
        Ok(l)
    }

    fn step(&mut self, y: &mut SplittingGraph) -> Result<NodeId, SplitError> {
        self.sync(y);
        if self.queue.is_empty() {
            return Err(SplitError::Complete);
        }
        if self.policy.injectivity != Injectivity::Ignore {
            if let Some(done) = self.pass(y, 0) {
                return done;
            }
            if self.policy.injectivity == Injectivity::Require {
                let first = self.queue.first().expect("nonempty").2;
                return Err(SplitError::NoInjectiveSplit {
                    leaf: y.set(first).display(self.s).to_string(),
                });
            }
        }
        self.pass(y, 1).unwrap_or(Err(SplitError::NoSplittableLeaf))
    }

    /// Tries the ready leaves of pass `p` in order, parking those that fail.
    fn pass(&mut self, y: &mut SplittingGraph, p: usize) -> Option<Result<NodeId, SplitError>> {
        while let Some(key) = self.ready[p].first().cloned() {
            let l = key.2;
            match self.plans(y, l, p == 0) {
                Some(plan) => return Some(self.commit(y, l, plan)),
                None => {
                    self.ready[p].remove(&key);
                }
            }
        }
        None
    }
}

/// Splits one leaf of `y`, returning it.
pub fn split_node(
    s: &Automaton,
    table: &CompatibilityTable,
    y: &mut SplittingGraph,
    policy: SplitPolicy,
) -> Result<NodeId, SplitError> {
    Builder::new(s, table, policy).step(y)
}

/// Splits leaves until every leaf is pairwise compatible.
pub fn build_splitting_graph(
    s: &Automaton,
    table: &CompatibilityTable,
    policy: SplitPolicy,
) -> Result<SplittingGraph, SplitError> {
    let mut y = SplittingGraph::new(s);
    let mut b = Builder::new(s, table, policy);
    loop {
        match b.step(&mut y) {
            Ok(_) => {}
            Err(SplitError::Complete) => return Ok(y),
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{check_suspension, parse_automaton, SuspensionAutomaton};

    const RUNNING: &str = "inputs a\noutputs x y\ninitial 1\n\
        trans 1 x 1\ntrans 1 y 1\ntrans 1 a 3\ntrans 2 a 4\ntrans 2 x 4\ntrans 3 x 4\ntrans 4 y 2\n";

    fn running() -> SuspensionAutomaton {
        check_suspension(parse_automaton(RUNNING).unwrap()).unwrap()
    }

    fn names(s: &Automaton, sets: &[StateSet]) -> Vec<String> {
        sets.iter().map(|p| p.display(s).to_string()).collect()
    }

    #[test]
    fn step_by_step_on_running_example() {
        let s = running();
        let table = CompatibilityTable::new(&s);
        let mut y = SplittingGraph::new(&s);
        let policy = SplitPolicy::default();
        let expect = [
            ("{1,2,3,4}", vec!["{1,2,3}", "{1,4}"], "x.0 + y.0"),
            ("{1,2,3}", vec!["{1,3}", "{2,3}"], "a.(x.0 + y.0)"),
            ("{1,4}", vec!["{1}", "{4}"], "x.0 + y.a.(x.0 + y.0)"),
            (
                "{1,3}",
                vec!["{1}", "{3}"],
                "x.(x.0 + y.a.(x.0 + y.0)) + y.0",
            ),
        ];
        for (leaf, kids, witness) in expect {
            let l = split_node(&s, &table, &mut y, policy).unwrap();
            assert_eq!(y.set(l).display(&s).to_string(), leaf);
            let mut c: Vec<StateSet> = y.children(l).iter().map(|&c| y.set(c).clone()).collect();
            c.sort();
            assert_eq!(names(&s, &c), kids);
            assert_eq!(y.arena().print(y.witness(l).unwrap()), witness);
        }
        assert_eq!(
            split_node(&s, &table, &mut y, policy),
            Err(SplitError::Complete)
        );
        assert_eq!(y.len(), 8);
        let one = y.node_of(&s.set_of(&["1"]).unwrap()).unwrap();
        assert_eq!(y.parents(one).len(), 2);
    }

    #[test]
    fn label_order_of_input_split() {
        let s = running();
        let table = CompatibilityTable::new(&s);
        let policy = SplitPolicy {
            preference: SplitPreference::Input,
            ..SplitPolicy::default()
        };
        let y = build_splitting_graph(&s, &table, policy).unwrap();
        assert!(super::super::is_complete(&y, &table));
    }
}
