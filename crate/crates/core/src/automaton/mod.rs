//! Deterministic automata with inputs and outputs.
//!
//! An [`Automaton`] has a finite set of states, a partial transition function
//! over an [`Alphabet`] of input and output labels, and an initial state. At
//! most one successor exists per `(state, label)` pair, so the behaviour is
//! nondeterministic only in which output the system chooses to produce.
//!
//! States and labels are identified internally by dense indices
//! ([`StateId`], [`LabelId`]). Automata built through [`AutomatonBuilder`] or
//! parsed from text number their states in canonical name order, so that the
//! derived order on [`StateSet`] is deterministic and matches the order of
//! the names.

mod compose;
mod format;
mod order;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use thiserror::Error;

pub use compose::{compose, compose_reachable, Composition};
pub use format::{
    automaton_from_json, parse_automaton, serialize_automaton, AutomatonJson, Format, ParseError,
    TransitionJson,
};
pub use order::compare_names;

/// Index of a state inside one automaton.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(u32);

impl StateId {
    pub fn new(index: usize) -> Self {
        StateId(u32::try_from(index).expect("state index overflow"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Index of a label inside one alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelId(u32);

impl LabelId {
    pub fn new(index: usize) -> Self {
        LabelId(u32::try_from(index).expect("label index overflow"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LabelKind {
    Input,
    Output,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Label {
    pub name: String,
    pub kind: LabelKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("input alphabet is empty")]
    NoInputs,
    #[error("output alphabet is empty")]
    NoOutputs,
    #[error("label `{0}` is declared more than once")]
    DuplicateLabel(String),
    #[error("label `{0}` is already part of the alphabet")]
    LabelCollision(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("no initial state given")]
    MissingInitial,
    #[error(
        "nondeterministic: state `{state}` has `{label}` transitions to `{first}` and `{second}`"
    )]
    Nondeterministic {
        state: String,
        label: String,
        first: String,
        second: String,
    },
    #[error("automata have different alphabets")]
    AlphabetMismatch,
    #[error("automaton is cyclic")]
    Cyclic,
}

/// Disjoint, nonempty sets of input and output labels.
///
/// Labels are stored in canonical name order regardless of kind.
#[derive(Clone, Debug)]
pub struct Alphabet {
    labels: Vec<Label>,
    by_name: HashMap<String, LabelId>,
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

impl Eq for Alphabet {}

impl Alphabet {
    pub fn new<I, O, S, T>(inputs: I, outputs: O) -> Result<Self, AutomatonError>
    where
        I: IntoIterator<Item = S>,
        O: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut labels: Vec<Label> = inputs
            .into_iter()
            .map(|n| Label {
                name: n.into(),
                kind: LabelKind::Input,
            })
            .collect();
        let n_inputs = labels.len();
        labels.extend(outputs.into_iter().map(|n| Label {
            name: n.into(),
            kind: LabelKind::Output,
        }));
        if n_inputs == 0 {
            return Err(AutomatonError::NoInputs);
        }
        if labels.len() == n_inputs {
            return Err(AutomatonError::NoOutputs);
        }
        labels.sort_by(|a, b| compare_names(&a.name, &b.name));
        let mut by_name = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if by_name
                .insert(label.name.clone(), LabelId::new(i))
                .is_some()
            {
                return Err(AutomatonError::DuplicateLabel(label.name.clone()));
            }
        }
        Ok(Alphabet { labels, by_name })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn id(&self, name: &str) -> Option<LabelId> {
        self.by_name.get(name).copied()
    }

    pub fn label(&self, id: LabelId) -> &Label {
        &self.labels[id.index()]
    }

    pub fn name(&self, id: LabelId) -> &str {
        &self.labels[id.index()].name
    }

    pub fn kind(&self, id: LabelId) -> LabelKind {
        self.labels[id.index()].kind
    }

    pub fn is_input(&self, id: LabelId) -> bool {
        self.kind(id) == LabelKind::Input
    }

    pub fn is_output(&self, id: LabelId) -> bool {
        self.kind(id) == LabelKind::Output
    }

    pub fn ids(&self) -> impl Iterator<Item = LabelId> + '_ {
        (0..self.labels.len()).map(LabelId::new)
    }

    pub fn inputs(&self) -> impl Iterator<Item = LabelId> + '_ {
        self.ids().filter(|&l| self.is_input(l))
    }

    pub fn outputs(&self) -> impl Iterator<Item = LabelId> + '_ {
        self.ids().filter(|&l| self.is_output(l))
    }

    /// Resolves a sequence of label names into a word.
    pub fn word(&self, names: &[&str]) -> Option<Vec<LabelId>> {
        names.iter().map(|n| self.id(n)).collect()
    }

    /// Renders a word as space-separated label names (`ε` when empty).
    pub fn display_word(&self, word: &[LabelId]) -> String {
        if word.is_empty() {
            return "ε".to_string();
        }
        word.iter()
            .map(|&l| self.name(l))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Duplicate-free, sorted set of states.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet(Vec<StateId>);

impl StateSet {
    pub fn new() -> Self {
        StateSet(Vec::new())
    }

    pub fn singleton(q: StateId) -> Self {
        StateSet(vec![q])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, q: StateId) -> bool {
        self.0.binary_search(&q).is_ok()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = StateId> + ExactSizeIterator + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[StateId] {
        &self.0
    }

    pub fn insert(&mut self, q: StateId) -> bool {
        match self.0.binary_search(&q) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, q);
                true
            }
        }
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut it = other.0.iter();
        'outer: for q in &self.0 {
            for r in it.by_ref() {
                if r == q {
                    continue 'outer;
                }
                if r > q {
                    return false;
                }
            }
            return false;
        }
        true
    }

    pub fn is_proper_subset(&self, other: &StateSet) -> bool {
        self.len() < other.len() && self.is_subset(other)
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        let mut v = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => {
                    v.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    v.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    v.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        v.extend_from_slice(&self.0[i..]);
        v.extend_from_slice(&other.0[j..]);
        StateSet(v)
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        self.iter().filter(|&q| other.contains(q)).collect()
    }

    pub fn difference(&self, other: &StateSet) -> StateSet {
        self.iter().filter(|&q| !other.contains(q)).collect()
    }

    /// All unordered pairs `(q, q')` with `q < q'`.
    pub fn pairs(&self) -> impl Iterator<Item = (StateId, StateId)> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(move |(i, &q)| self.0[i + 1..].iter().map(move |&r| (q, r)))
    }

    pub fn display<'a>(&'a self, a: &'a Automaton) -> DisplayStateSet<'a> {
        DisplayStateSet {
            set: self,
            automaton: a,
        }
    }
}

impl FromIterator<StateId> for StateSet {
    fn from_iter<T: IntoIterator<Item = StateId>>(iter: T) -> Self {
        let mut v: Vec<StateId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        StateSet(v)
    }
}

impl IntoIterator for StateSet {
    type Item = StateId;
    type IntoIter = std::vec::IntoIter<StateId>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a StateSet {
    type Item = StateId;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, StateId>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

pub struct DisplayStateSet<'a> {
    set: &'a StateSet,
    automaton: &'a Automaton,
}

impl fmt::Display for DisplayStateSet<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, q) in self.set.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(self.automaton.state_name(q))?;
        }
        f.write_str("}")
    }
}

/// A deterministic automaton with inputs and outputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    alphabet: Arc<Alphabet>,
    names: Vec<String>,
    by_name: HashMap<String, StateId>,
    initial: StateId,
    // row-major: succ[q * |L| + l]
    succ: Vec<Option<StateId>>,
}

impl Automaton {
    /// Assembles an automaton from raw parts without reordering states.
    pub(crate) fn from_parts(
        alphabet: Arc<Alphabet>,
        names: Vec<String>,
        initial: StateId,
        succ: Vec<Option<StateId>>,
    ) -> Self {
        debug_assert_eq!(succ.len(), names.len() * alphabet.len());
        let by_name = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), StateId::new(i)))
            .collect();
        Automaton {
            alphabet,
            names,
            by_name,
            initial,
            succ,
        }
    }

    pub fn builder() -> AutomatonBuilder {
        AutomatonBuilder::default()
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.succ.iter().filter(|t| t.is_some()).count()
    }

    pub fn states(&self) -> impl DoubleEndedIterator<Item = StateId> + ExactSizeIterator {
        (0..self.names.len()).map(StateId::new)
    }

    pub fn all_states(&self) -> StateSet {
        StateSet(self.states().collect())
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn state(&self, name: &str) -> Option<StateId> {
        self.by_name.get(name).copied()
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.names[q.index()]
    }

    pub fn label(&self, name: &str) -> Option<LabelId> {
        self.alphabet.id(name)
    }

    /// Resolves state names into a set; `None` if a name is unknown.
    pub fn set_of(&self, names: &[&str]) -> Option<StateSet> {
        names.iter().map(|n| self.state(n)).collect()
    }

    /// `A/q`: the same automaton started in `q`.
    pub fn with_initial(&self, q: StateId) -> Automaton {
        let mut a = self.clone();
        a.initial = q;
        a
    }

    pub fn succ(&self, q: StateId, label: LabelId) -> Option<StateId> {
        self.succ[q.index() * self.alphabet.len() + label.index()]
    }

    /// Outgoing transitions of `q` in label order.
    pub fn transitions_from(&self, q: StateId) -> impl Iterator<Item = (LabelId, StateId)> + '_ {
        let width = self.alphabet.len();
        self.succ[q.index() * width..(q.index() + 1) * width]
            .iter()
            .enumerate()
            .filter_map(|(l, t)| t.map(|t| (LabelId::new(l), t)))
    }

    pub fn transitions(&self) -> impl Iterator<Item = (StateId, LabelId, StateId)> + '_ {
        self.states()
            .flat_map(move |q| self.transitions_from(q).map(move |(l, t)| (q, l, t)))
    }

    pub fn outs(&self, q: StateId) -> impl Iterator<Item = LabelId> + '_ {
        self.transitions_from(q)
            .map(|(l, _)| l)
            .filter(|&l| self.alphabet.is_output(l))
    }

    pub fn ins(&self, q: StateId) -> impl Iterator<Item = LabelId> + '_ {
        self.transitions_from(q)
            .map(|(l, _)| l)
            .filter(|&l| self.alphabet.is_input(l))
    }

    pub fn enables(&self, q: StateId, label: LabelId) -> bool {
        self.succ(q, label).is_some()
    }

    /// Outputs enabled in some state of `set`.
    pub fn outs_of(&self, set: &StateSet) -> BTreeSet<LabelId> {
        set.iter().flat_map(|q| self.outs(q)).collect()
    }

    /// Inputs enabled in some state of `set`.
    pub fn ins_of(&self, set: &StateSet) -> BTreeSet<LabelId> {
        set.iter().flat_map(|q| self.ins(q)).collect()
    }

    pub fn is_blocking(&self, q: StateId) -> bool {
        self.outs(q).next().is_none()
    }

    pub fn blocking_states(&self) -> StateSet {
        self.states().filter(|&q| self.is_blocking(q)).collect()
    }

    /// The unique state reached from `q` by `word`, if any.
    pub fn after_state(&self, q: StateId, word: &[LabelId]) -> Option<StateId> {
        word.iter().try_fold(q, |q, &l| self.succ(q, l))
    }

    pub fn after(&self, set: &StateSet, word: &[LabelId]) -> StateSet {
        set.iter()
            .filter_map(|q| self.after_state(q, word))
            .collect()
    }

    pub fn enabled(&self, set: &StateSet, word: &[LabelId]) -> StateSet {
        set.iter()
            .filter(|&q| self.after_state(q, word).is_some())
            .collect()
    }

    /// All states from which `word` leads into `set`.
    pub fn before(&self, set: &StateSet, word: &[LabelId]) -> StateSet {
        self.states()
            .filter(|&q| {
                self.after_state(q, word)
                    .is_some_and(|target| set.contains(target))
            })
            .collect()
    }

    /// Traces of `q` up to length `max_len`, including the empty trace.
    pub fn traces(&self, q: StateId, max_len: usize) -> BTreeSet<Vec<LabelId>> {
        let mut out = BTreeSet::new();
        let mut stack = vec![(q, Vec::new())];
        while let Some((r, word)) = stack.pop() {
            if word.len() < max_len {
                for (l, t) in self.transitions_from(r) {
                    let mut w = word.clone();
                    w.push(l);
                    stack.push((t, w));
                }
            }
            out.insert(word);
        }
        out
    }

    /// Whether the underlying digraph (over all states) has no cycle.
    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    fn topological_order(&self) -> Option<Vec<StateId>> {
        let n = self.num_states();
        let mut indegree = vec![0usize; n];
        for (_, _, t) in self.transitions() {
            indegree[t.index()] += 1;
        }
        let mut ready: Vec<StateId> = self.states().filter(|q| indegree[q.index()] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(q) = ready.pop() {
            order.push(q);
            for (_, t) in self.transitions_from(q) {
                indegree[t.index()] -= 1;
                if indegree[t.index()] == 0 {
                    ready.push(t);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Length of the longest path starting in the initial state.
    pub fn longest_path(&self) -> Result<usize, AutomatonError> {
        let order = self.topological_order().ok_or(AutomatonError::Cyclic)?;
        let mut longest = vec![0usize; self.num_states()];
        for &q in order.iter().rev() {
            longest[q.index()] = self
                .transitions_from(q)
                .map(|(_, t)| longest[t.index()] + 1)
                .max()
                .unwrap_or(0);
        }
        Ok(longest[self.initial.index()])
    }

    /// Adds output `delta` and a `delta` self-loop on every blocking state.
    pub fn quiescence_complete(&self, delta: &str) -> Result<SuspensionAutomaton, AutomatonError> {
        if self.alphabet.id(delta).is_some() {
            return Err(AutomatonError::LabelCollision(delta.to_string()));
        }
        let mut b = AutomatonBuilder::default();
        for l in self.alphabet.inputs() {
            b.input(self.alphabet.name(l));
        }
        for l in self.alphabet.outputs() {
            b.output(self.alphabet.name(l));
        }
        b.output(delta);
        for q in self.states() {
            b.state(self.state_name(q));
        }
        b.initial(self.state_name(self.initial));
        for (q, l, t) in self.transitions() {
            b.transition(
                self.state_name(q),
                self.alphabet.name(l),
                self.state_name(t),
            );
        }
        for q in self.blocking_states().iter() {
            let name = self.state_name(q);
            b.transition(name, delta, name);
        }
        let a = b.build()?;
        Ok(SuspensionAutomaton(a))
    }
}

/// Collects declarations and produces an [`Automaton`] in canonical state order.
#[derive(Clone, Debug, Default)]
pub struct AutomatonBuilder {
    inputs: Vec<String>,
    outputs: Vec<String>,
    states: Vec<String>,
    initial: Option<String>,
    transitions: Vec<(String, String, String)>,
}

impl AutomatonBuilder {
    pub fn input(&mut self, name: impl Into<String>) -> &mut Self {
        self.inputs.push(name.into());
        self
    }

    pub fn output(&mut self, name: impl Into<String>) -> &mut Self {
        self.outputs.push(name.into());
        self
    }

    pub fn state(&mut self, name: impl Into<String>) -> &mut Self {
        self.states.push(name.into());
        self
    }

    pub fn initial(&mut self, name: impl Into<String>) -> &mut Self {
        self.initial = Some(name.into());
        self
    }

    pub fn transition(
        &mut self,
        from: impl Into<String>,
        label: impl Into<String>,
        to: impl Into<String>,
    ) -> &mut Self {
        self.transitions
            .push((from.into(), label.into(), to.into()));
        self
    }

    pub fn build(&self) -> Result<Automaton, AutomatonError> {
        let alphabet = Arc::new(Alphabet::new(
            self.inputs.iter().cloned(),
            self.outputs.iter().cloned(),
        )?);
        let mut names: Vec<String> = self.states.clone();
        for (from, _, to) in &self.transitions {
            names.push(from.clone());
            names.push(to.clone());
        }
        names.sort_by(|a, b| compare_names(a, b));
        names.dedup();
        let index: HashMap<&str, StateId> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), StateId::new(i)))
            .collect();
        let initial_name = self
            .initial
            .as_ref()
            .ok_or(AutomatonError::MissingInitial)?;
        let initial = *index
            .get(initial_name.as_str())
            .ok_or_else(|| AutomatonError::UnknownState(initial_name.clone()))?;
        let width = alphabet.len();
        let mut succ: Vec<Option<StateId>> = vec![None; names.len() * width];
        for (from, label, to) in &self.transitions {
            let l = alphabet
                .id(label)
                .ok_or_else(|| AutomatonError::UnknownLabel(label.clone()))?;
            let q = index[from.as_str()];
            let t = index[to.as_str()];
            let slot = &mut succ[q.index() * width + l.index()];
            match *slot {
                Some(existing) if existing != t => {
                    return Err(AutomatonError::Nondeterministic {
                        state: from.clone(),
                        label: label.clone(),
                        first: names[existing.index()].clone(),
                        second: to.clone(),
                    });
                }
                _ => *slot = Some(t),
            }
        }
        Ok(Automaton::from_parts(alphabet, names, initial, succ))
    }
}

/// A non-blocking automaton: every state enables at least one output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuspensionAutomaton(Automaton);

impl SuspensionAutomaton {
    pub fn into_inner(self) -> Automaton {
        self.0
    }

    pub fn as_automaton(&self) -> &Automaton {
        &self.0
    }
}

impl Deref for SuspensionAutomaton {
    type Target = Automaton;

    fn deref(&self) -> &Automaton {
        &self.0
    }
}

impl TryFrom<Automaton> for SuspensionAutomaton {
    type Error = StateSet;

    fn try_from(a: Automaton) -> Result<Self, StateSet> {
        check_suspension(a)
    }
}

/// Accepts `a` as a suspension automaton, or returns all of its blocking states.
pub fn check_suspension(a: Automaton) -> Result<SuspensionAutomaton, StateSet> {
    let blocking = a.blocking_states();
    if blocking.is_empty() {
        Ok(SuspensionAutomaton(a))
    } else {
        Err(blocking)
    }
}
