use std::collections::HashMap;
use std::sync::Arc;

use serde_json::json;
use thiserror::Error;

use super::{CcsArena, TermId};
use crate::automaton::{Automaton, LabelId, StateId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShapeError {
    #[error("term is not deterministic: `{term}` has several `{label}` derivatives")]
    Nondeterministic { term: String, label: String },
    #[error("`{term}` enables an input together with other labels")]
    MixedInput { term: String },
    #[error("more than {0} observations")]
    ObsCapExceeded(usize),
}

/// The three kinds of test-case states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StateKind {
    Input(LabelId),
    Output,
    Leaf,
}

impl StateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StateKind::Input(_) => "input",
            StateKind::Output => "output",
            StateKind::Leaf => "leaf",
        }
    }
}

/// Classifies `g` and rejects nondeterministic or mixed states.
pub(crate) fn kind_of(arena: &CcsArena, g: TermId) -> Result<StateKind, ShapeError> {
    let d = arena.transitions(g);
    if let Some(w) = d.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(ShapeError::Nondeterministic {
            term: arena.print(g),
            label: arena.alphabet().name(w[0].0).to_string(),
        });
    }
    let alpha = arena.alphabet();
    match d.iter().find(|(l, _)| alpha.is_input(*l)) {
        Some(&(a, _)) if d.len() == 1 => Ok(StateKind::Input(a)),
        Some(_) => Err(ShapeError::MixedInput {
            term: arena.print(g),
        }),
        None if d.is_empty() => Ok(StateKind::Leaf),
        None => Ok(StateKind::Output),
    }
}

/// Checks every subterm of `t` against the test-case state shapes.
pub(crate) fn check_shape(arena: &CcsArena, t: TermId) -> Result<(), ShapeError> {
    arena
        .subterms(t)
        .into_iter()
        .try_for_each(|g| kind_of(arena, g).map(|_| ()))
}

/// Associated automaton of a deterministic term.
///
/// States are the distinct subexpressions of the term, named `"0"`, `"1"`,
/// ... in preorder, so the term itself is state `"0"`.
#[derive(Clone, Debug)]
pub struct TestCaseAutomaton {
    pub automaton: Automaton,
    pub terms: Vec<TermId>,
    pub kinds: Vec<StateKind>,
    state_of: HashMap<TermId, StateId>,
}

impl TestCaseAutomaton {
    pub fn new(arena: &CcsArena, t: TermId) -> Result<Self, ShapeError> {
        let terms = arena.subterms(t);
        let state_of: HashMap<TermId, StateId> = terms
            .iter()
            .enumerate()
            .map(|(i, &g)| (g, StateId::new(i)))
            .collect();
        let alphabet = Arc::clone(arena.alphabet());
        let width = alphabet.len();
        let mut succ = vec![None; terms.len() * width];
        let mut kinds = Vec::with_capacity(terms.len());
        for (i, &g) in terms.iter().enumerate() {
            kinds.push(kind_of(arena, g)?);
            for (l, target) in arena.transitions(g) {
                succ[i * width + l.index()] = Some(state_of[&target]);
            }
        }
        let names = (0..terms.len()).map(|i| i.to_string()).collect();
        let automaton = Automaton::from_parts(alphabet, names, StateId::new(0), succ);
        Ok(TestCaseAutomaton {
            automaton,
            terms,
            kinds,
            state_of,
        })
    }

    pub fn state_of(&self, t: TermId) -> Option<StateId> {
        self.state_of.get(&t).copied()
    }

    pub fn kind(&self, q: StateId) -> StateKind {
        self.kinds[q.index()]
    }

    pub fn leaves(&self) -> impl Iterator<Item = StateId> + '_ {
        self.automaton
            .states()
            .filter(|&q| self.kind(q) == StateKind::Leaf)
    }

    /// Nodes with their kind and edges with their label.
    pub fn to_json(&self, arena: &CcsArena) -> serde_json::Value {
        let a = &self.automaton;
        let nodes: Vec<_> = a
            .states()
            .map(|q| {
                json!({
                    "id": q.index(),
                    "kind": self.kind(q).as_str(),
                    "term": arena.print(self.terms[q.index()]),
                })
            })
            .collect();
        let edges: Vec<_> = a
            .transitions()
            .map(|(q, l, t)| {
                json!({
                    "from": q.index(),
                    "label": a.alphabet().name(l),
                    "to": t.index(),
                })
            })
            .collect();
        json!({ "nodes": nodes, "edges": edges })
    }

    pub fn to_dot(&self) -> String {
        crate::automaton::serialize_automaton(&self.automaton, crate::automaton::Format::Dot)
    }
}

/// All traces from `t` that end in a leaf, failing once more than `cap` exist.
pub(crate) fn obs(
    arena: &CcsArena,
    t: TermId,
    cap: usize,
) -> Result<Vec<Vec<LabelId>>, ShapeError> {
    check_shape(arena, t)?;
    let mut out = Vec::new();
    let mut trace = Vec::new();
    collect_obs(arena, t, cap, &mut trace, &mut out)?;
    Ok(out)
}

fn collect_obs(
    arena: &CcsArena,
    g: TermId,
    cap: usize,
    trace: &mut Vec<LabelId>,
    out: &mut Vec<Vec<LabelId>>,
) -> Result<(), ShapeError> {
    let d = arena.transitions(g);
    if d.is_empty() {
        if out.len() == cap {
            return Err(ShapeError::ObsCapExceeded(cap));
        }
        out.push(trace.clone());
        return Ok(());
    }
    for (l, next) in d {
        trace.push(l);
        collect_obs(arena, next, cap, trace, out)?;
        trace.pop();
    }
    Ok(())
}
