use std::collections::{HashMap, HashSet};

use thiserror::Error;

use super::semantics::{check_shape, kind_of, ShapeError, StateKind};
use super::{CcsArena, TermId};
use crate::automaton::{Automaton, LabelId, StateId, StateSet};
use crate::game::CompatibilityTable;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TestCaseViolation {
    #[error(transparent)]
    Shape(#[from] ShapeError),
    /// The test case supplies an input the system state does not accept.
    #[error("from `{origin}` after `{trace}`: state `{state}` does not accept input `{label}`")]
    InputNotEnabled {
        origin: String,
        trace: String,
        state: String,
        label: String,
    },
    /// The system may produce an output the test case does not observe.
    #[error(
        "from `{origin}` after `{trace}`: output `{label}` of state `{state}` is not observed"
    )]
    OutputNotObserved {
        origin: String,
        trace: String,
        state: String,
        label: String,
    },
}

/// Checks both test-case clauses on every reachable product state, for each
/// state of `from`.
pub fn is_test_case_for(
    arena: &CcsArena,
    t: TermId,
    s: &Automaton,
    from: &StateSet,
) -> Result<(), TestCaseViolation> {
    check_shape(arena, t)?;
    let mut visited = HashSet::new();
    for origin in from.iter() {
        let mut trace = Vec::new();
        check_product(arena, s, origin, t, origin, &mut trace, &mut visited)?;
    }
    Ok(())
}

fn check_product(
    arena: &CcsArena,
    s: &Automaton,
    origin: StateId,
    g: TermId,
    r: StateId,
    trace: &mut Vec<LabelId>,
    visited: &mut HashSet<(TermId, StateId)>,
) -> Result<(), TestCaseViolation> {
    if !visited.insert((g, r)) {
        return Ok(());
    }
    let alpha = s.alphabet();
    let violation = |label: LabelId, input: bool, trace: &[LabelId]| {
        let origin = s.state_name(origin).to_string();
        let trace = alpha.display_word(trace);
        let state = s.state_name(r).to_string();
        let label = alpha.name(label).to_string();
        if input {
            TestCaseViolation::InputNotEnabled {
                origin,
                trace,
                state,
                label,
            }
        } else {
            TestCaseViolation::OutputNotObserved {
                origin,
                trace,
                state,
                label,
            }
        }
    };
    let d = arena.transitions(g);
    match kind_of(arena, g)? {
        StateKind::Leaf => return Ok(()),
        StateKind::Input(a) => {
            if !s.enables(r, a) {
                return Err(violation(a, true, trace));
            }
        }
        StateKind::Output => {
            if let Some(x) = s
                .outs(r)
                .find(|x| d.binary_search_by(|(l, _)| l.cmp(x)).is_err())
            {
                return Err(violation(x, false, trace));
            }
        }
    }
    for (l, next) in d {
        if let Some(r2) = s.succ(r, l) {
            trace.push(l);
            check_product(arena, s, origin, next, r2, trace, visited)?;
            trace.pop();
        }
    }
    Ok(())
}

/// Memoized joint walks of a term against pairs of system states.
///
/// Walks assume the term is a test case for every state they start from.
pub struct ObservationWalker<'a> {
    arena: &'a CcsArena,
    s: &'a Automaton,
    shared: HashMap<(TermId, StateId, StateId), bool>,
}

impl<'a> ObservationWalker<'a> {
    pub fn new(arena: &'a CcsArena, s: &'a Automaton) -> Self {
        ObservationWalker {
            arena,
            s,
            shared: HashMap::new(),
        }
    }

    /// Whether some observation of `g` is enabled from both `q` and `r`.
    pub fn shares_observation(&mut self, g: TermId, q: StateId, r: StateId) -> bool {
        let key = if q <= r { (g, q, r) } else { (g, r, q) };
        if let Some(&b) = self.shared.get(&key) {
            return b;
        }
        let d = self.arena.transitions(g);
        let result = d.is_empty()
            || d.into_iter()
                .any(|(l, next)| match (self.s.succ(q, l), self.s.succ(r, l)) {
                    (Some(q2), Some(r2)) => self.shares_observation(next, q2, r2),
                    _ => false,
                });
        self.shared.insert(key, result);
        result
    }
}

/// Whether `t` distinguishes `q` and `r`; `t` must be a test case for both.
pub fn distinguishes(
    arena: &CcsArena,
    t: TermId,
    s: &Automaton,
    q: StateId,
    r: StateId,
) -> Result<bool, TestCaseViolation> {
    is_test_case_for(arena, t, s, &[q, r].into_iter().collect())?;
    Ok(!ObservationWalker::new(arena, s).shares_observation(t, q, r))
}

/// Incompatible pairs of a set, split into distinguished and missed ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AdgCheck {
    pub distinguished: Vec<(StateId, StateId)>,
    pub missed: Vec<(StateId, StateId)>,
}

impl AdgCheck {
    pub fn is_adg(&self) -> bool {
        self.missed.is_empty()
    }
}

/// Classifies the incompatible pairs of `set`; `t` must be a test case for `set`.
pub fn adg_check(
    arena: &CcsArena,
    t: TermId,
    s: &Automaton,
    set: &StateSet,
    table: &CompatibilityTable,
) -> Result<AdgCheck, TestCaseViolation> {
    is_test_case_for(arena, t, s, set)?;
    let mut walker = ObservationWalker::new(arena, s);
    let mut out = AdgCheck::default();
    for (q, r) in table.incompatible_pairs_in(set) {
        if walker.shares_observation(t, q, r) {
            out.missed.push((q, r));
        } else {
            out.distinguished.push((q, r));
        }
    }
    Ok(out)
}

/// Like [`adg_check`], but a pair also counts as missed when `t` is not a
/// test case for one of its states.
pub fn classify_pairs(
    arena: &CcsArena,
    t: TermId,
    s: &Automaton,
    set: &StateSet,
    table: &CompatibilityTable,
) -> Result<AdgCheck, ShapeError> {
    check_shape(arena, t)?;
    let mut ok = HashMap::new();
    let sound: HashMap<StateId, bool> = set
        .iter()
        .map(|q| (q, sound_from(arena, s, t, q, &mut ok)))
        .collect();
    let mut walker = ObservationWalker::new(arena, s);
    let mut out = AdgCheck::default();
    for (q, r) in table.incompatible_pairs_in(set) {
        if sound[&q] && sound[&r] && !walker.shares_observation(t, q, r) {
            out.distinguished.push((q, r));
        } else {
            out.missed.push((q, r));
        }
    }
    Ok(out)
}

fn sound_from(
    arena: &CcsArena,
    s: &Automaton,
    g: TermId,
    r: StateId,
    memo: &mut HashMap<(TermId, StateId), bool>,
) -> bool {
    if let Some(&b) = memo.get(&(g, r)) {
        return b;
    }
    let d = arena.transitions(g);
    let local = match d.first() {
        None => true,
        Some(&(l, _)) if s.alphabet().is_input(l) => s.enables(r, l),
        Some(_) => s
            .outs(r)
            .all(|x| d.binary_search_by(|(l, _)| l.cmp(&x)).is_ok()),
    };
    let result = local
        && d.into_iter().all(|(l, next)| match s.succ(r, l) {
            Some(r2) => sound_from(arena, s, next, r2, memo),
            None => true,
        });
    memo.insert((g, r), result);
    result
}
