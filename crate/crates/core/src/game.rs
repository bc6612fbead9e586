//! The tester-versus-system reachability game.
//!
//! A state is *invalid* when the tester can force the system into a blocking
//! state: either by supplying an input that leads to an invalid state, or by
//! waiting when every output leads to an invalid state. Two states of a
//! suspension automaton are compatible exactly when their pair is valid in the
//! self-composition.

use std::collections::{HashMap, VecDeque};

use serde_json::json;
use thiserror::Error;

use crate::automaton::{compose, Automaton, LabelId, StateId, StateSet, SuspensionAutomaton};
use crate::testcase::{CcsArena, CcsTerm, TermId};

/// A tester move: supply an input or wait for an output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    Input(LabelId),
    Theta,
}

/// Invalid states with a winning first move and the number of moves needed.
#[derive(Clone, Debug)]
pub struct GameResult {
    pub invalid: StateSet,
    moves: Vec<Option<Move>>,
    levels: Vec<Option<u32>>,
    /// Transition visits performed while solving.
    pub visits: usize,
}

impl GameResult {
    pub fn is_invalid(&self, q: StateId) -> bool {
        self.moves[q.index()].is_some()
    }

    pub fn move_of(&self, q: StateId) -> Option<Move> {
        self.moves[q.index()]
    }

    pub fn level(&self, q: StateId) -> Option<u32> {
        self.levels[q.index()]
    }
}

/// Worklist computation of the invalid states, processed first-in first-out.
pub fn compute_invalid(a: &Automaton) -> GameResult {
    let n = a.num_states();
    let alpha = a.alphabet();
    let mut incoming: Vec<Vec<(StateId, LabelId)>> = vec![Vec::new(); n];
    for (q, l, t) in a.transitions() {
        incoming[t.index()].push((q, l));
    }
    let mut count: Vec<usize> = a.states().map(|q| a.outs(q).count()).collect();
    let mut moves = vec![None; n];
    let mut levels = vec![None; n];
    let mut queue = VecDeque::new();
    for q in a.states() {
        if count[q.index()] == 0 {
            moves[q.index()] = Some(Move::Theta);
            levels[q.index()] = Some(0);
            queue.push_back(q);
        }
    }
    let mut visits = 0;
    // a state is in P ∪ W exactly when its move has been assigned
    while let Some(p) = queue.pop_front() {
        let level_p = levels[p.index()].expect("queued states have a level");
        for &(q, mu) in &incoming[p.index()] {
            visits += 1;
            if moves[q.index()].is_some() {
                continue;
            }
            if alpha.is_input(mu) {
                moves[q.index()] = Some(Move::Input(mu));
                levels[q.index()] = Some(level_p + 1);
                queue.push_back(q);
            } else {
                count[q.index()] -= 1;
                if count[q.index()] == 0 {
                    let mut max = 0;
                    for x in a.outs(q) {
                        visits += 1;
                        let t = a.succ(q, x).expect("enabled output");
                        max = max.max(levels[t.index()].expect("successor already won"));
                    }
                    moves[q.index()] = Some(Move::Theta);
                    levels[q.index()] = Some(max + 1);
                    queue.push_back(q);
                }
            }
        }
    }
    let invalid = a.states().filter(|q| moves[q.index()].is_some()).collect();
    GameResult {
        invalid,
        moves,
        levels,
        visits,
    }
}

/// Least fixpoint of the invalidity operator by plain iteration.
pub fn naive_invalid_states(a: &Automaton) -> StateSet {
    let mut invalid = vec![false; a.num_states()];
    loop {
        let mut changed = false;
        for q in a.states() {
            if invalid[q.index()] {
                continue;
            }
            let forced_input = a.ins(q).any(|i| invalid[a.succ(q, i).unwrap().index()]);
            let all_outputs = a.outs(q).all(|x| invalid[a.succ(q, x).unwrap().index()]);
            if forced_input || all_outputs {
                invalid[q.index()] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    a.states().filter(|q| invalid[q.index()]).collect()
}

/// Compatibility relation of a suspension automaton.
#[derive(Clone, Debug)]
pub struct CompatibilityTable {
    n: usize,
    game: GameResult,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("states `{0}` and `{1}` are compatible")]
pub struct Compatible(pub String, pub String);

impl CompatibilityTable {
    /// Solves the game on the full self-composition `s ∥ s`.
    pub fn new(s: &SuspensionAutomaton) -> Self {
        let product = compose(s, s).expect("identical alphabets");
        let game = compute_invalid(&product.automaton);
        CompatibilityTable {
            n: s.num_states(),
            game,
        }
    }

    fn pair(&self, q: StateId, r: StateId) -> StateId {
        StateId::new(q.index() * self.n + r.index())
    }

    pub fn num_states(&self) -> usize {
        self.n
    }

    pub fn compatible(&self, q: StateId, r: StateId) -> bool {
        !self.game.is_invalid(self.pair(q, r))
    }

    /// Winning move for an incompatible pair.
    pub fn pair_move(&self, q: StateId, r: StateId) -> Option<Move> {
        self.game.move_of(self.pair(q, r))
    }

    /// Level of an incompatible pair.
    pub fn level(&self, q: StateId, r: StateId) -> Option<u32> {
        self.game.level(self.pair(q, r))
    }

    /// The game solved on the product.
    pub fn game(&self) -> &GameResult {
        &self.game
    }

    /// Whether all states of `set` are pairwise compatible.
    pub fn all_compatible(&self, set: &StateSet) -> bool {
        set.pairs().all(|(q, r)| self.compatible(q, r))
    }

    /// Distinct compatible pairs `(q, r)` with `q < r`.
    pub fn compatible_pairs(&self) -> Vec<(StateId, StateId)> {
        let all: StateSet = (0..self.n).map(StateId::new).collect();
        all.pairs()
            .filter(|&(q, r)| self.compatible(q, r))
            .collect()
    }

    pub fn incompatible_pairs_in(&self, set: &StateSet) -> Vec<(StateId, StateId)> {
        set.pairs()
            .filter(|&(q, r)| !self.compatible(q, r))
            .collect()
    }

    pub fn to_json(&self, s: &Automaton) -> serde_json::Value {
        let compatible = self.compatible_pairs();
        let total = self.n * self.n.saturating_sub(1) / 2;
        let pairs: Vec<_> = compatible
            .iter()
            .map(|&(q, r)| json!([s.state_name(q), s.state_name(r)]))
            .collect();
        json!({
            "compatible_pairs": pairs,
            "incompatible_count": total - compatible.len(),
        })
    }
}

/// Builds a test case distinguishing `q` and `r` from the winning strategy.
pub fn pairwise_distinguisher(
    s: &SuspensionAutomaton,
    table: &CompatibilityTable,
    q: StateId,
    r: StateId,
) -> Result<CcsTerm, Compatible> {
    if table.compatible(q, r) {
        return Err(Compatible(
            s.state_name(q).to_string(),
            s.state_name(r).to_string(),
        ));
    }
    let mut arena = CcsArena::new(s.alphabet().clone());
    let mut memo = HashMap::new();
    let root = strategy_term(s, table, &mut arena, &mut memo, q, r);
    Ok(CcsTerm { arena, root })
}

pub(crate) fn strategy_term(
    s: &Automaton,
    table: &CompatibilityTable,
    arena: &mut CcsArena,
    memo: &mut HashMap<(StateId, StateId), TermId>,
    q: StateId,
    r: StateId,
) -> TermId {
    if let Some(&t) = memo.get(&(q, r)) {
        return t;
    }
    let t = match table.pair_move(q, r).expect("incompatible pair") {
        Move::Input(a) => {
            let (q2, r2) = (s.succ(q, a).unwrap(), s.succ(r, a).unwrap());
            let body = strategy_term(s, table, arena, memo, q2, r2);
            arena.prefix(a, body)
        }
        Move::Theta => {
            let outputs: Vec<LabelId> = s.alphabet().outputs().collect();
            let mut branches = Vec::with_capacity(outputs.len());
            for x in outputs {
                let body = match (s.succ(q, x), s.succ(r, x)) {
                    (Some(q2), Some(r2)) => strategy_term(s, table, arena, memo, q2, r2),
                    _ => TermId::NIL,
                };
                branches.push(arena.prefix(x, body));
            }
            // left-associated literal sum, so `x.0` branches are kept
            let mut it = branches.into_iter();
            let first = it.next().expect("nonempty output alphabet");
            it.fold(first, |acc, b| arena.sum(acc, b))
        }
    };
    memo.insert((q, r), t);
    t
}
