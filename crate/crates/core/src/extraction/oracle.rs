//! Exhaustive search for an adaptive distinguishing graph on small automata.
//!
//! A configuration records, for every state of the initial set whose run is
//! still consistent with the observed trace, the state it has reached. The
//! tester may supply an input accepted by every tracked state or wait for
//! any output. A configuration is won once no incompatible pair of initial
//! states is tracked together, and lost as soon as such a pair has reached
//! compatible states. The winning region is computed as an attractor over
//! the configurations reachable within the depth bound.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::automaton::{Automaton, LabelId, StateId, StateSet};
use crate::game::CompatibilityTable;
use crate::testcase::{CcsArena, CcsTerm, TermId};

pub const ORACLE_STATE_LIMIT: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("automaton has {states} states; the exhaustive search accepts at most {limit}")]
    TooLarge { states: usize, limit: usize },
}

#[derive(Clone, Debug)]
pub enum OracleOutcome {
    Found(CcsTerm),
    /// The whole configuration space was explored without finding one.
    NoneExists,
    /// Configurations beyond the depth bound were left unexplored.
    Inconclusive,
}

type Config = Vec<(StateId, StateId)>;

enum Moves {
    Won,
    Lost,
    Unexplored,
    Open {
        inputs: Vec<(LabelId, usize)>,
        outputs: Vec<(LabelId, usize)>,
    },
}

struct Search<'a> {
    s: &'a Automaton,
    table: &'a CompatibilityTable,
    configs: Vec<Config>,
    index: HashMap<Config, usize>,
    moves: Vec<Moves>,
}

impl Search<'_> {
    fn intern(&mut self, c: Config, depth: usize, queue: &mut VecDeque<(usize, usize)>) -> usize {
        if let Some(&id) = self.index.get(&c) {
            return id;
        }
        let id = self.configs.len();
        self.index.insert(c.clone(), id);
        self.configs.push(c);
        self.moves.push(Moves::Unexplored);
        queue.push_back((id, depth));
        id
    }

    fn classify(&self, c: &Config) -> Option<Moves> {
        let mut required = false;
        for (i, &(o1, r1)) in c.iter().enumerate() {
            for &(o2, r2) in &c[i + 1..] {
                if !self.table.compatible(o1, o2) {
                    if self.table.compatible(r1, r2) {
                        return Some(Moves::Lost);
                    }
                    required = true;
                }
            }
        }
        (!required).then_some(Moves::Won)
    }

    fn expand(&mut self, id: usize, depth: usize, queue: &mut VecDeque<(usize, usize)>) {
        let c = self.configs[id].clone();
        let alpha = self.s.alphabet().clone();
        let mut inputs = Vec::new();
        for a in alpha.inputs() {
            let next: Option<Config> = c
                .iter()
                .map(|&(o, r)| self.s.succ(r, a).map(|r2| (o, r2)))
                .collect();
            if let Some(next) = next {
                inputs.push((a, self.intern(next, depth + 1, queue)));
            }
        }
        let currents: StateSet = c.iter().map(|&(_, r)| r).collect();
        let mut outputs = Vec::new();
        for x in self.s.outs_of(&currents) {
            let next: Config = c
                .iter()
                .filter_map(|&(o, r)| self.s.succ(r, x).map(|r2| (o, r2)))
                .collect();
            outputs.push((x, self.intern(next, depth + 1, queue)));
        }
        self.moves[id] = Moves::Open { inputs, outputs };
    }
}

/// Searches for a test case distinguishing every incompatible pair of `set`,
/// exploring configurations up to `depth_bound` moves deep.
pub fn adg_exists_oracle(
    s: &Automaton,
    table: &CompatibilityTable,
    set: &StateSet,
    depth_bound: usize,
) -> Result<OracleOutcome, OracleError> {
    if s.num_states() > ORACLE_STATE_LIMIT {
        return Err(OracleError::TooLarge {
            states: s.num_states(),
            limit: ORACLE_STATE_LIMIT,
        });
    }
    let mut search = Search {
        s,
        table,
        configs: Vec::new(),
        index: HashMap::new(),
        moves: Vec::new(),
    };
    let mut queue = VecDeque::new();
    let start: Config = set.iter().map(|q| (q, q)).collect();
    search.intern(start, 0, &mut queue);
    let mut truncated = false;
    while let Some((id, depth)) = queue.pop_front() {
        if let Some(m) = search.classify(&search.configs[id]) {
            search.moves[id] = m;
        } else if depth >= depth_bound {
            truncated = true;
        } else {
            search.expand(id, depth, &mut queue);
        }
    }

    // attractor: rank[c] = number of moves needed to win from c
    let n = search.configs.len();
    let mut rank: Vec<Option<usize>> = search
        .moves
        .iter()
        .map(|m| matches!(m, Moves::Won).then_some(0))
        .collect();
    let mut round = 0;
    loop {
        round += 1;
        let ranked = |r: &[Option<usize>], id: usize| r[id].is_some_and(|k| k < round);
        let mut newly = Vec::new();
        for id in 0..n {
            if rank[id].is_some() {
                continue;
            }
            if let Moves::Open { inputs, outputs } = &search.moves[id] {
                let by_input = inputs.iter().any(|&(_, t)| ranked(&rank, t));
                let by_output =
                    !outputs.is_empty() && outputs.iter().all(|&(_, t)| ranked(&rank, t));
                if by_input || by_output {
                    newly.push(id);
                }
            }
        }
        if newly.is_empty() {
            break;
        }
        for id in newly {
            rank[id] = Some(round);
        }
    }

    if rank[0].is_none() {
        return Ok(if truncated {
            OracleOutcome::Inconclusive
        } else {
            OracleOutcome::NoneExists
        });
    }
    let mut arena = CcsArena::new(s.alphabet().clone());
    let mut memo = HashMap::new();
    let root = strategy(&search, &rank, &mut arena, &mut memo, 0);
    Ok(OracleOutcome::Found(CcsTerm { arena, root }))
}

fn strategy(
    search: &Search<'_>,
    rank: &[Option<usize>],
    arena: &mut CcsArena,
    memo: &mut HashMap<usize, TermId>,
    id: usize,
) -> TermId {
    if let Some(&t) = memo.get(&id) {
        return t;
    }
    let k = rank[id].expect("winning configuration");
    let below = |t: usize| rank[t].is_some_and(|r| r < k);
    let term = match &search.moves[id] {
        Moves::Won => TermId::NIL,
        Moves::Open { inputs, outputs } => {
            if let Some(&(a, t)) = inputs.iter().find(|&&(_, t)| below(t)) {
                let body = strategy(search, rank, arena, memo, t);
                arena.prefix(a, body)
            } else {
                let mut branches = Vec::with_capacity(outputs.len());
                for &(x, t) in outputs {
                    let body = strategy(search, rank, arena, memo, t);
                    branches.push(arena.prefix(x, body));
                }
                let mut it = branches.into_iter();
                let first = it.next().expect("some output is enabled");
                it.fold(first, |acc, b| arena.sum(acc, b))
            }
        }
        Moves::Lost | Moves::Unexplored => unreachable!("only winning configurations are expanded"),
    };
    memo.insert(id, term);
    term
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{check_suspension, parse_automaton};
    use crate::testcase::adg_check;

    #[test]
    fn running_example_has_an_adg() {
        let s = check_suspension(
            parse_automaton(
                "inputs a\noutputs x y\ninitial 1\ntrans 1 x 1\ntrans 1 y 1\ntrans 1 a 3\n\
                 trans 2 a 4\ntrans 2 x 4\ntrans 3 x 4\ntrans 4 y 2\n",
            )
            .unwrap(),
        )
        .unwrap();
        let table = CompatibilityTable::new(&s);
        let all = s.all_states();
        match adg_exists_oracle(&s, &table, &all, 16).unwrap() {
            OracleOutcome::Found(t) => {
                let r = adg_check(&t.arena, t.root, &s, &all, &table).unwrap();
                assert!(r.is_adg(), "{t}");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            adg_exists_oracle(&s, &table, &all, 1).unwrap(),
            OracleOutcome::Inconclusive
        ));
    }

    #[test]
    fn no_adg_fixture_has_none() {
        let s = check_suspension(
            parse_automaton(
                "inputs a b\noutputs x y\ninitial 1\ntrans 1 a 1\ntrans 1 y 2\ntrans 1 b 2\n\
                 trans 2 a 1\ntrans 2 b 3\ntrans 2 x 2\ntrans 3 y 2\ntrans 3 a 2\ntrans 3 b 3\n",
            )
            .unwrap(),
        )
        .unwrap();
        let table = CompatibilityTable::new(&s);
        assert!(matches!(
            adg_exists_oracle(&s, &table, &s.all_states(), 64).unwrap(),
            OracleOutcome::NoneExists
        ));
    }
}
