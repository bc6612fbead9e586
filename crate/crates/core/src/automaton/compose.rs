use std::collections::{HashMap, VecDeque};

use super::{Automaton, AutomatonError, StateId};

/// Result of a synchronous product.
#[derive(Clone, Debug)]
pub struct Composition {
    pub automaton: Automaton,
    /// Component states of each product state.
    pub pairs: Vec<(StateId, StateId)>,
    index: HashMap<(StateId, StateId), StateId>,
}

impl Composition {
    /// The product state for `(q1, q2)`, if it exists in this product.
    pub fn state_of(&self, q1: StateId, q2: StateId) -> Option<StateId> {
        self.index.get(&(q1, q2)).copied()
    }

    pub fn components(&self, p: StateId) -> (StateId, StateId) {
        self.pairs[p.index()]
    }
}

fn check_alphabets(a1: &Automaton, a2: &Automaton) -> Result<(), AutomatonError> {
    if a1.alphabet() == a2.alphabet() {
        Ok(())
    } else {
        Err(AutomatonError::AlphabetMismatch)
    }
}

fn pair_name(a1: &Automaton, a2: &Automaton, (q1, q2): (StateId, StateId)) -> String {
    format!("({},{})", a1.state_name(q1), a2.state_name(q2))
}

/// Full product `a1 ∥ a2`: state `(q1, q2)` has id `q1 * |Q2| + q2`.
pub fn compose(a1: &Automaton, a2: &Automaton) -> Result<Composition, AutomatonError> {
    check_alphabets(a1, a2)?;
    let n2 = a2.num_states();
    let width = a1.alphabet().len();
    let pairs: Vec<(StateId, StateId)> = a1
        .states()
        .flat_map(|q1| a2.states().map(move |q2| (q1, q2)))
        .collect();
    let id = |q1: StateId, q2: StateId| StateId::new(q1.index() * n2 + q2.index());
    let mut succ = Vec::with_capacity(pairs.len() * width);
    for &(q1, q2) in &pairs {
        for l in a1.alphabet().ids() {
            succ.push(match (a1.succ(q1, l), a2.succ(q2, l)) {
                (Some(t1), Some(t2)) => Some(id(t1, t2)),
                _ => None,
            });
        }
    }
    let names = pairs.iter().map(|&p| pair_name(a1, a2, p)).collect();
    let initial = id(a1.initial(), a2.initial());
    let index = pairs
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, StateId::new(i)))
        .collect();
    Ok(Composition {
        automaton: Automaton::from_parts(a1.alphabet().clone(), names, initial, succ),
        pairs,
        index,
    })
}

/// Product restricted to pairs reachable from `(q01, q02)`, numbered in BFS order.
pub fn compose_reachable(a1: &Automaton, a2: &Automaton) -> Result<Composition, AutomatonError> {
    check_alphabets(a1, a2)?;
    let width = a1.alphabet().len();
    let start = (a1.initial(), a2.initial());
    let mut index = HashMap::from([(start, StateId::new(0))]);
    let mut pairs = vec![start];
    let mut succ = Vec::new();
    let mut queue = VecDeque::from([start]);
    while let Some((q1, q2)) = queue.pop_front() {
        for l in a1.alphabet().ids() {
            let target = match (a1.succ(q1, l), a2.succ(q2, l)) {
                (Some(t1), Some(t2)) => {
                    let next = StateId::new(pairs.len());
                    let t = *index.entry((t1, t2)).or_insert_with(|| {
                        pairs.push((t1, t2));
                        queue.push_back((t1, t2));
                        next
                    });
                    Some(t)
                }
                _ => None,
            };
            succ.push(target);
        }
    }
    debug_assert_eq!(succ.len(), pairs.len() * width);
    let names = pairs.iter().map(|&p| pair_name(a1, a2, p)).collect();
    Ok(Composition {
        automaton: Automaton::from_parts(a1.alphabet().clone(), names, StateId::new(0), succ),
        pairs,
        index,
    })
}
