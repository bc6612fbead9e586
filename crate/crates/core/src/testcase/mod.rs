//! Test cases written as terms of a small CCS fragment.
//!
//! Terms follow the grammar `F := 0 | F + F | μ.F` and are stored in a
//! hash-consed [`CcsArena`]: structurally equal subterms share one
//! [`TermId`], so a term is a DAG in memory and a tree semantically.
//!
//! Concrete syntax: prefix binds tighter than `+`, and `+` associates to the
//! left. The token `0` denotes nil unless it is immediately followed by `.`,
//! in which case it is a label name.

mod check;
mod semantics;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::automaton::{Alphabet, LabelId};

pub use check::{
    adg_check, classify_pairs, distinguishes, is_test_case_for, AdgCheck, ObservationWalker,
    TestCaseViolation,
};
pub use semantics::{ShapeError, StateKind, TestCaseAutomaton};

/// Handle of a term inside one [`CcsArena`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(u32);

impl TermId {
    pub const NIL: TermId = TermId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CcsNode {
    Nil,
    Prefix(LabelId, TermId),
    Sum(TermId, TermId),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CcsParseError {
    #[error("column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("column {column}: unknown label `{label}`")]
    UnknownLabel { column: usize, label: String },
}

/// Hash-consing store for CCS terms over a fixed alphabet.
#[derive(Clone, Debug)]
pub struct CcsArena {
    alphabet: Arc<Alphabet>,
    nodes: Vec<CcsNode>,
    index: HashMap<CcsNode, TermId>,
}

impl CcsArena {
    pub fn new(alphabet: Arc<Alphabet>) -> Self {
        CcsArena {
            alphabet,
            nodes: vec![CcsNode::Nil],
            index: HashMap::from([(CcsNode::Nil, TermId::NIL)]),
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    /// Number of distinct terms stored.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, t: TermId) -> CcsNode {
        self.nodes[t.index()]
    }

    fn intern(&mut self, node: CcsNode) -> TermId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = TermId(u32::try_from(self.nodes.len()).expect("term arena overflow"));
        self.nodes.push(node);
        self.index.insert(node, id);
        id
    }

    pub fn nil(&self) -> TermId {
        TermId::NIL
    }

    pub fn prefix(&mut self, label: LabelId, body: TermId) -> TermId {
        self.intern(CcsNode::Prefix(label, body))
    }

    /// The literal sum node `a + b`.
    pub fn sum(&mut self, a: TermId, b: TermId) -> TermId {
        self.intern(CcsNode::Sum(a, b))
    }

    /// `a + b` with nil operands dropped.
    pub fn plus(&mut self, a: TermId, b: TermId) -> TermId {
        match (a, b) {
            (TermId::NIL, _) => b,
            (_, TermId::NIL) => a,
            _ => self.sum(a, b),
        }
    }

    /// Left-associated [`plus`](Self::plus) over all terms; nil when empty.
    pub fn plus_all(&mut self, terms: impl IntoIterator<Item = TermId>) -> TermId {
        terms
            .into_iter()
            .fold(TermId::NIL, |acc, t| self.plus(acc, t))
    }

    /// Outgoing `(label, target)` pairs of `t`, left to right.
    pub fn derivatives(&self, t: TermId) -> Vec<(LabelId, TermId)> {
        let mut out = Vec::new();
        let mut stack = vec![t];
        while let Some(t) = stack.pop() {
            match self.node(t) {
                CcsNode::Nil => {}
                CcsNode::Prefix(l, body) => out.push((l, body)),
                CcsNode::Sum(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
            }
        }
        out
    }

    /// Derivatives with repeated `(label, target)` pairs removed.
    pub fn transitions(&self, t: TermId) -> Vec<(LabelId, TermId)> {
        let mut d = self.derivatives(t);
        d.sort_unstable();
        d.dedup();
        d
    }

    /// All distinct subterms of `t` in preorder (`t` first).
    pub fn subterms(&self, t: TermId) -> Vec<TermId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut order = Vec::new();
        let mut stack = vec![t];
        while let Some(t) = stack.pop() {
            if std::mem::replace(&mut seen[t.index()], true) {
                continue;
            }
            order.push(t);
            match self.node(t) {
                CcsNode::Nil => {}
                CcsNode::Prefix(_, body) => stack.push(body),
                CcsNode::Sum(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
            }
        }
        order
    }

    /// All distinct subterms of `t`, every child before its parents.
    pub fn postorder(&self, t: TermId) -> Vec<TermId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut order = Vec::new();
        let mut stack = vec![(t, false)];
        while let Some((g, expanded)) = stack.pop() {
            if expanded {
                order.push(g);
                continue;
            }
            if std::mem::replace(&mut seen[g.index()], true) {
                continue;
            }
            stack.push((g, true));
            match self.node(g) {
                CcsNode::Nil => {}
                CcsNode::Prefix(_, body) => stack.push((body, false)),
                CcsNode::Sum(a, b) => {
                    stack.push((b, false));
                    stack.push((a, false));
                }
            }
        }
        order
    }

    /// No subterm has two derivatives with one label and different targets.
    pub fn is_deterministic(&self, t: TermId) -> bool {
        self.subterms(t).into_iter().all(|g| {
            let d = self.transitions(g);
            d.windows(2).all(|w| w[0].0 != w[1].0)
        })
    }

    /// Length of the longest transition path from `t`.
    pub fn depth(&self, t: TermId) -> usize {
        let mut memo: HashMap<TermId, usize> = HashMap::new();
        for g in self.postorder(t) {
            let d = match self.node(g) {
                CcsNode::Nil => 0,
                CcsNode::Prefix(_, body) => 1 + memo[&body],
                CcsNode::Sum(a, b) => memo[&a].max(memo[&b]),
            };
            memo.insert(g, d);
        }
        memo[&t]
    }

    /// Copies `t` from another arena over the same alphabet.
    pub fn import(&mut self, other: &CcsArena, t: TermId) -> TermId {
        let mut map: HashMap<TermId, TermId> = HashMap::new();
        for g in other.postorder(t) {
            let id = match other.node(g) {
                CcsNode::Nil => TermId::NIL,
                CcsNode::Prefix(l, body) => self.prefix(l, map[&body]),
                CcsNode::Sum(a, b) => self.sum(map[&a], map[&b]),
            };
            map.insert(g, id);
        }
        map[&t]
    }

    /// Concrete syntax with minimal parentheses.
    pub fn print(&self, t: TermId) -> String {
        let mut out = String::new();
        self.write_term(&mut out, t);
        out
    }

    fn write_term(&self, out: &mut String, t: TermId) {
        match self.node(t) {
            CcsNode::Nil => out.push('0'),
            CcsNode::Prefix(l, body) => {
                out.push_str(self.alphabet.name(l));
                out.push('.');
                self.write_operand(out, body);
            }
            CcsNode::Sum(a, b) => {
                self.write_term(out, a);
                out.push_str(" + ");
                self.write_operand(out, b);
            }
        }
    }

    fn write_operand(&self, out: &mut String, t: TermId) {
        if matches!(self.node(t), CcsNode::Sum(..)) {
            out.push('(');
            self.write_term(out, t);
            out.push(')');
        } else {
            self.write_term(out, t);
        }
    }

    pub fn display(&self, t: TermId) -> DisplayTerm<'_> {
        DisplayTerm {
            arena: self,
            term: t,
        }
    }

    pub fn parse(&mut self, text: &str) -> Result<TermId, CcsParseError> {
        let chars: Vec<char> = text.chars().collect();
        let mut p = Parser {
            chars: &chars,
            pos: 0,
            arena: self,
        };
        let t = p.sum()?;
        p.skip_ws();
        if p.pos < chars.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(t)
    }
}

pub struct DisplayTerm<'a> {
    arena: &'a CcsArena,
    term: TermId,
}

impl fmt::Display for DisplayTerm<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.arena.print(self.term))
    }
}

fn is_label_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '.' | '+' | '(' | ')')
}

struct Parser<'a, 'b> {
    chars: &'a [char],
    pos: usize,
    arena: &'b mut CcsArena,
}

impl Parser<'_, '_> {
    fn error(&self, message: &str) -> CcsParseError {
        CcsParseError::Syntax {
            column: self.pos + 1,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<TermId, CcsParseError> {
        let mut acc = self.prefix()?;
        while self.peek() == Some('+') {
            self.pos += 1;
            let rhs = self.prefix()?;
            acc = self.arena.sum(acc, rhs);
        }
        Ok(acc)
    }

    fn prefix(&mut self) -> Result<TermId, CcsParseError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let t = self.sum()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(t)
            }
            Some(c) if is_label_char(c) => {
                let start = self.pos;
                while self.pos < self.chars.len() && is_label_char(self.chars[self.pos]) {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                let dotted = self.chars.get(self.pos) == Some(&'.');
                if name == "0" && !dotted {
                    return Ok(TermId::NIL);
                }
                if !dotted {
                    return Err(self.error("expected `.` after label"));
                }
                let label =
                    self.arena
                        .alphabet
                        .id(&name)
                        .ok_or_else(|| CcsParseError::UnknownLabel {
                            column: start + 1,
                            label: name.clone(),
                        })?;
                self.pos += 1;
                let body = self.prefix()?;
                Ok(self.arena.prefix(label, body))
            }
            _ => Err(self.error("expected a term")),
        }
    }
}

/// A term together with the arena that owns it.
#[derive(Clone, Debug)]
pub struct CcsTerm {
    pub arena: CcsArena,
    pub root: TermId,
}

impl CcsTerm {
    pub fn parse(alphabet: Arc<Alphabet>, text: &str) -> Result<Self, CcsParseError> {
        let mut arena = CcsArena::new(alphabet);
        let root = arena.parse(text)?;
        Ok(CcsTerm { arena, root })
    }

    pub fn nil(alphabet: Arc<Alphabet>) -> Self {
        CcsTerm {
            arena: CcsArena::new(alphabet),
            root: TermId::NIL,
        }
    }

    pub fn is_nil(&self) -> bool {
        self.root == TermId::NIL
    }

    pub fn depth(&self) -> usize {
        self.arena.depth(self.root)
    }

    pub fn is_deterministic(&self) -> bool {
        self.arena.is_deterministic(self.root)
    }

    pub fn associated_automaton(&self) -> Result<TestCaseAutomaton, ShapeError> {
        TestCaseAutomaton::new(&self.arena, self.root)
    }

    pub fn obs(&self, cap: usize) -> Result<Vec<Vec<LabelId>>, ShapeError> {
        semantics::obs(&self.arena, self.root, cap)
    }
}

impl fmt::Display for CcsTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.arena.print(self.root))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alphabet() -> Arc<Alphabet> {
        Arc::new(Alphabet::new(["a", "b"], ["x", "y"]).unwrap())
    }

    fn term(text: &str) -> CcsTerm {
        CcsTerm::parse(alphabet(), text).unwrap()
    }

    #[test]
    fn parse_and_print_round_trip() {
        for s in [
            "a.(x.0 + y.0)",
            "0",
            "x.0 + y.a.(x.0 + y.0)",
            "x.(x.0 + y.a.(x.0 + y.0)) + y.a.(x.0 + y.0)",
            "x.0 + (y.0 + x.0)",
        ] {
            assert_eq!(term(s).to_string(), s);
        }
        assert_eq!(term("((x.0))+y.0").to_string(), "x.0 + y.0");
    }

    #[test]
    fn subexpressions_are_shared() {
        let t = term("a.(x.0 + y.0)");
        assert_eq!(t.arena.subterms(t.root).len(), 5);
        let u = term("x.0 + x.0");
        assert_eq!(u.arena.subterms(u.root).len(), 3);
    }

    #[test]
    fn determinism() {
        assert!(term("x.0 + y.0").is_deterministic());
        assert!(!term("x.0 + x.y.0").is_deterministic());
        assert!(term("x.0 + x.0").is_deterministic());
    }

    #[test]
    fn depth_of_terms() {
        assert_eq!(term("0").depth(), 0);
        assert_eq!(term("a.(x.0 + y.0)").depth(), 2);
        assert_eq!(
            term("x.(x.0 + y.a.(x.0 + y.0)) + y.a.(x.0 + y.0)").depth(),
            4
        );
    }

    #[test]
    fn parse_errors() {
        let a = alphabet();
        assert!(matches!(
            CcsTerm::parse(a.clone(), "q.0"),
            Err(CcsParseError::UnknownLabel { column: 1, .. })
        ));
        assert!(matches!(
            CcsTerm::parse(a.clone(), "x.0 +"),
            Err(CcsParseError::Syntax { column: 6, .. })
        ));
        assert!(CcsTerm::parse(a.clone(), "(x.0").is_err());
        assert!(CcsTerm::parse(a, "x y").is_err());
    }

    #[test]
    fn numeric_labels() {
        let a = Arc::new(Alphabet::new(["a0"], ["1", "2", "0"]).unwrap());
        let t = CcsTerm::parse(a, "1.0 + 0.2.0 + 0").unwrap();
        assert_eq!(t.to_string(), "1.0 + 0.2.0 + 0");
        assert_eq!(t.depth(), 2);
    }

    #[test]
    fn plus_drops_nil() {
        let mut arena = CcsArena::new(alphabet());
        let x = arena.alphabet().id("x").unwrap();
        let x0 = arena.prefix(x, TermId::NIL);
        assert_eq!(arena.plus(TermId::NIL, x0), x0);
        assert_eq!(arena.plus(x0, TermId::NIL), x0);
        assert_eq!(arena.plus_all([]), TermId::NIL);
    }

    #[test]
    fn import_preserves_structure() {
        let t = term("x.(x.0 + y.a.(x.0 + y.0)) + y.a.(x.0 + y.0)");
        let mut other = CcsArena::new(alphabet());
        other.parse("b.0").unwrap();
        let copy = other.import(&t.arena, t.root);
        assert_eq!(other.print(copy), t.to_string());
    }
}
