//! Nested words: a word together with its per-stack matching relation.
//!
//! Positions are 0-based in this API. Everything that is printed or
//! serialized uses 1-based positions.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::alphabet::{AlphabetError, CallReturnAlphabet, SymbolClass, SymbolId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error("the empty word is not a nested word")]
    EmptyWord,
    #[error("position {0} out of range for a word of length {1}")]
    PositionOutOfRange(usize, usize),
}

/// Balanced-projection test: the stack-`s` calls and returns of `w` form a
/// balanced bracket string.
pub fn is_well_formed(alphabet: &CallReturnAlphabet, s: usize, w: &[SymbolId]) -> bool {
    let mut depth = 0usize;
    for &a in w {
        match alphabet.class(a) {
            SymbolClass::Call(t) if t == s => depth += 1,
            SymbolClass::Return(t) if t == s => {
                if depth == 0 {
                    return false;
                }
                depth -= 1;
            }
            _ => {}
        }
    }
    depth == 0
}

/// A matched call/return pair `(call, ret, stack)`, 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MatchEdge {
    pub call: usize,
    pub ret: usize,
    pub stack: usize,
}

#[derive(Clone, Debug)]
pub struct NestedWord {
    alphabet: Arc<CallReturnAlphabet>,
    labels: Vec<SymbolId>,
    partner: Vec<Option<usize>>,
}

impl PartialEq for NestedWord {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && *self.alphabet == *other.alphabet
    }
}

impl Eq for NestedWord {}

impl NestedWord {
    /// Computes the matching by one left-to-right scan with a pending-call
    /// stack per stack.
    pub fn new(alphabet: Arc<CallReturnAlphabet>, labels: Vec<SymbolId>) -> Result<Self, WordError> {
        if labels.is_empty() {
            return Err(WordError::EmptyWord);
        }
        let mut partner = vec![None; labels.len()];
        let mut open: Vec<Vec<usize>> = vec![Vec::new(); alphabet.stack_count()];
        for (i, &a) in labels.iter().enumerate() {
            match alphabet.class(a) {
                SymbolClass::Call(s) => open[s].push(i),
                SymbolClass::Return(s) => {
                    if let Some(c) = open[s].pop() {
                        partner[c] = Some(i);
                        partner[i] = Some(c);
                    }
                }
                SymbolClass::Internal => {}
            }
        }
        Ok(NestedWord {
            alphabet,
            labels,
            partner,
        })
    }

    pub fn parse(alphabet: &Arc<CallReturnAlphabet>, text: &str) -> Result<Self, WordError> {
        let labels = alphabet.parse_symbols(text)?;
        Self::new(alphabet.clone(), labels)
    }

    pub fn alphabet(&self) -> &Arc<CallReturnAlphabet> {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// Always false: empty nested words cannot be constructed.
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[SymbolId] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> SymbolId {
        self.labels[i]
    }

    pub fn class(&self, i: usize) -> SymbolClass {
        self.alphabet.class(self.labels[i])
    }

    /// The space-separated symbol string.
    pub fn string(&self) -> String {
        self.alphabet.render(&self.labels)
    }

    /// Matching partner of `i`, in either direction.
    pub fn partner(&self, i: usize) -> Option<usize> {
        self.partner[i]
    }

    /// `μ(i)` for a matched call.
    pub fn return_of(&self, i: usize) -> Option<usize> {
        self.partner[i].filter(|&j| j > i)
    }

    /// `μ⁻¹(i)` for a matched return.
    pub fn call_of(&self, i: usize) -> Option<usize> {
        self.partner[i].filter(|&j| j < i)
    }

    pub fn matching(&self) -> Vec<MatchEdge> {
        (0..self.len())
            .filter_map(|i| {
                self.return_of(i).map(|j| MatchEdge {
                    call: i,
                    ret: j,
                    stack: self.class(i).stack().expect("calls have a stack"),
                })
            })
            .collect()
    }

    /// Calls and returns without a partner.
    pub fn pending(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.class(i) != SymbolClass::Internal && self.partner[i].is_none())
            .collect()
    }

    pub fn check_position(&self, i: usize) -> Result<(), WordError> {
        if i < self.len() {
            Ok(())
        } else {
            Err(WordError::PositionOutOfRange(i + 1, self.len()))
        }
    }

    /// Gaifman neighbours: predecessor, successor and matching partner.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let pred = i.checked_sub(1);
        let succ = Some(i + 1).filter(|&j| j < self.len());
        pred.into_iter().chain(succ).chain(self.partner[i])
    }

    /// Breadth-first distances from `i` to every position.
    pub fn distances_from(&self, i: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        dist[i] = 0;
        let mut queue = VecDeque::from([i]);
        while let Some(u) = queue.pop_front() {
            for v in self.neighbors(u) {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn distance(&self, i: usize, j: usize) -> Result<usize, WordError> {
        self.check_position(i)?;
        self.check_position(j)?;
        Ok(self.distances_from(i)[j])
    }

    /// DOT rendering: solid successor arcs, dashed matching arcs labelled with
    /// the 1-based stack.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph nested {\n  rankdir=LR;\n");
        for i in 0..self.len() {
            let _ = writeln!(out, "  n{} [label=\"{}:{}\"];", i + 1, i + 1, self.alphabet.name(self.labels[i]));
        }
        for i in 1..self.len() {
            let _ = writeln!(out, "  n{} -> n{};", i, i + 1);
        }
        for e in self.matching() {
            let _ = writeln!(
                out,
                "  n{} -> n{} [style=dashed, label=\"{}\"];",
                e.call + 1,
                e.ret + 1,
                e.stack + 1
            );
        }
        out.push_str("}\n");
        out
    }
}
