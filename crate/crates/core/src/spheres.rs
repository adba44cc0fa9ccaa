//! r-spheres: the labelled neighbourhood of a position, kept in canonical form
//! so that isomorphism is equality.
//!
//! Successor, predecessor and matching edges are each partial injective
//! functions, so a breadth-first numbering from the centre that always
//! expands successor, then predecessor, then matching partner is invariant
//! under isomorphism. No tie-breaking search is ever needed.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::{CallReturnAlphabet, SymbolClass, SymbolId};
use crate::corpus;
use crate::nested::{NestedWord, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SphereError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("spheres have radii {0} and {1}")]
    RadiusMismatch(usize, usize),
    #[error("malformed sphere: {0}")]
    Malformed(String),
}

/// Ball-size bound for a graph of degree at most 3: `1 + 3(2^r - 1)`.
pub fn max_size_bound(r: usize) -> usize {
    1 + 3 * ((1usize << r) - 1)
}

/// Number of colours available to extended spheres: `4·maxSize(r)² + 1`.
pub fn color_bound(r: usize) -> usize {
    let m = max_size_bound(r);
    4 * m * m + 1
}

/// A sphere in canonical form. Node 0 is the centre.
#[derive(Clone, Debug)]
pub struct Sphere {
    radius: usize,
    labels: Vec<SymbolId>,
    succ: Vec<Option<usize>>,
    // (partner, stack); the partner is later than the node iff the node is the call
    partner: Vec<Option<(usize, usize)>>,
    pred: Vec<Option<usize>>,
    depth: Vec<usize>,
    realized: bool,
}

impl Sphere {
    fn key(&self) -> (usize, &[SymbolId], &[Option<usize>], &[Option<(usize, usize)>]) {
        (self.radius, &self.labels, &self.succ, &self.partner)
    }
}

impl PartialEq for Sphere {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Sphere {}

impl PartialOrd for Sphere {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Sphere {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl Hash for Sphere {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

/// Raw pointed structure before canonicalization; node ids are arbitrary.
#[derive(Clone, Debug, Default)]
pub struct RawSphere {
    pub labels: Vec<SymbolId>,
    pub succ: Vec<(usize, usize)>,
    /// `(call, return, stack)` with 0-based stacks.
    pub matches: Vec<(usize, usize, usize)>,
    pub center: usize,
    pub radius: usize,
}

impl Sphere {
    /// The sphere of radius `r` around position `i` (0-based).
    pub fn around(word: &NestedWord, i: usize, r: usize) -> Result<Sphere, SphereError> {
        Ok(Self::around_with_embedding(word, i, r)?.0)
    }

    /// Also returns, for each canonical node, the word position it came from.
    pub fn around_with_embedding(word: &NestedWord, i: usize, r: usize) -> Result<(Sphere, Vec<usize>), SphereError> {
        word.check_position(i)?;
        // BFS directly on the word, expanding succ, pred, partner in that order
        let mut order = vec![i];
        let mut index: HashMap<usize, usize> = HashMap::from([(i, 0)]);
        let mut depth = vec![0];
        let mut queue = VecDeque::from([i]);
        while let Some(u) = queue.pop_front() {
            let du = depth[index[&u]];
            if du == r {
                continue;
            }
            let succ = Some(u + 1).filter(|&v| v < word.len());
            let pred = u.checked_sub(1);
            for v in [succ, pred, word.partner(u)].into_iter().flatten() {
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry(v) {
                    e.insert(order.len());
                    order.push(v);
                    depth.push(du + 1);
                    queue.push_back(v);
                }
            }
        }
        let n = order.len();
        let mut s = Sphere {
            radius: r,
            labels: order.iter().map(|&p| word.label(p)).collect(),
            succ: vec![None; n],
            partner: vec![None; n],
            pred: vec![None; n],
            depth,
            realized: true,
        };
        for (k, &p) in order.iter().enumerate() {
            if let Some(&k2) = index.get(&(p + 1)) {
                s.succ[k] = Some(k2);
                s.pred[k2] = Some(k);
            }
            if let Some(q) = word.partner(p) {
                if let Some(&k2) = index.get(&q) {
                    let stack = word.class(p).stack().expect("matched positions have a stack");
                    s.partner[k] = Some((k2, stack));
                }
            }
        }
        Ok((s, order))
    }

    /// Canonicalizes an arbitrary pointed structure, checking the local
    /// nested-word shape. The result is marked unverified.
    pub fn from_raw(raw: &RawSphere) -> Result<Sphere, SphereError> {
        let n = raw.labels.len();
        let bad = |m: &str| Err(SphereError::Malformed(m.to_string()));
        if raw.center >= n {
            return bad("centre is not a node");
        }
        let mut succ = vec![None; n];
        let mut pred = vec![None; n];
        for &(i, j) in &raw.succ {
            if i >= n || j >= n || i == j {
                return bad("successor edge with unknown or equal endpoints");
            }
            if succ[i].replace(j).is_some() || pred[j].replace(i).is_some() {
                return bad("successor is not injective");
            }
        }
        let mut partner: Vec<Option<(usize, usize, bool)>> = vec![None; n];
        for &(c, r, s) in &raw.matches {
            if c >= n || r >= n || c == r {
                return bad("matching edge with unknown or equal endpoints");
            }
            if partner[c].replace((r, s, true)).is_some() || partner[r].replace((c, s, false)).is_some() {
                return bad("a node has two matching partners");
            }
        }
        // breadth-first canonical numbering
        let mut index = vec![usize::MAX; n];
        let mut order = vec![raw.center];
        index[raw.center] = 0;
        let mut depth = vec![0];
        let mut queue = VecDeque::from([raw.center]);
        while let Some(u) = queue.pop_front() {
            let du = depth[index[u]];
            for v in [succ[u], pred[u], partner[u].map(|p| p.0)].into_iter().flatten() {
                if index[v] == usize::MAX {
                    index[v] = order.len();
                    order.push(v);
                    depth.push(du + 1);
                    queue.push_back(v);
                }
            }
        }
        if order.len() != n {
            return bad("sphere is not connected");
        }
        if depth.iter().any(|&d| d > raw.radius) {
            return bad("a node lies beyond the radius");
        }
        let mut s = Sphere {
            radius: raw.radius,
            labels: order.iter().map(|&p| raw.labels[p]).collect(),
            succ: vec![None; n],
            partner: vec![None; n],
            pred: vec![None; n],
            depth,
            realized: false,
        };
        for (k, &p) in order.iter().enumerate() {
            if let Some(q) = succ[p] {
                s.succ[k] = Some(index[q]);
                s.pred[index[q]] = Some(k);
            }
            // which endpoint is the call follows from the labels (see `check_labels`)
            if let Some((q, stack, _)) = partner[p] {
                s.partner[k] = Some((index[q], stack));
            }
        }
        Ok(s)
    }

    /// The single-node sphere labelled with the first symbol; stands in for
    /// the empty sphere-automaton state.
    pub fn placeholder(r: usize) -> Sphere {
        Sphere {
            radius: r,
            labels: vec![SymbolId(0)],
            succ: vec![None],
            partner: vec![None],
            pred: vec![None],
            depth: vec![0],
            realized: false,
        }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    /// Always false: every sphere has a centre.
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Whether the sphere was taken from an actual nested word.
    pub fn is_realized(&self) -> bool {
        self.realized
    }

    pub fn label(&self, k: usize) -> SymbolId {
        self.labels[k]
    }

    pub fn labels(&self) -> &[SymbolId] {
        &self.labels
    }

    pub fn succ(&self, k: usize) -> Option<usize> {
        self.succ[k]
    }

    pub fn pred(&self, k: usize) -> Option<usize> {
        self.pred[k]
    }

    /// Matching partner and its stack.
    pub fn partner(&self, k: usize) -> Option<(usize, usize)> {
        self.partner[k]
    }

    /// Distance from the centre.
    pub fn depth(&self, k: usize) -> usize {
        self.depth[k]
    }

    /// Matched-call partner test needs the alphabet to know which side is the call.
    pub fn match_target(&self, alphabet: &CallReturnAlphabet, k: usize) -> Option<usize> {
        self.partner[k]
            .filter(|_| alphabet.class(self.labels[k]).is_call())
            .map(|(q, _)| q)
    }

    pub fn match_source(&self, alphabet: &CallReturnAlphabet, k: usize) -> Option<usize> {
        self.partner[k]
            .filter(|_| alphabet.class(self.labels[k]).is_return())
            .map(|(q, _)| q)
    }

    /// Edges as `(call, return, stack)` in canonical numbering.
    pub fn matches(&self, alphabet: &CallReturnAlphabet) -> Vec<(usize, usize, usize)> {
        (0..self.len())
            .filter_map(|k| {
                self.match_target(alphabet, k)
                    .map(|q| (k, q, self.partner[k].expect("matched").1))
            })
            .collect()
    }

    /// Checks that labels agree with edge types: matched pairs join a call and
    /// a return of the tagged stack.
    pub fn check_labels(&self, alphabet: &CallReturnAlphabet) -> Result<(), SphereError> {
        for k in 0..self.len() {
            if self.labels[k].index() >= alphabet.len() {
                return Err(SphereError::Malformed("label outside the alphabet".into()));
            }
            if let Some((q, s)) = self.partner[k] {
                let ok = match (alphabet.class(self.labels[k]), alphabet.class(self.labels[q])) {
                    (SymbolClass::Call(a), SymbolClass::Return(b)) | (SymbolClass::Return(b), SymbolClass::Call(a)) => {
                        a == s && b == s
                    }
                    _ => false,
                };
                if !ok {
                    return Err(SphereError::Malformed("matching edge does not join a call and a return of its stack".into()));
                }
            }
        }
        Ok(())
    }

    pub fn is_isomorphic(&self, other: &Sphere) -> Result<bool, SphereError> {
        if self.radius != other.radius {
            return Err(SphereError::RadiusMismatch(self.radius, other.radius));
        }
        Ok(self == other)
    }

    /// Deterministic text form; equal strings mean isomorphic spheres.
    pub fn canonical_string(&self, alphabet: &CallReturnAlphabet) -> String {
        let labels: Vec<&str> = self.labels.iter().map(|&a| alphabet.name(a)).collect();
        let mut out = format!("r={} [{}]", self.radius, labels.join(" "));
        let succ: Vec<String> = (0..self.len())
            .filter_map(|k| self.succ[k].map(|q| format!("{}>{}", k + 1, q + 1)))
            .collect();
        let _ = write!(out, " succ{{{}}}", succ.join(","));
        let m: Vec<String> = self
            .matches(alphabet)
            .iter()
            .map(|(c, r, s)| format!("{}>{}@{}", c + 1, r + 1, s + 1))
            .collect();
        let _ = write!(out, " match{{{}}}", m.join(","));
        out
    }

    /// DOT rendering with the centre drawn as a box.
    pub fn to_dot(&self, alphabet: &CallReturnAlphabet) -> String {
        let mut out = String::from("digraph sphere {\n  rankdir=LR;\n");
        for k in 0..self.len() {
            let shape = if k == 0 { "box" } else { "ellipse" };
            let _ = writeln!(out, "  s{} [label=\"{}:{}\", shape={shape}];", k + 1, k + 1, alphabet.name(self.labels[k]));
        }
        for k in 0..self.len() {
            if let Some(q) = self.succ[k] {
                let _ = writeln!(out, "  s{} -> s{};", k + 1, q + 1);
            }
        }
        for (c, r, s) in self.matches(alphabet) {
            let _ = writeln!(out, "  s{} -> s{} [style=dashed, label=\"{}\"];", c + 1, r + 1, s + 1);
        }
        out.push_str("}\n");
        out
    }

    pub fn to_file(&self, alphabet: &CallReturnAlphabet) -> SphereFile {
        SphereFile {
            nodes: (0..self.len())
                .map(|k| SphereNode {
                    id: k + 1,
                    label: alphabet.name(self.labels[k]).to_string(),
                })
                .collect(),
            succ: (0..self.len())
                .filter_map(|k| self.succ[k].map(|q| [k + 1, q + 1]))
                .collect(),
            matching: self
                .matches(alphabet)
                .into_iter()
                .map(|(c, r, s)| [c + 1, r + 1, s + 1])
                .collect(),
            center: 1,
            radius: self.radius,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereNode {
    pub id: usize,
    pub label: String,
}

/// On-disk sphere: `{nodes:[{id,label}], succ:[[i,j]], match:[[i,j,stack]], center, radius}`
/// with 1-based stacks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphereFile {
    pub nodes: Vec<SphereNode>,
    #[serde(default)]
    pub succ: Vec<[usize; 2]>,
    #[serde(default, rename = "match")]
    pub matching: Vec<[usize; 3]>,
    pub center: usize,
    pub radius: usize,
}

impl SphereFile {
    pub fn build(&self, alphabet: &CallReturnAlphabet) -> Result<Sphere, SphereError> {
        let mut ids = HashMap::new();
        let mut labels = Vec::new();
        for node in &self.nodes {
            if ids.insert(node.id, labels.len()).is_some() {
                return Err(SphereError::Malformed(format!("duplicate node id {}", node.id)));
            }
            labels.push(
                alphabet
                    .lookup(&node.label)
                    .map_err(|e| SphereError::Malformed(e.to_string()))?,
            );
        }
        let id = |x: usize| {
            ids.get(&x)
                .copied()
                .ok_or_else(|| SphereError::Malformed(format!("unknown node id {x}")))
        };
        let mut raw = RawSphere {
            labels,
            center: id(self.center)?,
            radius: self.radius,
            ..RawSphere::default()
        };
        for &[i, j] in &self.succ {
            raw.succ.push((id(i)?, id(j)?));
        }
        for &[i, j, s] in &self.matching {
            if s == 0 || s > alphabet.stack_count() {
                return Err(SphereError::Malformed(format!("stack {s} out of range")));
            }
            raw.matches.push((id(i)?, id(j)?, s - 1));
        }
        let sphere = Sphere::from_raw(&raw)?;
        sphere.check_labels(alphabet)?;
        for &(c, _, _) in &raw.matches {
            if !alphabet.class(raw.labels[c]).is_call() {
                return Err(SphereError::Malformed("first endpoint of a matching edge must be the call".into()));
            }
        }
        Ok(sphere)
    }
}

/// Number of positions of `word` whose `r`-sphere is isomorphic to `sphere`.
pub fn sphere_count(word: &NestedWord, sphere: &Sphere, r: usize) -> usize {
    if sphere.radius() != r {
        return 0;
    }
    (0..word.len())
        .filter(|&i| Sphere::around(word, i, r).map(|s| &s == sphere).unwrap_or(false))
        .count()
}

/// All spheres (up to isomorphism) realized by words of length at most `max_len`.
pub fn enumerate_spheres(alphabet: &std::sync::Arc<CallReturnAlphabet>, r: usize, max_len: usize) -> BTreeSet<Sphere> {
    (1..=max_len)
        .flat_map(|len| corpus::words_of_length(alphabet, len))
        .collect::<Vec<_>>()
        .into_par_iter()
        .fold(BTreeSet::new, |mut acc, w| {
            let word = NestedWord::new(alphabet.clone(), w).expect("non-empty");
            for i in 0..word.len() {
                acc.insert(Sphere::around(&word, i, r).expect("in range"));
            }
            acc
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        })
}
