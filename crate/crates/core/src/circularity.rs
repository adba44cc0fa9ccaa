//! Direction strings, the paths they trace through nested words, bounded
//! search for circular strings, and the translation to topological moves.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::alphabet::{CallReturnAlphabet, SymbolClass, SymbolId};
use crate::nested::{NestedWord, WordError};

/// One move along a nested word. Stacks are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Fwd,
    Bwd,
    /// From a matched call of the stack to its return.
    Jump(usize),
    /// From a matched return of the stack to its call.
    Back(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircularityError {
    #[error("unknown direction `{0}`")]
    UnknownDirection(String),
    #[error("direction string is empty")]
    Empty,
    #[error("bound {bound} is below {needed}")]
    BoundTooSmall { bound: usize, needed: usize },
    #[error(transparent)]
    Word(#[from] WordError),
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Fwd => write!(f, "fwd"),
            Direction::Bwd => write!(f, "bwd"),
            Direction::Jump(s) => write!(f, "jump{}", s + 1),
            Direction::Back(s) => write!(f, "back{}", s + 1),
        }
    }
}

impl FromStr for Direction {
    type Err = CircularityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let stack = |rest: &str| match rest.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(k - 1),
            _ => Err(CircularityError::UnknownDirection(s.to_string())),
        };
        match s {
            "fwd" => Ok(Direction::Fwd),
            "bwd" => Ok(Direction::Bwd),
            _ if s.starts_with("jump") => Ok(Direction::Jump(stack(&s[4..])?)),
            _ if s.starts_with("back") => Ok(Direction::Back(stack(&s[4..])?)),
            _ => Err(CircularityError::UnknownDirection(s.to_string())),
        }
    }
}

/// Parses whitespace-separated direction tokens.
pub fn parse_directions(text: &str) -> Result<Vec<Direction>, CircularityError> {
    text.split_whitespace().map(str::parse).collect()
}

pub fn render_directions(w: &[Direction]) -> String {
    w.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

/// The position reached from `i` by one move, if any.
pub fn step(word: &NestedWord, i: usize, d: Direction) -> Option<usize> {
    match d {
        Direction::Fwd => (i + 1 < word.len()).then_some(i + 1),
        Direction::Bwd => i.checked_sub(1),
        Direction::Jump(s) => match word.class(i) {
            SymbolClass::Call(t) if t == s => word.return_of(i),
            _ => None,
        },
        Direction::Back(s) => match word.class(i) {
            SymbolClass::Return(t) if t == s => word.call_of(i),
            _ => None,
        },
    }
}

/// The positions visited from `i` along `w` (including `i`), or `None` if
/// some move is impossible.
pub fn trace(word: &NestedWord, w: &[Direction], i: usize) -> Option<Vec<usize>> {
    let mut path = vec![i];
    let mut cur = i;
    for &d in w {
        cur = step(word, cur, d)?;
        path.push(cur);
    }
    Some(path)
}

fn distinct_path(path: &[usize]) -> bool {
    let m = path.len() - 1;
    let inner: HashSet<usize> = path[..m].iter().copied().collect();
    inner.len() == m && !path[1..m].contains(&path[m])
}

/// End positions `j` with `i ⇒ʷ j`, or with the distinctness requirement
/// when `distinct` is set. Moves are deterministic, so there is at most one.
pub fn path_exists(word: &NestedWord, w: &[Direction], i: usize, distinct: bool) -> Result<BTreeSet<usize>, CircularityError> {
    word.check_position(i)?;
    Ok(trace(word, w, i)
        .filter(|p| !distinct || distinct_path(p))
        .map(|p| p[p.len() - 1])
        .into_iter()
        .collect())
}

/// A word and a start position on which a direction string closes a cycle.
#[derive(Clone, Debug)]
pub struct Witness {
    pub word: NestedWord,
    pub start: usize,
}

#[derive(Clone, Debug)]
pub enum CircularityVerdict {
    Circular(Witness),
    /// No witness among words of length at most `bound`.
    NotCircular { bound: usize },
}

impl CircularityVerdict {
    pub fn is_circular(&self) -> bool {
        matches!(self, CircularityVerdict::Circular(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Role {
    Call { stack: usize, ret: usize },
    Return { stack: usize, call: usize },
}

/// Path search over positions `0..len`, collecting the matching pairs the
/// path needs. Completion to a full word happens at the leaves.
struct Search<'a> {
    w: &'a [Direction],
    len: usize,
    roles: Vec<Option<Role>>,
    visited: Vec<bool>,
    pairs: Vec<(usize, usize, usize)>,
}

impl Search<'_> {
    fn crosses(&self, stack: usize, c: usize, r: usize) -> bool {
        self.pairs
            .iter()
            .any(|&(s, c2, r2)| s == stack && ((c < c2 && c2 < r && r < r2) || (c2 < c && c < r2 && r2 < r)))
    }

    fn add_pair(&mut self, stack: usize, c: usize, r: usize) -> bool {
        match (self.roles[c], self.roles[r]) {
            (Some(Role::Call { stack: s, ret }), _) => s == stack && ret == r,
            (None, Some(_)) => false,
            (Some(_), _) => false,
            (None, None) => {
                if self.crosses(stack, c, r) {
                    return false;
                }
                self.roles[c] = Some(Role::Call { stack, ret: r });
                self.roles[r] = Some(Role::Return { stack, call: c });
                self.pairs.push((stack, c, r));
                true
            }
        }
    }

    fn remove_pair(&mut self, c: usize, r: usize) {
        self.roles[c] = None;
        self.roles[r] = None;
        self.pairs.pop();
    }

    /// Continues the path from `cur` after `k` moves.
    fn extend(&mut self, start: usize, cur: usize, k: usize) -> Option<Vec<SymbolId>> {
        if k == self.w.len() {
            return if cur == start { complete(&self.roles) } else { None };
        }
        let last = k + 1 == self.w.len();
        // targets of the move; the final target must be the start, others unvisited
        let allowed = |this: &Self, t: usize| if last { t == start } else { !this.visited[t] };
        let try_target = |this: &mut Self, t: usize| -> Option<Vec<SymbolId>> {
            if !allowed(this, t) {
                return None;
            }
            this.visited[t] = true;
            let out = this.extend(start, t, k + 1);
            if !last {
                this.visited[t] = false;
            }
            out
        };
        match self.w[k] {
            Direction::Fwd => (cur + 1 < self.len).then(|| try_target(self, cur + 1)).flatten(),
            Direction::Bwd => cur.checked_sub(1).and_then(|t| try_target(self, t)),
            Direction::Jump(s) => {
                let targets: Vec<usize> = match self.roles[cur] {
                    Some(Role::Call { stack, ret }) if stack == s => vec![ret],
                    Some(_) => vec![],
                    None => (cur + 1..self.len).collect(),
                };
                for t in targets {
                    let fresh = self.roles[cur].is_none();
                    if fresh && !self.add_pair(s, cur, t) {
                        continue;
                    }
                    let out = try_target(self, t);
                    if fresh {
                        self.remove_pair(cur, t);
                    }
                    if out.is_some() {
                        return out;
                    }
                }
                None
            }
            Direction::Back(s) => {
                let targets: Vec<usize> = match self.roles[cur] {
                    Some(Role::Return { stack, call }) if stack == s => vec![call],
                    Some(_) => vec![],
                    None => (0..cur).rev().collect(),
                };
                for t in targets {
                    let fresh = self.roles[cur].is_none();
                    if fresh && !self.add_pair(s, t, cur) {
                        continue;
                    }
                    let out = try_target(self, t);
                    if fresh {
                        self.remove_pair(t, cur);
                    }
                    if out.is_some() {
                        return out;
                    }
                }
                None
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Entry {
    Free,
    Required(usize),
}

/// Labels over the two-stack alphabet (`a`, `a~`, `b`, `b~`) whose matching
/// contains exactly the required pairs among the positions that have roles.
fn complete(roles: &[Option<Role>]) -> Option<Vec<SymbolId>> {
    let n = roles.len();
    let call = |s: usize| SymbolId((2 * s) as u16);
    let ret = |s: usize| SymbolId((2 * s + 1) as u16);
    let mut failed: HashSet<(usize, Vec<Vec<Entry>>)> = HashSet::new();
    let mut labels = Vec::with_capacity(n);

    fn go(
        p: usize,
        roles: &[Option<Role>],
        stacks: &mut Vec<Vec<Entry>>,
        labels: &mut Vec<SymbolId>,
        failed: &mut HashSet<(usize, Vec<Vec<Entry>>)>,
        call: &dyn Fn(usize) -> SymbolId,
        ret: &dyn Fn(usize) -> SymbolId,
    ) -> bool {
        if p == roles.len() {
            return true;
        }
        if failed.contains(&(p, stacks.clone())) {
            return false;
        }
        let mut attempt = |stacks: &mut Vec<Vec<Entry>>, labels: &mut Vec<SymbolId>, label: SymbolId, s: usize, push: Option<Entry>| {
            let popped = match push {
                Some(e) => {
                    stacks[s].push(e);
                    None
                }
                None => stacks[s].pop(),
            };
            labels.push(label);
            let ok = go(p + 1, roles, stacks, labels, failed, call, ret);
            if !ok {
                labels.pop();
                match push {
                    Some(_) => {
                        stacks[s].pop();
                    }
                    None => {
                        if let Some(e) = popped {
                            stacks[s].push(e);
                        }
                    }
                }
            }
            ok
        };
        let ok = match roles[p] {
            Some(Role::Call { stack, .. }) => attempt(stacks, labels, call(stack), stack, Some(Entry::Required(p))),
            Some(Role::Return { stack, call: c }) => {
                stacks[stack].last() == Some(&Entry::Required(c)) && attempt(stacks, labels, ret(stack), stack, None)
            }
            None => (0..2).any(|s| {
                attempt(stacks, labels, call(s), s, Some(Entry::Free))
                    || (matches!(stacks[s].last(), None | Some(Entry::Free)) && attempt(stacks, labels, ret(s), s, None))
            }),
        };
        if !ok {
            failed.insert((p, stacks.clone()));
        }
        ok
    }

    let mut stacks = vec![Vec::new(), Vec::new()];
    go(0, roles, &mut stacks, &mut labels, &mut failed, &call, &ret).then_some(labels)
}

/// Searches the words of length at most `bound` over the two-stack alphabet
/// for one on which `w` traces a cycle with pairwise distinct positions.
pub fn is_circular(w: &[Direction], bound: usize) -> Result<CircularityVerdict, CircularityError> {
    if w.is_empty() {
        return Err(CircularityError::Empty);
    }
    if bound < w.len() + 1 {
        return Err(CircularityError::BoundTooSmall {
            bound,
            needed: w.len() + 1,
        });
    }
    // Only the two-stack alphabet is searched; other stacks never match.
    if w.iter().any(|d| matches!(d, Direction::Jump(s) | Direction::Back(s) if *s >= 2)) {
        return Ok(CircularityVerdict::NotCircular { bound });
    }
    // A witness stays a witness when pending calls are appended, so only
    // words of length exactly `bound` need to be searched.
    let len = bound;
    let alphabet = Arc::new(CallReturnAlphabet::two_stack());
    for start in 0..len {
        let mut search = Search {
            w,
            len,
            roles: vec![None; len],
            visited: vec![false; len],
            pairs: Vec::new(),
        };
        search.visited[start] = true;
        if let Some(labels) = search.extend(start, start, 0) {
            let word = NestedWord::new(alphabet, labels)?;
            debug_assert!(path_exists(&word, w, start, true).map(|s| s.contains(&start)).unwrap_or(false));
            return Ok(CircularityVerdict::Circular(Witness { word, start }));
        }
    }
    Ok(CircularityVerdict::NotCircular { bound })
}

/// All strings of length `1..=max_len` over the two-stack directions.
pub fn direction_strings(max_len: usize) -> Vec<Vec<Direction>> {
    use Direction::*;
    let all = [Fwd, Bwd, Jump(0), Back(0), Jump(1), Back(1)];
    let mut out = Vec::new();
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .into_iter()
            .flat_map(|w: Vec<Direction>| {
                all.iter().map(move |&d| {
                    let mut v = w.clone();
                    v.push(d);
                    v
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Moves of the topological alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Topo {
    Fwd2,
    Bwd2,
    Cw,
    Ccw,
}

impl fmt::Display for Topo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Topo::Fwd2 => "fwd2",
            Topo::Bwd2 => "bwd2",
            Topo::Cw => "cw",
            Topo::Ccw => "ccw",
        })
    }
}

pub type TopoString = Vec<Topo>;

pub fn render_topo(t: &[Topo]) -> String {
    t.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

/// Replaces each direction by a topological move, looking at the direction
/// just before it. Stacks beyond the second are treated like the second.
pub fn f_map(w: &[Direction]) -> TopoString {
    use Direction::*;
    let mut prev: Option<Direction> = None;
    w.iter()
        .map(|&d| {
            let t = match d {
                Jump(0) => Topo::Fwd2,
                Back(0) => Topo::Bwd2,
                Fwd if prev == Some(Back(0)) => Topo::Ccw,
                Fwd => Topo::Fwd2,
                Bwd if prev == Some(Jump(0)) => Topo::Cw,
                Bwd => Topo::Bwd2,
                Jump(_) if prev == Some(Bwd) => Topo::Ccw,
                Jump(_) => Topo::Fwd2,
                Back(_) if prev == Some(Fwd) => Topo::Cw,
                Back(_) => Topo::Bwd2,
            };
            prev = Some(d);
            t
        })
        .collect()
}

/// Reachable end positions for every start, keyed by start.
pub fn all_paths(word: &NestedWord, w: &[Direction], distinct: bool) -> HashMap<usize, BTreeSet<usize>> {
    (0..word.len())
        .map(|i| (i, path_exists(word, w, i, distinct).expect("in range")))
        .collect()
}
