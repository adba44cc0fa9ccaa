//! The sphere automaton of radius r: a generalized two-stack nested-word
//! automaton whose states are sets of extended spheres. Its state space is
//! never built; states are checked on demand and one accepting run per word
//! is constructed directly.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::alphabet::{CallReturnAlphabet, SymbolId};
use crate::nested::NestedWord;
use crate::spheres::{color_bound, Sphere};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SphereAutomatonError {
    #[error("invalid sphere-automaton state: {0}")]
    InvalidState(String),
    #[error("run has length {run} but the word has length {word}")]
    LengthMismatch { run: usize, word: usize },
}

/// A sphere with an active node and a colour. Ordered by core, then colour,
/// then active node, so all members sharing a core and colour are adjacent.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExtendedSphere {
    pub core: Arc<Sphere>,
    pub color: usize,
    pub active: usize,
}

impl ExtendedSphere {
    /// The same sphere and colour with another active node.
    pub fn with_active(&self, k: usize) -> ExtendedSphere {
        ExtendedSphere {
            core: self.core.clone(),
            color: self.color,
            active: k,
        }
    }

    pub fn is_centered(&self) -> bool {
        self.active == 0
    }

    fn active_depth(&self) -> usize {
        self.core.depth(self.active)
    }
}

/// A state: a set of extended spheres, possibly empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SphereState {
    pub members: BTreeSet<ExtendedSphere>,
}

impl SphereState {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, e: &ExtendedSphere) -> bool {
        self.members.contains(e)
    }

    /// Members sharing `e`'s core and colour (any active node).
    fn siblings<'a>(&'a self, e: &ExtendedSphere) -> impl Iterator<Item = &'a ExtendedSphere> + 'a {
        let lo = e.with_active(0);
        let core = e.core.clone();
        let color = e.color;
        self.members
            .range(lo..)
            .take_while(move |m| m.color == color && m.core == core)
    }

    /// The unique member whose active node is the centre.
    pub fn centered(&self) -> Option<&ExtendedSphere> {
        self.members.iter().find(|e| e.is_centered())
    }

    pub fn label(&self) -> Option<SymbolId> {
        self.members.iter().next().map(|e| e.core.label(e.active))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StatePredicates {
    pub valid: bool,
    pub is_final: bool,
    pub calling: bool,
}

/// Why a candidate run is not an accepting run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunViolation {
    InvalidState(usize),
    Transition(usize),
    NotFinal,
    UnmatchedCalling(usize),
}

impl fmt::Display for RunViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunViolation::InvalidState(i) => write!(f, "invalid state at position {}", i + 1),
            RunViolation::Transition(i) => write!(f, "no transition into position {}", i + 1),
            RunViolation::NotFinal => write!(f, "last state is not final"),
            RunViolation::UnmatchedCalling(i) => write!(f, "calling state at unmatched position {}", i + 1),
        }
    }
}

/// Greedy colouring of the overlap graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapColoring {
    /// Colour per position, starting at 1.
    pub colors: Vec<usize>,
    /// Largest number of overlapping partners of a single position.
    pub max_degree: usize,
}

impl OverlapColoring {
    pub fn color_count(&self) -> usize {
        self.colors.iter().copied().max().unwrap_or(0)
    }
}

/// Spheres and distances of one word, computed once.
pub struct WordSpheres {
    pub spheres: Vec<Arc<Sphere>>,
    /// `node_of[i'][i]`: canonical node of position `i` inside the sphere around `i'`.
    pub node_of: Vec<HashMap<usize, usize>>,
    pub dist: Vec<Vec<usize>>,
}

impl WordSpheres {
    pub fn new(word: &NestedWord, r: usize) -> Self {
        let mut spheres = Vec::with_capacity(word.len());
        let mut node_of = Vec::with_capacity(word.len());
        for i in 0..word.len() {
            let (s, emb) = Sphere::around_with_embedding(word, i, r).expect("position in range");
            spheres.push(Arc::new(s));
            node_of.push(emb.iter().enumerate().map(|(k, &p)| (p, k)).collect());
        }
        let dist = (0..word.len()).map(|i| word.distances_from(i)).collect();
        WordSpheres { spheres, node_of, dist }
    }
}

/// The sphere automaton for one alphabet and radius.
#[derive(Clone, Debug)]
pub struct SphereAutomaton {
    alphabet: Arc<CallReturnAlphabet>,
    radius: usize,
}

impl SphereAutomaton {
    pub fn new(alphabet: Arc<CallReturnAlphabet>, radius: usize) -> Self {
        SphereAutomaton { alphabet, radius }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn alphabet(&self) -> &Arc<CallReturnAlphabet> {
        &self.alphabet
    }

    fn match_target(&self, e: &ExtendedSphere) -> Option<usize> {
        e.core.match_target(&self.alphabet, e.active)
    }

    fn match_source(&self, e: &ExtendedSphere) -> Option<usize> {
        e.core.match_source(&self.alphabet, e.active)
    }

    fn member_ok(&self, e: &ExtendedSphere) -> bool {
        e.core.radius() == self.radius
            && e.active < e.core.len()
            && e.color >= 1
            && e.color <= color_bound(self.radius)
    }

    pub fn is_valid(&self, state: &SphereState) -> bool {
        if state.is_empty() {
            return true;
        }
        if !state.members.iter().all(|e| self.member_ok(e)) {
            return false;
        }
        // (a) exactly one member with centre = active node
        if state.members.iter().filter(|e| e.is_centered()).count() != 1 {
            return false;
        }
        // (b) a common label
        let label = state.label();
        if state.members.iter().any(|e| Some(e.core.label(e.active)) != label) {
            return false;
        }
        // (c) core and colour determine the active node
        let mut seen: BTreeMap<(&Arc<Sphere>, usize), usize> = BTreeMap::new();
        for e in &state.members {
            if *seen.entry((&e.core, e.color)).or_insert(e.active) != e.active {
                return false;
            }
        }
        true
    }

    pub fn is_final(&self, state: &SphereState) -> bool {
        state
            .members
            .iter()
            .all(|e| self.match_target(e).is_none() && e.core.succ(e.active).is_none())
    }

    pub fn is_calling(&self, state: &SphereState) -> bool {
        state.members.iter().any(|e| self.match_target(e).is_some())
    }

    pub fn state_predicates(&self, state: &SphereState) -> StatePredicates {
        StatePredicates {
            valid: self.is_valid(state),
            is_final: self.is_final(state),
            calling: self.is_calling(state),
        }
    }

    fn require_valid(&self, state: &SphereState) -> Result<(), SphereAutomatonError> {
        if self.is_valid(state) {
            Ok(())
        } else {
            Err(SphereAutomatonError::InvalidState("violates the state conditions".into()))
        }
    }

    /// The successor-edge conditions (2)-(7), shared by both transition kinds.
    fn linear_conditions(&self, prev: &SphereState, a: SymbolId, next: &SphereState) -> bool {
        let r = self.radius;
        // (2)
        if next.label() != Some(a) {
            return false;
        }
        for e in &prev.members {
            // (3) anything carried over from prev sits at the successor
            if next.siblings(e).any(|m| e.core.succ(e.active) != Some(m.active)) {
                return false;
            }
            match e.core.succ(e.active) {
                // (7)
                Some(k) => {
                    if !next.contains(&e.with_active(k)) {
                        return false;
                    }
                }
                // (5)
                None => {
                    if e.active_depth() != r {
                        return false;
                    }
                }
            }
        }
        for e in &next.members {
            match e.core.pred(e.active) {
                // (6)
                Some(k) => {
                    if !prev.contains(&e.with_active(k)) {
                        return false;
                    }
                }
                // (4)
                None => {
                    if !prev.is_empty() && e.active_depth() != r {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// `(prev, a, next) ∈ δ₁`.
    pub fn delta1_allows(&self, prev: &SphereState, a: SymbolId, next: &SphereState) -> Result<bool, SphereAutomatonError> {
        self.require_valid(prev)?;
        self.require_valid(next)?;
        if next.is_empty() {
            return Ok(false);
        }
        // (1) no active node is a matched return
        if next.members.iter().any(|e| self.match_source(e).is_some()) {
            return Ok(false);
        }
        Ok(self.linear_conditions(prev, a, next))
    }

    /// `(call, prev, a, next) ∈ δ₂`.
    pub fn delta2_allows(
        &self,
        call: &SphereState,
        prev: &SphereState,
        a: SymbolId,
        next: &SphereState,
    ) -> Result<bool, SphereAutomatonError> {
        self.require_valid(call)?;
        self.require_valid(prev)?;
        self.require_valid(next)?;
        if call.is_empty() || prev.is_empty() || next.is_empty() || !self.alphabet.class(a).is_return() {
            return Ok(false);
        }
        if !self.linear_conditions(prev, a, next) {
            return Ok(false);
        }
        let r = self.radius;
        for e in &call.members {
            // (3')
            if next.siblings(e).any(|m| self.match_target(e) != Some(m.active)) {
                return Ok(false);
            }
            match self.match_target(e) {
                // (7')
                Some(k) => {
                    if !next.contains(&e.with_active(k)) {
                        return Ok(false);
                    }
                }
                // (5')
                None => {
                    if e.active_depth() != r {
                        return Ok(false);
                    }
                }
            }
        }
        for e in &next.members {
            match self.match_source(e) {
                // (6')
                Some(k) => {
                    if !call.contains(&e.with_active(k)) {
                        return Ok(false);
                    }
                }
                // (4')
                None => {
                    if e.active_depth() != r {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// δ₁ when `matched_call` is `None`, δ₂ otherwise.
    pub fn delta_allows(
        &self,
        prev: &SphereState,
        matched_call: Option<&SphereState>,
        a: SymbolId,
        next: &SphereState,
    ) -> Result<bool, SphereAutomatonError> {
        match matched_call {
            None => self.delta1_allows(prev, a, next),
            Some(c) => self.delta2_allows(c, prev, a, next),
        }
    }

    /// The sphere a state claims for its position.
    pub fn eta(&self, state: &SphereState) -> Result<Sphere, SphereAutomatonError> {
        self.require_valid(state)?;
        Ok(match state.centered() {
            Some(e) => (*e.core).clone(),
            None => Sphere::placeholder(self.radius),
        })
    }

    pub fn chi_coloring(&self, word: &NestedWord) -> OverlapColoring {
        self.coloring_of(&WordSpheres::new(word, self.radius))
    }

    fn coloring_of(&self, ws: &WordSpheres) -> OverlapColoring {
        let n = ws.spheres.len();
        let reach = 2 * self.radius + 1;
        let overlap = |i: usize, j: usize| i != j && ws.dist[i][j] <= reach && ws.spheres[i] == ws.spheres[j];
        let mut colors = vec![0usize; n];
        let mut max_degree = 0;
        for i in 0..n {
            let degree = (0..n).filter(|&j| overlap(i, j)).count();
            max_degree = max_degree.max(degree);
            let used: BTreeSet<usize> = (0..i).filter(|&j| overlap(i, j)).map(|j| colors[j]).collect();
            colors[i] = (1..).find(|c| !used.contains(c)).expect("unbounded");
        }
        OverlapColoring { colors, max_degree }
    }

    /// The accepting run built from the word's own spheres.
    pub fn canonical_run(&self, word: &NestedWord) -> Vec<SphereState> {
        let ws = WordSpheres::new(word, self.radius);
        let chi = self.coloring_of(&ws);
        (0..word.len())
            .map(|i| SphereState {
                members: (0..word.len())
                    .filter(|&j| ws.dist[i][j] <= self.radius)
                    .map(|j| ExtendedSphere {
                        core: ws.spheres[j].clone(),
                        color: chi.colors[j],
                        active: ws.node_of[j][&i],
                    })
                    .collect(),
            })
            .collect()
    }

    /// Checks that `run` is an accepting run on `word`.
    pub fn verify_run(&self, word: &NestedWord, run: &[SphereState]) -> Result<(), RunViolation> {
        assert_eq!(run.len(), word.len(), "run length must match the word");
        for (i, s) in run.iter().enumerate() {
            if !self.is_valid(s) {
                return Err(RunViolation::InvalidState(i));
            }
        }
        let empty = SphereState::empty();
        for i in 0..word.len() {
            let prev = if i == 0 { &empty } else { &run[i - 1] };
            let call = word.call_of(i).map(|c| &run[c]);
            if !self.delta_allows(prev, call, word.label(i), &run[i]).unwrap_or(false) {
                return Err(RunViolation::Transition(i));
            }
            if self.is_calling(&run[i]) && word.return_of(i).is_none() {
                return Err(RunViolation::UnmatchedCalling(i));
            }
        }
        if !self.is_final(&run[word.len() - 1]) {
            return Err(RunViolation::NotFinal);
        }
        Ok(())
    }

    pub fn br_run_verify(&self, word: &NestedWord, run: &[SphereState]) -> Result<bool, SphereAutomatonError> {
        if run.len() != word.len() {
            return Err(SphereAutomatonError::LengthMismatch {
                run: run.len(),
                word: word.len(),
            });
        }
        Ok(self.verify_run(word, run).is_ok())
    }

    /// Depth-first search for accepting runs of `word` whose states are all
    /// drawn from `pool`. Every accepting run found is checked against the
    /// word's actual spheres; the search stops after `budget` explored nodes.
    pub fn pooled_run_search(&self, word: &NestedWord, pool: &StatePool, budget: usize) -> PooledSearch {
        let truth: Vec<Sphere> = (0..word.len())
            .map(|i| Sphere::around(word, i, self.radius).expect("in range"))
            .collect();
        let mut out = PooledSearch::default();
        let mut run: Vec<&SphereState> = Vec::with_capacity(word.len());
        self.search_from(word, pool, &truth, &mut run, budget, &mut out);
        out
    }

    fn search_from<'p>(
        &self,
        word: &NestedWord,
        pool: &'p StatePool,
        truth: &[Sphere],
        run: &mut Vec<&'p SphereState>,
        budget: usize,
        out: &mut PooledSearch,
    ) {
        let i = run.len();
        if i == word.len() {
            if self.is_final(run[i - 1]) {
                out.accepting_runs += 1;
                let bad = (0..i).find(|&k| run[k].centered().map(|e| *e.core != truth[k]).unwrap_or(true));
                if let Some(k) = bad {
                    out.violations.push(k);
                }
            }
            return;
        }
        let empty = SphereState::empty();
        let a = word.label(i);
        let Some(candidates) = pool.by_label.get(&a) else {
            return;
        };
        for cand in candidates {
            if out.explored >= budget {
                out.exhausted_budget = true;
                return;
            }
            out.explored += 1;
            if self.is_calling(cand) && word.return_of(i).is_none() {
                continue;
            }
            let prev = if i == 0 { &empty } else { run[i - 1] };
            let call = word.call_of(i).map(|c| run[c]);
            if !self.delta_allows(prev, call, a, cand).unwrap_or(false) {
                continue;
            }
            run.push(cand);
            self.search_from(word, pool, truth, run, budget, out);
            run.pop();
        }
    }
}

/// States collected from canonical runs, indexed by label.
#[derive(Clone, Debug, Default)]
pub struct StatePool {
    by_label: BTreeMap<SymbolId, Vec<SphereState>>,
}

impl StatePool {
    pub fn from_runs<'a>(runs: impl IntoIterator<Item = &'a SphereState>) -> Self {
        let mut set: BTreeSet<&SphereState> = BTreeSet::new();
        set.extend(runs);
        let mut by_label: BTreeMap<SymbolId, Vec<SphereState>> = BTreeMap::new();
        for s in set {
            if let Some(a) = s.label() {
                by_label.entry(a).or_default().push(s.clone());
            }
        }
        StatePool { by_label }
    }

    pub fn len(&self) -> usize {
        self.by_label.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn states(&self) -> impl Iterator<Item = &SphereState> {
        self.by_label.values().flatten()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PooledSearch {
    pub explored: usize,
    pub accepting_runs: usize,
    /// First wrong position of each accepting run that misreports a sphere.
    pub violations: Vec<usize>,
    pub exhausted_budget: bool,
}
