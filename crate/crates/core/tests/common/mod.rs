//! Independent reference implementations used by the integration tests.
//! None of these call into the library's own algorithms for the property
//! they check; they only read words and automata through accessors.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use rand::Rng;
use twostack::automata::{Mnwa, Mvpa};
use twostack::logic::{Formula, Relation};
use twostack::spheres::Sphere;
use twostack::{CallReturnAlphabet, NestedWord, SymbolClass, SymbolId};

// ---------------------------------------------------------------- words

/// Grammar check: `W ::= ε | x W | c W r W` where `x` is not a stack-`s`
/// symbol and `c`/`r` are a stack-`s` call and return.
pub fn grammar_well_formed(al: &CallReturnAlphabet, s: usize, w: &[SymbolId]) -> bool {
    fn parse(al: &CallReturnAlphabet, s: usize, w: &[SymbolId], i: usize, j: usize, memo: &mut HashMap<(usize, usize), bool>) -> bool {
        if i == j {
            return true;
        }
        if let Some(&v) = memo.get(&(i, j)) {
            return v;
        }
        let v = match al.class(w[i]) {
            SymbolClass::Call(t) if t == s => (i + 1..j).any(|k| {
                al.class(w[k]) == SymbolClass::Return(s) && parse(al, s, w, i + 1, k, memo) && parse(al, s, w, k + 1, j, memo)
            }),
            SymbolClass::Return(t) if t == s => false,
            _ => parse(al, s, w, i + 1, j, memo),
        };
        memo.insert((i, j), v);
        v
    }
    parse(al, s, w, 0, w.len(), &mut HashMap::new())
}

/// Matching relation as `(call, return, stack)` triples, 0-based, by testing
/// every pair for a well-formed interior.
pub fn all_pairs_matching(al: &CallReturnAlphabet, w: &[SymbolId]) -> BTreeSet<(usize, usize, usize)> {
    let mut out = BTreeSet::new();
    for i in 0..w.len() {
        let SymbolClass::Call(s) = al.class(w[i]) else { continue };
        for j in i + 1..w.len() {
            if al.class(w[j]) == SymbolClass::Return(s) && grammar_well_formed(al, s, &w[i + 1..j]) {
                out.insert((i, j, s));
            }
        }
    }
    out
}

/// Membership in `((ab)^n ā^(n+1) b̄^(n+1))+` with `n ≥ 1`, by scanning blocks.
pub fn in_l_plus(al: &CallReturnAlphabet, w: &[SymbolId]) -> bool {
    let names: Vec<&str> = w.iter().map(|&a| al.name(a)).collect();
    let mut i = 0;
    if names.is_empty() {
        return false;
    }
    while i < names.len() {
        let mut n = 0;
        while names.get(i) == Some(&"a") && names.get(i + 1) == Some(&"b") {
            n += 1;
            i += 2;
        }
        if n == 0 {
            return false;
        }
        for sym in ["a~", "b~"] {
            for _ in 0..=n {
                if names.get(i) != Some(&sym) {
                    return false;
                }
                i += 1;
            }
        }
    }
    true
}

// ---------------------------------------------------------------- automata

/// A word with its matching, computed once by the all-pairs oracle.
#[derive(Clone, Debug)]
pub struct Nesting {
    pub labels: Vec<SymbolId>,
    pub ret_of: Vec<Option<usize>>,
    pub call_of: Vec<Option<usize>>,
}

impl Nesting {
    pub fn new(al: &CallReturnAlphabet, w: &[SymbolId]) -> Self {
        let mut ret_of = vec![None; w.len()];
        let mut call_of = vec![None; w.len()];
        for (c, r, _) in all_pairs_matching(al, w) {
            ret_of[c] = Some(r);
            call_of[r] = Some(c);
        }
        Nesting {
            labels: w.to_vec(),
            ret_of,
            call_of,
        }
    }
}

/// Forward search over partial MNWA runs. A partial run up to position `i`
/// matters only through its last state and the states at the matched calls
/// whose returns lie ahead; those calls are the same for every run, so each
/// configuration is a state plus one entry per open call.
pub struct RunSearch<'a> {
    b: &'a Mnwa,
    succ1: HashMap<(usize, SymbolId), Vec<usize>>,
    succ2: HashMap<(usize, usize, SymbolId), Vec<usize>>,
}

impl<'a> RunSearch<'a> {
    pub fn new(b: &'a Mnwa) -> Self {
        let mut succ1: HashMap<_, Vec<usize>> = HashMap::new();
        for &(q, a, q2) in b.delta1() {
            succ1.entry((q, a)).or_default().push(q2);
        }
        let mut succ2: HashMap<_, Vec<usize>> = HashMap::new();
        for &(p, q, a, q2) in b.delta2() {
            succ2.entry((p, q, a)).or_default().push(q2);
        }
        RunSearch { b, succ1, succ2 }
    }

    pub fn accepts(&self, w: &Nesting) -> bool {
        const NONE: &[usize] = &[];
        let b = self.b;
        // open matched calls, in call order
        let mut open: Vec<usize> = Vec::new();
        let mut configs: HashSet<(usize, Vec<usize>)> = HashSet::new();
        for (i, &a) in w.labels.iter().enumerate() {
            let mut next = HashSet::new();
            let slot = w.call_of[i].map(|c| open.iter().position(|&o| o == c).expect("call is open"));
            let starts: Vec<(usize, Vec<usize>)> = if i == 0 {
                b.initial().iter().map(|&q| (q, Vec::new())).collect()
            } else {
                configs.drain().collect()
            };
            for (q, states) in starts {
                let targets = match slot {
                    Some(k) if i > 0 => self.succ2.get(&(states[k], q, a)).map(Vec::as_slice).unwrap_or(NONE),
                    _ => self.succ1.get(&(q, a)).map(Vec::as_slice).unwrap_or(NONE),
                };
                for &q2 in targets {
                    if b.is_calling(q2) && w.ret_of[i].is_none() {
                        continue;
                    }
                    let mut st = states.clone();
                    if let Some(k) = slot {
                        st.remove(k);
                    }
                    if w.ret_of[i].is_some() {
                        st.push(q2);
                    }
                    next.insert((q2, st));
                }
            }
            if let Some(k) = slot {
                open.remove(k);
            }
            if w.ret_of[i].is_some() {
                open.push(i);
            }
            configs = next;
            if configs.is_empty() {
                return false;
            }
        }
        configs.iter().any(|(q, _)| b.is_final(*q))
    }
}

pub fn mnwa_accepts_by_search(b: &Mnwa, word: &NestedWord) -> bool {
    RunSearch::new(b).accepts(&Nesting::new(word.alphabet(), word.labels()))
}

/// Explicit-stack search over MVPA runs.
pub fn mvpa_accepts_by_search(a: &Mvpa, word: &[SymbolId]) -> bool {
    let al = a.alphabet();
    let k = al.stack_count();
    type Conf = (usize, Vec<Vec<usize>>);
    let mut frontier: BTreeSet<Conf> = a.initial().iter().map(|&q| (q, vec![Vec::new(); k])).collect();
    for &sym in word {
        let mut next = BTreeSet::new();
        for (q, stacks) in &frontier {
            match al.class(sym) {
                SymbolClass::Call(s) => {
                    for &(p, b, g, p2) in a.push_transitions() {
                        if p == *q && b == sym {
                            let mut st = stacks.clone();
                            st[s].push(g);
                            next.insert((p2, st));
                        }
                    }
                }
                SymbolClass::Return(s) => {
                    let top = stacks[s].last().copied().unwrap_or(0);
                    for &(p, b, g, p2) in a.pop_transitions() {
                        if p == *q && b == sym && g == top {
                            let mut st = stacks.clone();
                            st[s].pop();
                            next.insert((p2, st));
                        }
                    }
                }
                SymbolClass::Internal => {
                    for &(p, b, p2) in a.internal_transitions() {
                        if p == *q && b == sym {
                            next.insert((p2, stacks.clone()));
                        }
                    }
                }
            }
        }
        frontier = next;
    }
    !word.is_empty() && frontier.iter().any(|(q, _)| a.is_final(*q))
}

/// Random MNWA over `al` with `states` states; calling states are drawn when
/// `generalized` is set.
pub fn random_mnwa(rng: &mut impl Rng, al: &Arc<CallReturnAlphabet>, states: usize, generalized: bool) -> Mnwa {
    let density = rng.gen_range(0.25..0.6);
    let mut d1 = Vec::new();
    let mut d2 = Vec::new();
    for q in 0..states {
        for a in al.symbols() {
            for q2 in 0..states {
                if rng.gen_bool(density) {
                    d1.push((q, a, q2));
                }
            }
        }
    }
    for p in 0..states {
        for q in 0..states {
            for a in al.returns() {
                for q2 in 0..states {
                    if rng.gen_bool(density) {
                        d2.push((p, q, a, q2));
                    }
                }
            }
        }
    }
    let pick = |rng: &mut dyn rand::RngCore, p: f64| -> Vec<usize> { (0..states).filter(|_| rng.gen_bool(p)).collect() };
    let mut initial = pick(rng, 0.4);
    if initial.is_empty() {
        initial.push(0);
    }
    let finals = pick(rng, 0.5);
    let calling = if generalized { pick(rng, 0.4) } else { Vec::new() };
    let names = (0..states).map(|q| format!("q{q}")).collect();
    Mnwa::new(al.clone(), names, initial, finals, calling, d1, d2).expect("random automaton is well-typed")
}

/// Random MVPA over `al` with `states` states and two stack symbols besides ⊥.
pub fn random_mvpa(rng: &mut impl Rng, al: &Arc<CallReturnAlphabet>, states: usize) -> Mvpa {
    let density = rng.gen_range(0.2..0.5);
    let gamma = 3;
    let mut push = Vec::new();
    let mut pop = Vec::new();
    let mut internal = Vec::new();
    for q in 0..states {
        for a in al.symbols() {
            for q2 in 0..states {
                match al.class(a) {
                    SymbolClass::Call(_) => {
                        for g in 1..gamma {
                            if rng.gen_bool(density) {
                                push.push((q, a, g, q2));
                            }
                        }
                    }
                    SymbolClass::Return(_) => {
                        for g in 0..gamma {
                            if rng.gen_bool(density) {
                                pop.push((q, a, g, q2));
                            }
                        }
                    }
                    SymbolClass::Internal => {
                        if rng.gen_bool(density) {
                            internal.push((q, a, q2));
                        }
                    }
                }
            }
        }
    }
    let finals: Vec<usize> = (0..states).filter(|_| rng.gen_bool(0.5)).collect();
    Mvpa::new(
        al.clone(),
        (0..states).map(|q| format!("q{q}")).collect(),
        vec![0],
        finals,
        vec!["⊥".into(), "x".into(), "y".into()],
        push,
        pop,
        internal,
    )
    .expect("random automaton is well-typed")
}

// ---------------------------------------------------------------- spheres

/// A pointed structure with explicit edge sets; node ids are arbitrary.
#[derive(Clone, Debug)]
pub struct PlainSphere {
    pub labels: Vec<SymbolId>,
    pub succ: BTreeSet<(usize, usize)>,
    pub matches: BTreeSet<(usize, usize, usize)>,
    pub center: usize,
}

/// Gaifman distances from `i`, using the all-pairs matching.
pub fn distances(al: &CallReturnAlphabet, w: &[SymbolId], i: usize) -> Vec<usize> {
    let mut adj = vec![Vec::new(); w.len()];
    for k in 1..w.len() {
        adj[k - 1].push(k);
        adj[k].push(k - 1);
    }
    for (c, r, _) in all_pairs_matching(al, w) {
        adj[c].push(r);
        adj[r].push(c);
    }
    let mut dist = vec![usize::MAX; w.len()];
    dist[i] = 0;
    let mut queue = VecDeque::from([i]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// The induced substructure on positions within distance `r` of `i`.
pub fn plain_sphere(al: &CallReturnAlphabet, w: &[SymbolId], i: usize, r: usize) -> PlainSphere {
    let dist = distances(al, w, i);
    let nodes: Vec<usize> = (0..w.len()).filter(|&k| dist[k] <= r).collect();
    let id: BTreeMap<usize, usize> = nodes.iter().enumerate().map(|(n, &k)| (k, n)).collect();
    PlainSphere {
        labels: nodes.iter().map(|&k| w[k]).collect(),
        succ: nodes
            .iter()
            .filter_map(|&k| Some((id[&k], *id.get(&(k + 1))?)))
            .collect(),
        matches: all_pairs_matching(al, w)
            .into_iter()
            .filter_map(|(c, r, s)| Some((*id.get(&c)?, *id.get(&r)?, s)))
            .collect(),
        center: id[&i],
    }
}

/// Reads a library sphere back into explicit edge sets.
pub fn from_library(al: &CallReturnAlphabet, s: &Sphere) -> PlainSphere {
    PlainSphere {
        labels: s.labels().to_vec(),
        succ: (0..s.len()).filter_map(|k| Some((k, s.succ(k)?))).collect(),
        matches: (0..s.len())
            .filter(|&k| al.class(s.label(k)).is_call())
            .filter_map(|k| s.partner(k).map(|(q, st)| (k, q, st)))
            .collect(),
        center: 0,
    }
}

/// Isomorphism by trying every label-preserving bijection fixing the centre.
pub fn brute_isomorphic(x: &PlainSphere, y: &PlainSphere) -> bool {
    let n = x.labels.len();
    if n != y.labels.len() || x.succ.len() != y.succ.len() || x.matches.len() != y.matches.len() {
        return false;
    }
    if x.labels[x.center] != y.labels[y.center] {
        return false;
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    map[x.center] = y.center;
    used[y.center] = true;
    fn extend(x: &PlainSphere, y: &PlainSphere, k: usize, map: &mut [usize], used: &mut [bool]) -> bool {
        let n = map.len();
        if k == n {
            return x.succ.iter().all(|&(u, v)| y.succ.contains(&(map[u], map[v])))
                && x.matches.iter().all(|&(u, v, s)| y.matches.contains(&(map[u], map[v], s)));
        }
        if k == x.center {
            return extend(x, y, k + 1, map, used);
        }
        for t in 0..n {
            if used[t] || x.labels[k] != y.labels[t] {
                continue;
            }
            map[k] = t;
            used[t] = true;
            if extend(x, y, k + 1, map, used) {
                return true;
            }
            used[t] = false;
        }
        map[k] = usize::MAX;
        false
    }
    extend(x, y, 0, &mut map, &mut used)
}

/// Positions of `w` whose `r`-sphere is isomorphic to `target`.
pub fn count_by_brute_force(al: &CallReturnAlphabet, w: &[SymbolId], target: &PlainSphere, r: usize) -> usize {
    (0..w.len())
        .filter(|&i| brute_isomorphic(&plain_sphere(al, w, i, r), target))
        .count()
}

// ---------------------------------------------------------------- logic

#[derive(Clone, Debug)]
enum Value {
    Pos(usize),
    Set(Vec<bool>),
}

/// A second evaluator: walks the syntax tree directly with a name-keyed
/// environment, scans quantifier domains from the last position down and
/// evaluates binary connectives right operand first. `None` on unbound
/// variables, unknown labels or unsupported relations.
pub fn reference_eval(word: &NestedWord, f: &Formula) -> Option<bool> {
    let matching = all_pairs_matching(word.alphabet(), word.labels());
    ev(word, &matching, f, &mut HashMap::new())
}

fn ev(
    w: &NestedWord,
    matching: &BTreeSet<(usize, usize, usize)>,
    f: &Formula,
    env: &mut HashMap<String, Value>,
) -> Option<bool> {
    let pos = |env: &HashMap<String, Value>, x: &str| match env.get(x)? {
        Value::Pos(p) => Some(*p),
        Value::Set(_) => None,
    };
    Some(match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Label(x, a) => w.alphabet().name(w.label(pos(env, x)?)) == a && w.alphabet().lookup(a).is_ok(),
        Formula::Rel(rel, x, y) => {
            let (i, j) = (pos(env, x)?, pos(env, y)?);
            match rel {
                Relation::Succ => j == i + 1,
                Relation::Match => matching.iter().any(|&(c, r, _)| (c, r) == (i, j)),
                _ => return None,
            }
        }
        Formula::Eq(x, y) => pos(env, x)? == pos(env, y)?,
        Formula::In(x, set) => match env.get(set)? {
            Value::Set(s) => s[pos(env, x)?],
            Value::Pos(_) => return None,
        },
        Formula::Not(g) => !ev(w, matching, g, env)?,
        Formula::Or(a, b) => {
            let rb = ev(w, matching, b, env)?;
            let ra = ev(w, matching, a, env)?;
            ra || rb
        }
        Formula::And(a, b) => {
            let rb = ev(w, matching, b, env)?;
            let ra = ev(w, matching, a, env)?;
            ra && rb
        }
        Formula::Implies(a, b) => {
            let rb = ev(w, matching, b, env)?;
            let ra = ev(w, matching, a, env)?;
            !ra || rb
        }
        Formula::Exists(x, g) | Formula::Forall(x, g) => {
            let existential = matches!(f, Formula::Exists(..));
            let saved = env.remove(x);
            let mut result = !existential;
            for p in (0..w.len()).rev() {
                env.insert(x.clone(), Value::Pos(p));
                let v = ev(w, matching, g, env)?;
                if v == existential {
                    result = existential;
                }
            }
            env.remove(x);
            if let Some(v) = saved {
                env.insert(x.clone(), v);
            }
            result
        }
        Formula::ExistsSet(x, g) | Formula::ForallSet(x, g) => {
            let existential = matches!(f, Formula::ExistsSet(..));
            let saved = env.remove(x);
            let mut result = !existential;
            for mask in (0..1u64 << w.len()).rev() {
                let set = (0..w.len()).map(|p| mask >> p & 1 == 1).collect();
                env.insert(x.clone(), Value::Set(set));
                if ev(w, matching, g, env)? == existential {
                    result = existential;
                }
            }
            env.remove(x);
            if let Some(v) = saved {
                env.insert(x.clone(), v);
            }
            result
        }
    })
}

// ---------------------------------------------------------------- grids

/// The image word of the `n × m` grid, spelled out block by block.
pub fn grid_word(n: usize, m: usize) -> Vec<&'static str> {
    let mut out = vec!["a"; n];
    for col in 2..=m {
        // the column boundary between col-1 and col
        let (close, open) = if col % 2 == 0 { ("a~", "b") } else { ("b~", "a") };
        for _ in 0..n {
            out.push(close);
            out.push(open);
        }
    }
    out.extend(std::iter::repeat(if m % 2 == 1 { "a~" } else { "b~" }).take(n));
    out
}

/// Decodes a word as a grid image: `n` is the length of the leading run of
/// `a`, `m` follows from the length, and the word must spell that image.
pub fn decode_grid(al: &CallReturnAlphabet, w: &[SymbolId]) -> Option<(usize, usize)> {
    let names: Vec<&str> = w.iter().map(|&a| al.name(a)).collect();
    let n = names.iter().take_while(|&&s| s == "a").count();
    if n == 0 || names.len() % (2 * n) != 0 {
        return None;
    }
    let m = names.len() / (2 * n);
    (grid_word(n, m) == names).then_some((n, m))
}

// ---------------------------------------------------------------- circularity

/// Move encoding for the reference tracer: `(kind, stack)` with kinds
/// 0 fwd, 1 bwd, 2 jump, 3 back.
pub fn parse_moves(text: &str) -> Vec<(u8, usize)> {
    text.split_whitespace()
        .map(|t| match t {
            "fwd" => (0, 0),
            "bwd" => (1, 0),
            _ if t.starts_with("jump") => (2, t[4..].parse::<usize>().unwrap() - 1),
            _ if t.starts_with("back") => (3, t[4..].parse::<usize>().unwrap() - 1),
            _ => panic!("unknown move {t}"),
        })
        .collect()
}

/// Whether `moves` traces a simple cycle from `start` on a word of length
/// `len` with the given matching.
pub fn closes_on(len: usize, matching: &BTreeSet<(usize, usize, usize)>, moves: &[(u8, usize)], start: usize) -> bool {
    let mut seen = vec![start];
    let mut cur = start;
    for (step, &(kind, s)) in moves.iter().enumerate() {
        let next = match kind {
            0 => (cur + 1 < len).then_some(cur + 1),
            1 => cur.checked_sub(1),
            2 => matching.iter().find(|&&(c, _, t)| c == cur && t == s).map(|&(_, r, _)| r),
            _ => matching.iter().find(|&&(_, r, t)| r == cur && t == s).map(|&(c, _, _)| c),
        };
        let Some(next) = next else { return false };
        if step + 1 == moves.len() {
            return next == start;
        }
        if seen.contains(&next) {
            return false;
        }
        seen.push(next);
        cur = next;
    }
    false
}

pub fn closes_simple_cycle(al: &CallReturnAlphabet, w: &[SymbolId], moves: &[(u8, usize)], start: usize) -> bool {
    closes_on(w.len(), &all_pairs_matching(al, w), moves, start)
}

/// For each move string, whether some word of length at most `max_len`
/// and some start close a simple cycle.
pub fn circular_by_brute_force(al: &Arc<CallReturnAlphabet>, strings: &[Vec<(u8, usize)>], max_len: usize) -> Vec<bool> {
    let mut found = vec![false; strings.len()];
    for w in twostack::corpus::corpus(al, max_len) {
        let matching = all_pairs_matching(al, &w);
        for (k, moves) in strings.iter().enumerate() {
            if !found[k] && (0..w.len()).any(|i| closes_on(w.len(), &matching, moves, i)) {
                found[k] = true;
            }
        }
    }
    found
}
