use std::collections::HashSet;
use std::sync::Arc;

use super::AutomatonError;
use crate::alphabet::{CallReturnAlphabet, SymbolClass, SymbolId};

/// A multi-stack visibly pushdown automaton.
///
/// Stack symbol 0 is the bottom marker; it is never stored in a
/// configuration, an empty stack stands for it.
#[derive(Clone, Debug)]
pub struct Mvpa {
    alphabet: Arc<CallReturnAlphabet>,
    states: Vec<String>,
    initial: Vec<usize>,
    finals: Vec<bool>,
    gamma: Vec<String>,
    push: Vec<(usize, SymbolId, usize, usize)>,
    pop: Vec<(usize, SymbolId, usize, usize)>,
    internal: Vec<(usize, SymbolId, usize)>,
    // (stack symbol, target) or target, indexed by state * |Σ| + symbol
    push_by: Vec<Vec<(usize, usize)>>,
    pop_by: Vec<Vec<(usize, usize)>>,
    int_by: Vec<Vec<usize>>,
}

/// One configuration: control state plus stack contents (top last, bottom implicit).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Config {
    pub state: usize,
    pub stacks: Vec<Vec<usize>>,
}

/// The set of configurations reachable after some prefix.
#[derive(Clone, Debug, Default)]
pub struct Frontier {
    configs: Vec<Config>,
    steps: usize,
}

impl Frontier {
    pub fn configs(&self) -> &[Config] {
        &self.configs
    }

    pub fn is_dead(&self) -> bool {
        self.configs.is_empty()
    }

    /// Number of symbols read so far.
    pub fn steps(&self) -> usize {
        self.steps
    }
}

impl Mvpa {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alphabet: Arc<CallReturnAlphabet>,
        states: Vec<String>,
        initial: Vec<usize>,
        finals: Vec<usize>,
        gamma: Vec<String>,
        push: Vec<(usize, SymbolId, usize, usize)>,
        pop: Vec<(usize, SymbolId, usize, usize)>,
        internal: Vec<(usize, SymbolId, usize)>,
    ) -> Result<Self, AutomatonError> {
        super::index_names(&states)?;
        let n = states.len();
        let k = alphabet.len();
        let state_ok = |q: usize| {
            if q < n {
                Ok(())
            } else {
                Err(AutomatonError::UnknownState(format!("#{q}")))
            }
        };
        let gamma_ok = |g: usize| {
            if g < gamma.len() {
                Ok(())
            } else {
                Err(AutomatonError::UnknownStackSymbol(format!("#{g}")))
            }
        };
        let class_ok = |a: SymbolId, want: fn(SymbolClass) -> bool, table: &'static str| {
            if a.index() < k && want(alphabet.class(a)) {
                Ok(())
            } else {
                Err(AutomatonError::ClassMismatch {
                    symbol: if a.index() < k { alphabet.name(a).to_string() } else { format!("#{}", a.0) },
                    table,
                })
            }
        };
        for &q in initial.iter().chain(&finals) {
            state_ok(q)?;
        }
        let mut push_by = vec![Vec::new(); n * k];
        let mut pop_by = vec![Vec::new(); n * k];
        let mut int_by = vec![Vec::new(); n * k];
        let mut push = push;
        let mut pop = pop;
        let mut internal = internal;
        for v in [&mut push, &mut pop] {
            v.sort();
            v.dedup();
        }
        internal.sort();
        internal.dedup();
        for &(q, a, g, q2) in &push {
            state_ok(q)?;
            state_ok(q2)?;
            gamma_ok(g)?;
            class_ok(a, SymbolClass::is_call, "call")?;
            if g == 0 {
                return Err(AutomatonError::PushesBottom);
            }
            push_by[q * k + a.index()].push((g, q2));
        }
        for &(q, a, g, q2) in &pop {
            state_ok(q)?;
            state_ok(q2)?;
            gamma_ok(g)?;
            class_ok(a, SymbolClass::is_return, "return")?;
            pop_by[q * k + a.index()].push((g, q2));
        }
        for &(q, a, q2) in &internal {
            state_ok(q)?;
            state_ok(q2)?;
            class_ok(a, |c| c == SymbolClass::Internal, "internal")?;
            int_by[q * k + a.index()].push(q2);
        }
        let mut initial = initial;
        initial.sort();
        initial.dedup();
        let mut is_final = vec![false; n];
        for q in finals {
            is_final[q] = true;
        }
        Ok(Mvpa {
            alphabet,
            states,
            initial,
            finals: is_final,
            gamma,
            push,
            pop,
            internal,
            push_by,
            pop_by,
            int_by,
        })
    }

    pub fn alphabet(&self) -> &Arc<CallReturnAlphabet> {
        &self.alphabet
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn finals(&self) -> Vec<usize> {
        (0..self.states.len()).filter(|&q| self.finals[q]).collect()
    }

    /// Stack alphabet; index 0 is the bottom marker.
    pub fn gamma(&self) -> &[String] {
        &self.gamma
    }

    pub fn push_transitions(&self) -> &[(usize, SymbolId, usize, usize)] {
        &self.push
    }

    pub fn pop_transitions(&self) -> &[(usize, SymbolId, usize, usize)] {
        &self.pop
    }

    pub fn internal_transitions(&self) -> &[(usize, SymbolId, usize)] {
        &self.internal
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn start(&self) -> Frontier {
        let k = self.alphabet.stack_count();
        Frontier {
            configs: self
                .initial
                .iter()
                .map(|&q| Config {
                    state: q,
                    stacks: vec![Vec::new(); k],
                })
                .collect(),
            steps: 0,
        }
    }

    /// Reads one symbol from every configuration of the frontier.
    pub fn step(&self, frontier: &Frontier, a: SymbolId) -> Frontier {
        let k = self.alphabet.len();
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        let mut emit = |c: Config| {
            if seen.insert(c.clone()) {
                next.push(c);
            }
        };
        for c in &frontier.configs {
            let slot = c.state * k + a.index();
            match self.alphabet.class(a) {
                SymbolClass::Call(s) => {
                    for &(g, q2) in &self.push_by[slot] {
                        let mut stacks = c.stacks.clone();
                        stacks[s].push(g);
                        emit(Config { state: q2, stacks });
                    }
                }
                SymbolClass::Return(s) => {
                    let top = c.stacks[s].last().copied().unwrap_or(0);
                    for &(g, q2) in &self.pop_by[slot] {
                        if g == top {
                            let mut stacks = c.stacks.clone();
                            stacks[s].pop();
                            emit(Config { state: q2, stacks });
                        }
                    }
                }
                SymbolClass::Internal => {
                    for &q2 in &self.int_by[slot] {
                        emit(Config {
                            state: q2,
                            stacks: c.stacks.clone(),
                        });
                    }
                }
            }
        }
        Frontier {
            configs: next,
            steps: frontier.steps + 1,
        }
    }

    /// True when some configuration is in a final state after a non-empty prefix.
    pub fn is_accepting(&self, frontier: &Frontier) -> bool {
        frontier.steps > 0 && frontier.configs.iter().any(|c| self.finals[c.state])
    }

    pub fn accepts_symbols(&self, word: &[SymbolId]) -> bool {
        let mut f = self.start();
        for &a in word {
            f = self.step(&f, a);
            if f.is_dead() {
                return false;
            }
        }
        self.is_accepting(&f)
    }

    /// Membership of a whitespace-separated word.
    pub fn accepts_str(&self, text: &str) -> Result<bool, AutomatonError> {
        let word = self.alphabet.parse_symbols(text)?;
        if word.is_empty() {
            return Err(crate::nested::WordError::EmptyWord.into());
        }
        Ok(self.accepts_symbols(&word))
    }
}

#[cfg(test)]
mod tests {
    use crate::fixtures;

    #[test]
    fn example_mvpa_words() {
        let a = fixtures::example_mvpa();
        assert!(a.accepts_str("a b a~ a~ b~ b~").unwrap());
        assert!(!a.accepts_str("a b a~ b~").unwrap());
        assert!(a.accepts_str("a b a~ a~ b~ b~ a b a~ a~ b~ b~").unwrap());
        assert!(a.accepts_str("a b a b a~ a~ a~ b~ b~ b~").unwrap());
        assert!(a.accepts_str("").is_err());
    }

    #[test]
    fn stack_heights_agree_across_frontier() {
        let a = fixtures::example_mvpa();
        let al = a.alphabet().clone();
        let w = al.parse_symbols("a b a b a~ a~ a~ b~ b~ b~").unwrap();
        let mut f = a.start();
        for &s in &w {
            f = a.step(&f, s);
            let heights: Vec<Vec<usize>> =
                f.configs().iter().map(|c| c.stacks.iter().map(Vec::len).collect()).collect();
            assert!(heights.windows(2).all(|p| p[0] == p[1]));
        }
    }
}
