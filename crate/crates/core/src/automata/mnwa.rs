use std::sync::{Arc, OnceLock};

use super::{construct, AutomatonError, Mvpa};
use crate::alphabet::{CallReturnAlphabet, SymbolClass, SymbolId};
use crate::nested::NestedWord;

/// A (generalized) multi-stack nested-word automaton. With no calling states
/// it is a plain MNWA.
#[derive(Clone, Debug)]
pub struct Mnwa {
    alphabet: Arc<CallReturnAlphabet>,
    states: Vec<String>,
    initial: Vec<usize>,
    finals: Vec<bool>,
    calling: Vec<bool>,
    delta1: Vec<(usize, SymbolId, usize)>,
    delta2: Vec<(usize, usize, SymbolId, usize)>,
    simulator: OnceLock<Arc<Mvpa>>,
}

impl Mnwa {
    pub fn new(
        alphabet: Arc<CallReturnAlphabet>,
        states: Vec<String>,
        initial: Vec<usize>,
        finals: Vec<usize>,
        calling: Vec<usize>,
        delta1: Vec<(usize, SymbolId, usize)>,
        delta2: Vec<(usize, usize, SymbolId, usize)>,
    ) -> Result<Self, AutomatonError> {
        super::index_names(&states)?;
        let n = states.len();
        let check = |q: usize| {
            if q < n {
                Ok(())
            } else {
                Err(AutomatonError::UnknownState(format!("#{q}")))
            }
        };
        let known = |a: SymbolId| {
            if a.index() < alphabet.len() {
                Ok(())
            } else {
                Err(AutomatonError::ClassMismatch {
                    symbol: format!("#{}", a.0),
                    table: "delta_1",
                })
            }
        };
        for &q in initial.iter().chain(&finals).chain(&calling) {
            check(q)?;
        }
        for &(q, a, q2) in &delta1 {
            check(q)?;
            check(q2)?;
            known(a)?;
        }
        for &(p, q, a, q2) in &delta2 {
            check(p)?;
            check(q)?;
            check(q2)?;
            known(a)?;
            if !alphabet.class(a).is_return() {
                return Err(AutomatonError::ClassMismatch {
                    symbol: alphabet.name(a).to_string(),
                    table: "delta_2",
                });
            }
        }
        let flags = |xs: Vec<usize>| {
            let mut v = vec![false; n];
            for q in xs {
                v[q] = true;
            }
            v
        };
        let mut initial = initial;
        initial.sort();
        initial.dedup();
        let mut delta1 = delta1;
        delta1.sort();
        delta1.dedup();
        let mut delta2 = delta2;
        delta2.sort();
        delta2.dedup();
        Ok(Mnwa {
            alphabet,
            states,
            initial,
            finals: flags(finals),
            calling: flags(calling),
            delta1,
            delta2,
            simulator: OnceLock::new(),
        })
    }

    pub fn alphabet(&self) -> &Arc<CallReturnAlphabet> {
        &self.alphabet
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn is_calling(&self, q: usize) -> bool {
        self.calling[q]
    }

    pub fn finals(&self) -> Vec<usize> {
        (0..self.states.len()).filter(|&q| self.finals[q]).collect()
    }

    pub fn calling(&self) -> Vec<usize> {
        (0..self.states.len()).filter(|&q| self.calling[q]).collect()
    }

    pub fn is_generalized(&self) -> bool {
        self.calling.iter().any(|&c| c)
    }

    pub fn delta1(&self) -> &[(usize, SymbolId, usize)] {
        &self.delta1
    }

    pub fn delta2(&self) -> &[(usize, usize, SymbolId, usize)] {
        &self.delta2
    }

    pub fn has_delta1(&self, q: usize, a: SymbolId, q2: usize) -> bool {
        self.delta1.binary_search(&(q, a, q2)).is_ok()
    }

    pub fn has_delta2(&self, p: usize, q: usize, a: SymbolId, q2: usize) -> bool {
        self.delta2.binary_search(&(p, q, a, q2)).is_ok()
    }

    /// Checks that `run` (state indices, one per position) is an accepting run.
    pub fn run_check(&self, word: &NestedWord, run: &[usize]) -> Result<bool, AutomatonError> {
        if run.len() != word.len() {
            return Err(AutomatonError::LengthMismatch {
                run: run.len(),
                word: word.len(),
            });
        }
        if run.iter().any(|&q| q >= self.states.len()) {
            return Ok(false);
        }
        for i in 0..word.len() {
            let a = word.label(i);
            let ok = if i == 0 {
                self.initial.iter().any(|&q0| self.has_delta1(q0, a, run[0]))
            } else if let Some(c) = word.call_of(i) {
                self.has_delta2(run[c], run[i - 1], a, run[i])
            } else {
                self.has_delta1(run[i - 1], a, run[i])
            };
            if !ok {
                return Ok(false);
            }
            if self.calling[run[i]] && word.return_of(i).is_none() {
                return Ok(false);
            }
        }
        Ok(self.finals[run[word.len() - 1]])
    }

    /// The MVPA used to decide membership: degeneralized if needed, then
    /// converted. Built once and cached.
    pub fn simulator(&self) -> &Arc<Mvpa> {
        self.simulator.get_or_init(|| {
            let plain = if self.is_generalized() {
                construct::degeneralize(self)
            } else {
                self.clone()
            };
            Arc::new(construct::mnwa_to_mvpa(&plain).expect("no calling states after degeneralization"))
        })
    }

    pub fn accepts(&self, word: &NestedWord) -> Result<bool, AutomatonError> {
        if **word.alphabet() != *self.alphabet {
            return Err(AutomatonError::AlphabetMismatch);
        }
        Ok(self.simulator().accepts_symbols(word.labels()))
    }

    pub(crate) fn class(&self, a: SymbolId) -> SymbolClass {
        self.alphabet.class(a)
    }
}
