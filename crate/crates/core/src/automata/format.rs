//! JSON automaton files.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{index_names, AutomatonError, Mnwa, Mvpa};
use crate::alphabet::{AlphabetSpec, CallReturnAlphabet, SymbolId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MvpaSpec {
    pub alphabet: AlphabetSpec,
    pub states: Vec<String>,
    pub initial: Vec<String>,
    #[serde(rename = "final")]
    pub finals: Vec<String>,
    /// Stack symbols other than the bottom; listing the bottom here too is tolerated.
    pub gamma: Vec<String>,
    pub bottom: String,
    #[serde(default)]
    pub delta_c: Vec<[String; 4]>,
    #[serde(default)]
    pub delta_r: Vec<[String; 4]>,
    #[serde(default)]
    pub delta_int: Vec<[String; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MnwaSpec {
    pub alphabet: AlphabetSpec,
    pub states: Vec<String>,
    pub initial: Vec<String>,
    #[serde(rename = "final")]
    pub finals: Vec<String>,
    #[serde(default)]
    pub calling: Vec<String>,
    #[serde(default)]
    pub delta_1: Vec<[String; 3]>,
    #[serde(default)]
    pub delta_2: Vec<[String; 4]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AutomatonFile {
    Mvpa(MvpaSpec),
    Mnwa(MnwaSpec),
}

impl AutomatonFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("automaton serializes")
    }
}

struct Names<'a> {
    states: std::collections::HashMap<&'a str, usize>,
    alphabet: &'a CallReturnAlphabet,
}

impl Names<'_> {
    fn state(&self, s: &str) -> Result<usize, AutomatonError> {
        self.states.get(s).copied().ok_or_else(|| AutomatonError::UnknownState(s.to_string()))
    }

    fn states(&self, xs: &[String]) -> Result<Vec<usize>, AutomatonError> {
        xs.iter().map(|s| self.state(s)).collect()
    }

    fn symbol(&self, s: &str) -> Result<SymbolId, AutomatonError> {
        Ok(self.alphabet.lookup(s)?)
    }
}

impl MvpaSpec {
    pub fn build(&self) -> Result<Mvpa, AutomatonError> {
        let alphabet = Arc::new(CallReturnAlphabet::new(self.alphabet.clone())?);
        let names = Names {
            states: index_names(&self.states)?,
            alphabet: &alphabet,
        };
        let mut gamma = vec![self.bottom.clone()];
        gamma.extend(self.gamma.iter().filter(|g| **g != self.bottom).cloned());
        let stack = |g: &str| {
            gamma
                .iter()
                .position(|x| x == g)
                .ok_or_else(|| AutomatonError::UnknownStackSymbol(g.to_string()))
        };
        let quad = |rows: &[[String; 4]]| -> Result<Vec<_>, AutomatonError> {
            rows.iter()
                .map(|[q, a, g, q2]| Ok((names.state(q)?, names.symbol(a)?, stack(g)?, names.state(q2)?)))
                .collect()
        };
        let push = quad(&self.delta_c)?;
        let pop = quad(&self.delta_r)?;
        let internal = self
            .delta_int
            .iter()
            .map(|[q, a, q2]| Ok((names.state(q)?, names.symbol(a)?, names.state(q2)?)))
            .collect::<Result<Vec<_>, AutomatonError>>()?;
        Mvpa::new(
            alphabet.clone(),
            self.states.clone(),
            names.states(&self.initial)?,
            names.states(&self.finals)?,
            gamma.clone(),
            push,
            pop,
            internal,
        )
    }

    pub fn from_mvpa(a: &Mvpa) -> Self {
        let al = a.alphabet();
        let st = |q: usize| a.states()[q].clone();
        let g = |x: usize| a.gamma()[x].clone();
        MvpaSpec {
            alphabet: al.spec().clone(),
            states: a.states().to_vec(),
            initial: a.initial().iter().map(|&q| st(q)).collect(),
            finals: a.finals().into_iter().map(st).collect(),
            gamma: a.gamma()[1..].to_vec(),
            bottom: g(0),
            delta_c: a
                .push_transitions()
                .iter()
                .map(|&(q, s, x, q2)| [st(q), al.name(s).to_string(), g(x), st(q2)])
                .collect(),
            delta_r: a
                .pop_transitions()
                .iter()
                .map(|&(q, s, x, q2)| [st(q), al.name(s).to_string(), g(x), st(q2)])
                .collect(),
            delta_int: a
                .internal_transitions()
                .iter()
                .map(|&(q, s, q2)| [st(q), al.name(s).to_string(), st(q2)])
                .collect(),
        }
    }
}

impl MnwaSpec {
    pub fn build(&self) -> Result<Mnwa, AutomatonError> {
        let alphabet = Arc::new(CallReturnAlphabet::new(self.alphabet.clone())?);
        let names = Names {
            states: index_names(&self.states)?,
            alphabet: &alphabet,
        };
        let d1 = self
            .delta_1
            .iter()
            .map(|[q, a, q2]| Ok((names.state(q)?, names.symbol(a)?, names.state(q2)?)))
            .collect::<Result<Vec<_>, AutomatonError>>()?;
        let d2 = self
            .delta_2
            .iter()
            .map(|[p, q, a, q2]| Ok((names.state(p)?, names.state(q)?, names.symbol(a)?, names.state(q2)?)))
            .collect::<Result<Vec<_>, AutomatonError>>()?;
        Mnwa::new(
            alphabet.clone(),
            self.states.clone(),
            names.states(&self.initial)?,
            names.states(&self.finals)?,
            names.states(&self.calling)?,
            d1,
            d2,
        )
    }

    pub fn from_mnwa(b: &Mnwa) -> Self {
        let al = b.alphabet();
        let st = |q: usize| b.states()[q].clone();
        MnwaSpec {
            alphabet: al.spec().clone(),
            states: b.states().to_vec(),
            initial: b.initial().iter().map(|&q| st(q)).collect(),
            finals: b.finals().into_iter().map(st).collect(),
            calling: b.calling().into_iter().map(st).collect(),
            delta_1: b
                .delta1()
                .iter()
                .map(|&(q, a, q2)| [st(q), al.name(a).to_string(), st(q2)])
                .collect(),
            delta_2: b
                .delta2()
                .iter()
                .map(|&(p, q, a, q2)| [st(p), st(q), al.name(a).to_string(), st(q2)])
                .collect(),
        }
    }
}
