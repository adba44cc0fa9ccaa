//! Call-return alphabets: per-stack call and return symbols plus internal symbols.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a symbol inside its alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub u16);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Stacks are numbered from 0 internally and printed 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolClass {
    Call(usize),
    Return(usize),
    Internal,
}

impl SymbolClass {
    pub fn is_call(self) -> bool {
        matches!(self, SymbolClass::Call(_))
    }

    pub fn is_return(self) -> bool {
        matches!(self, SymbolClass::Return(_))
    }

    pub fn stack(self) -> Option<usize> {
        match self {
            SymbolClass::Call(s) | SymbolClass::Return(s) => Some(s),
            SymbolClass::Internal => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("symbol `{0}` occurs more than once in the alphabet")]
    DuplicateSymbol(String),
    #[error("alphabet has no stacks")]
    EmptyAlphabet,
    #[error("symbol `{0:?}` is empty or contains whitespace")]
    InvalidSymbol(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("too many symbols")]
    TooManySymbols,
}

/// On-disk description, `{"stacks":[{"calls":[..],"returns":[..]}],"internal":[..]}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphabetSpec {
    pub stacks: Vec<StackSpec>,
    #[serde(default)]
    pub internal: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StackSpec {
    pub calls: Vec<String>,
    pub returns: Vec<String>,
}

/// A validated call-return alphabet.
///
/// Symbols are ordered stack by stack (calls, then returns) followed by the
/// internal symbols; this order drives the length-lexicographic corpus.
#[derive(Clone, Debug)]
pub struct CallReturnAlphabet {
    spec: AlphabetSpec,
    names: Vec<String>,
    classes: Vec<SymbolClass>,
    index: HashMap<String, SymbolId>,
}

impl PartialEq for CallReturnAlphabet {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.classes == other.classes
    }
}

impl Eq for CallReturnAlphabet {}

impl CallReturnAlphabet {
    pub fn new(spec: AlphabetSpec) -> Result<Self, AlphabetError> {
        if spec.stacks.is_empty() {
            return Err(AlphabetError::EmptyAlphabet);
        }
        let mut names = Vec::new();
        let mut classes = Vec::new();
        for (s, stack) in spec.stacks.iter().enumerate() {
            for c in &stack.calls {
                names.push(c.clone());
                classes.push(SymbolClass::Call(s));
            }
            for r in &stack.returns {
                names.push(r.clone());
                classes.push(SymbolClass::Return(s));
            }
        }
        for c in &spec.internal {
            names.push(c.clone());
            classes.push(SymbolClass::Internal);
        }
        if names.len() > u16::MAX as usize {
            return Err(AlphabetError::TooManySymbols);
        }
        let mut index = HashMap::new();
        for (k, name) in names.iter().enumerate() {
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return Err(AlphabetError::InvalidSymbol(name.clone()));
            }
            if index.insert(name.clone(), SymbolId(k as u16)).is_some() {
                return Err(AlphabetError::DuplicateSymbol(name.clone()));
            }
        }
        Ok(CallReturnAlphabet {
            spec,
            names,
            classes,
            index,
        })
    }

    /// Builds an alphabet from string slices: `stacks` holds `(calls, returns)` per stack.
    pub fn from_parts(stacks: &[(&[&str], &[&str])], internal: &[&str]) -> Result<Self, AlphabetError> {
        let to_vec = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        Self::new(AlphabetSpec {
            stacks: stacks
                .iter()
                .map(|(c, r)| StackSpec {
                    calls: to_vec(c),
                    returns: to_vec(r),
                })
                .collect(),
            internal: to_vec(internal),
        })
    }

    /// The running two-stack alphabet: `a`/`a~` on stack 1 and `b`/`b~` on stack 2.
    pub fn two_stack() -> Self {
        Self::from_parts(&[(&["a"], &["a~"]), (&["b"], &["b~"])], &[]).expect("valid alphabet")
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let spec: AlphabetSpec = serde_json::from_str(text).map_err(|e| e.to_string())?;
        Self::new(spec).map_err(|e| e.to_string())
    }

    pub fn spec(&self) -> &AlphabetSpec {
        &self.spec
    }

    pub fn stack_count(&self) -> usize {
        self.spec.stacks.len()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = SymbolId> + '_ {
        (0..self.names.len()).map(|k| SymbolId(k as u16))
    }

    pub fn class(&self, a: SymbolId) -> SymbolClass {
        self.classes[a.index()]
    }

    pub fn name(&self, a: SymbolId) -> &str {
        &self.names[a.index()]
    }

    pub fn lookup(&self, name: &str) -> Result<SymbolId, AlphabetError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| AlphabetError::UnknownSymbol(name.to_string()))
    }

    pub fn calls(&self) -> impl Iterator<Item = SymbolId> + '_ {
        self.symbols().filter(|&a| self.class(a).is_call())
    }

    pub fn returns(&self) -> impl Iterator<Item = SymbolId> + '_ {
        self.symbols().filter(|&a| self.class(a).is_return())
    }

    /// Parses a whitespace-separated token list.
    pub fn parse_symbols(&self, text: &str) -> Result<Vec<SymbolId>, AlphabetError> {
        text.split_whitespace().map(|t| self.lookup(t)).collect()
    }

    pub fn render(&self, word: &[SymbolId]) -> String {
        word.iter().map(|&a| self.name(a)).collect::<Vec<_>>().join(" ")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.spec).expect("alphabet serializes")
    }
}

impl fmt::Display for CallReturnAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (s, stack) in self.spec.stacks.iter().enumerate() {
            write!(f, "stack {}: calls {:?} returns {:?}; ", s + 1, stack.calls, stack.returns)?;
        }
        write!(f, "internal {:?}", self.spec.internal)
    }
}
