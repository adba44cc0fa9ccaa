//! Multi-stack visibly pushdown automata (MVPA), nested-word automata (MNWA,
//! optionally generalized with calling states) and the constructions between
//! them.

mod construct;
mod format;
mod mnwa;
mod mvpa;

pub use construct::{degeneralize, flag_supplement, mnwa_to_mvpa, mvpa_to_mnwa, product, Flags, ProductMode};
pub use format::{AutomatonFile, MnwaSpec, MvpaSpec};
pub use mnwa::Mnwa;
pub use mvpa::{Config, Frontier, Mvpa};

use thiserror::Error;

use crate::alphabet::AlphabetError;
use crate::nested::WordError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("unknown stack symbol `{0}`")]
    UnknownStackSymbol(String),
    #[error("symbol `{symbol}` cannot be used in a {table} transition")]
    ClassMismatch { symbol: String, table: &'static str },
    #[error("call transitions may not push the bottom symbol")]
    PushesBottom,
    #[error("the automaton has calling states; degeneralize it first")]
    CallingStatesPresent,
    #[error("the automata are over different alphabets")]
    AlphabetMismatch,
    #[error("run has length {run} but the word has length {word}")]
    LengthMismatch { run: usize, word: usize },
}

/// Resolves state names to indices, rejecting duplicates.
pub(crate) fn index_names(names: &[String]) -> Result<std::collections::HashMap<&str, usize>, AutomatonError> {
    let mut map = std::collections::HashMap::new();
    for (k, n) in names.iter().enumerate() {
        if map.insert(n.as_str(), k).is_some() {
            return Err(AutomatonError::DuplicateState(n.clone()));
        }
    }
    Ok(map)
}
