//! Nested words over multi-stack call-return alphabets, their automata, and
//! the locality machinery (spheres, sphere automata, Hanf-style counting)
//! built on top of them.

pub mod alphabet;
pub mod automata;
pub mod circularity;
pub mod corpus;
pub mod fixtures;
pub mod grids;
pub mod logic;
pub mod nested;
pub mod sphere_automaton;
pub mod spheres;

pub use alphabet::{CallReturnAlphabet, SymbolClass, SymbolId};
pub use nested::NestedWord;
