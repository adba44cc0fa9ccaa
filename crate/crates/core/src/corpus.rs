//! Length-lexicographic enumeration of all words up to a bound.

use std::sync::Arc;

use crate::alphabet::{CallReturnAlphabet, SymbolId};

/// All words of exactly `len` symbols, in lexicographic order of the
/// alphabet's symbol order.
pub fn words_of_length(alphabet: &Arc<CallReturnAlphabet>, len: usize) -> Vec<Vec<SymbolId>> {
    let symbols: Vec<SymbolId> = alphabet.symbols().collect();
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                symbols.iter().map(move |&a| {
                    let mut v = w.clone();
                    v.push(a);
                    v
                })
            })
            .collect();
    }
    out
}

/// All non-empty words of length at most `max_len`, shortest first.
pub fn corpus(alphabet: &Arc<CallReturnAlphabet>, max_len: usize) -> impl Iterator<Item = Vec<SymbolId>> + '_ {
    (1..=max_len).flat_map(move |len| words_of_length(alphabet, len))
}

/// Depth-first walk over the trie of words up to `max_len`, threading a
/// per-prefix state so that work on shared prefixes is done once. `visit` is
/// called for every non-empty word with the state reached after it; it
/// returns `None` to prune the subtree.
pub fn walk_prefixes<S, F>(alphabet: &CallReturnAlphabet, max_len: usize, root: S, visit: &mut F)
where
    F: FnMut(&[SymbolId], &S, SymbolId) -> Option<S>,
{
    let symbols: Vec<SymbolId> = alphabet.symbols().collect();
    let mut prefix = Vec::with_capacity(max_len);
    fn go<S, F>(symbols: &[SymbolId], max_len: usize, prefix: &mut Vec<SymbolId>, state: &S, visit: &mut F)
    where
        F: FnMut(&[SymbolId], &S, SymbolId) -> Option<S>,
    {
        if prefix.len() == max_len {
            return;
        }
        for &a in symbols {
            if let Some(next) = visit(prefix, state, a) {
                prefix.push(a);
                go(symbols, max_len, prefix, &next, visit);
                prefix.pop();
            }
        }
    }
    go(&symbols, max_len, &mut prefix, &root, visit);
}
