//! Marking every symbol with a subset of `{1..m}` (one bit per existentially
//! quantified set) and erasing the marks again.

use std::sync::Arc;

use super::LogicError;
use crate::alphabet::{AlphabetSpec, CallReturnAlphabet, StackSpec, SymbolId};
use crate::automata::Mnwa;

fn mark_name(base: &str, mask: usize, m: usize) -> String {
    let members: Vec<String> = (0..m).filter(|k| mask >> k & 1 == 1).map(|k| (k + 1).to_string()).collect();
    format!("{base}@{{{}}}", members.join(","))
}

/// Each symbol `a` becomes `a@{M}` for every `M ⊆ {1..m}`, keeping its class.
/// Variants of one symbol are listed by the bit mask of `M`.
pub fn expand_alphabet(alphabet: &CallReturnAlphabet, m: usize) -> CallReturnAlphabet {
    let expand = |xs: &[String]| -> Vec<String> {
        xs.iter()
            .flat_map(|a| (0..1usize << m).map(move |mask| mark_name(a, mask, m)))
            .collect()
    };
    let spec = alphabet.spec();
    CallReturnAlphabet::new(AlphabetSpec {
        stacks: spec
            .stacks
            .iter()
            .map(|s| StackSpec {
                calls: expand(&s.calls),
                returns: expand(&s.returns),
            })
            .collect(),
        internal: expand(&spec.internal),
    })
    .expect("expansion of a valid alphabet is valid")
}

fn erase(name: &str) -> Option<&str> {
    let at = name.rfind("@{")?;
    name.ends_with('}').then_some(&name[..at])
}

/// Recovers the base alphabet of an `m`-expansion.
fn base_alphabet(expanded: &CallReturnAlphabet, m: usize) -> Result<CallReturnAlphabet, LogicError> {
    let not_expanded = |why: String| LogicError::NotAnExpandedAlphabet(why);
    let bases = |xs: &[String]| -> Result<Vec<String>, LogicError> {
        let mut out: Vec<String> = Vec::new();
        for x in xs {
            let b = erase(x).ok_or_else(|| not_expanded(format!("symbol `{x}` carries no mark")))?;
            if out.last().map(String::as_str) != Some(b) {
                out.push(b.to_string());
            }
        }
        Ok(out)
    };
    let spec = expanded.spec();
    let base = CallReturnAlphabet::new(AlphabetSpec {
        stacks: spec
            .stacks
            .iter()
            .map(|s| {
                Ok(StackSpec {
                    calls: bases(&s.calls)?,
                    returns: bases(&s.returns)?,
                })
            })
            .collect::<Result<_, LogicError>>()?,
        internal: bases(&spec.internal)?,
    })
    .map_err(|e| not_expanded(e.to_string()))?;
    if expand_alphabet(&base, m) != *expanded {
        return Err(not_expanded(format!("symbols do not form a {m}-fold marking")));
    }
    Ok(base)
}

/// Erases the marks from every transition of `b`, so the result guesses a
/// marking nondeterministically.
pub fn project(b: &Mnwa, m: usize) -> Result<Mnwa, LogicError> {
    let base = Arc::new(base_alphabet(b.alphabet(), m)?);
    let width = 1usize << m;
    let strip = |a: SymbolId| SymbolId((a.index() / width) as u16);
    let delta1 = b.delta1().iter().map(|&(q, a, q2)| (q, strip(a), q2)).collect();
    let delta2 = b.delta2().iter().map(|&(p, q, a, q2)| (p, q, strip(a), q2)).collect();
    Ok(Mnwa::new(
        base,
        b.states().to_vec(),
        b.initial().to_vec(),
        b.finals(),
        b.calling(),
        delta1,
        delta2,
    )?)
}
