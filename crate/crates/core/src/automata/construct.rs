//! Conversions between the two automaton models, removal of calling states,
//! and Boolean products.

use std::sync::Arc;

use super::{AutomatonError, Mnwa, Mvpa};
use crate::alphabet::SymbolClass;
use crate::nested::NestedWord;

/// MVPA to MNWA: the stack symbol written by each step is folded into the
/// state, so a matched return can read it back from the call position.
pub fn mvpa_to_mnwa(a: &Mvpa) -> Mnwa {
    let g = a.gamma().len();
    let id = |q: usize, sym: usize| q * g + sym;
    let states: Vec<String> = a
        .states()
        .iter()
        .flat_map(|q| a.gamma().iter().map(move |s| format!("{q}|{s}")))
        .collect();
    let initial = a.initial().iter().map(|&q| id(q, 0)).collect();
    let finals = a.finals().into_iter().flat_map(|q| (0..g).map(move |s| id(q, s))).collect();
    let mut d1 = Vec::new();
    let mut d2 = Vec::new();
    for q in 0..a.states().len() {
        for top in 0..g {
            let from = id(q, top);
            for &(p, sym, pushed, q2) in a.push_transitions() {
                if p == q {
                    d1.push((from, sym, id(q2, pushed)));
                }
            }
            for &(p, sym, q2) in a.internal_transitions() {
                if p == q {
                    d1.extend((0..g).map(|s2| (from, sym, id(q2, s2))));
                }
            }
            for &(p, sym, popped, q2) in a.pop_transitions() {
                if p == q && popped == 0 {
                    d1.extend((0..g).map(|s2| (from, sym, id(q2, s2))));
                }
            }
        }
    }
    for &(q, sym, popped, q2) in a.pop_transitions() {
        for p in 0..a.states().len() {
            for s in 0..g {
                for s2 in 0..g {
                    d2.push((id(p, popped), id(q, s), sym, id(q2, s2)));
                }
            }
        }
    }
    Mnwa::new(a.alphabet().clone(), states, initial, finals, Vec::new(), d1, d2).expect("construction is well-typed")
}

/// MNWA (without calling states) to MVPA: every call pushes the state it
/// enters, which the matching return consults.
pub fn mnwa_to_mvpa(b: &Mnwa) -> Result<Mvpa, AutomatonError> {
    if b.is_generalized() {
        return Err(AutomatonError::CallingStatesPresent);
    }
    let mut bottom = "⊥".to_string();
    while b.states().contains(&bottom) {
        bottom.push('\'');
    }
    // stack symbol 0 is the bottom, symbol q + 1 stands for state q
    let mut gamma = vec![bottom];
    gamma.extend(b.states().iter().cloned());
    let mut push = Vec::new();
    let mut pop = Vec::new();
    let mut internal = Vec::new();
    for &(q, a, q2) in b.delta1() {
        match b.class(a) {
            SymbolClass::Call(_) => push.push((q, a, q2 + 1, q2)),
            SymbolClass::Internal => internal.push((q, a, q2)),
            SymbolClass::Return(_) => pop.push((q, a, 0, q2)),
        }
    }
    for &(p, q, a, q2) in b.delta2() {
        pop.push((q, a, p + 1, q2));
    }
    Mvpa::new(
        b.alphabet().clone(),
        b.states().to_vec(),
        b.initial().to_vec(),
        b.finals(),
        gamma,
        push,
        pop,
        internal,
    )
}

/// Per-stack flag vector of the degeneralization: 0 = nothing open,
/// 1 = a calling call was just read, 2 = waiting for its return.
pub type Flags = Vec<u8>;

fn all_flags(k: usize) -> Vec<Flags> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|f| {
                (0..3u8).map(move |v| {
                    let mut g = f.clone();
                    g.push(v);
                    g
                })
            })
            .collect();
    }
    out
}

fn flags_index(f: &[u8]) -> usize {
    f.iter().fold(0, |acc, &v| acc * 3 + v as usize)
}

fn step_flags(b: &Mnwa, flags: &[u8], a: crate::alphabet::SymbolId, q2: usize) -> Flags {
    flags
        .iter()
        .enumerate()
        .map(|(s, &v)| match v {
            1 | 2 => 2,
            _ if b.class(a) == SymbolClass::Call(s) && b.is_calling(q2) => 1,
            _ => 0,
        })
        .collect()
}

fn return_flags(call_flags: &[u8], flags: &[u8]) -> Flags {
    flags
        .iter()
        .zip(call_flags)
        .map(|(&v, &c)| if c == 1 { 0 } else { v })
        .collect()
}

/// Removes calling states with the flag construction.
pub fn degeneralize(b: &Mnwa) -> Mnwa {
    let k = b.alphabet().stack_count();
    let flags = all_flags(k);
    let f = flags.len();
    let id = |q: usize, fl: &[u8]| q * f + flags_index(fl);
    let states: Vec<String> = b
        .states()
        .iter()
        .flat_map(|q| {
            flags.iter().map(move |fl| {
                let bits: String = fl.iter().map(|v| char::from(b'0' + v)).collect();
                format!("{q}|{bits}")
            })
        })
        .collect();
    let zero = vec![0u8; k];
    let initial = b.initial().iter().map(|&q| id(q, &zero)).collect();
    let finals = b.finals().into_iter().map(|q| id(q, &zero)).collect();
    let mut d1 = Vec::new();
    for &(q, a, q2) in b.delta1() {
        if b.is_calling(q2) && !b.class(a).is_call() {
            continue;
        }
        for fl in &flags {
            d1.push((id(q, fl), a, id(q2, &step_flags(b, fl, a, q2))));
        }
    }
    let mut d2 = Vec::new();
    for &(p, q, a, q2) in b.delta2() {
        if b.is_calling(q2) {
            continue;
        }
        for c in &flags {
            for fl in &flags {
                d2.push((id(p, c), id(q, fl), a, id(q2, &return_flags(c, fl))));
            }
        }
    }
    Mnwa::new(b.alphabet().clone(), states, initial, finals, Vec::new(), d1, d2).expect("construction is well-typed")
}

/// The flag vectors the degeneralized automaton assigns along `run`,
/// starting with the all-zero vector before the first position.
pub fn flag_supplement(b: &Mnwa, word: &NestedWord, run: &[usize]) -> Vec<Flags> {
    let k = b.alphabet().stack_count();
    let mut out: Vec<Flags> = vec![vec![0; k]];
    for i in 0..word.len() {
        let prev = &out[i];
        let next = match word.call_of(i) {
            Some(c) => return_flags(&out[c + 1], prev),
            None => step_flags(b, prev, word.label(i), run[i]),
        };
        out.push(next);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductMode {
    Union,
    Intersection,
}

/// Synchronous product (intersection) or disjoint sum (union).
pub fn product(b1: &Mnwa, b2: &Mnwa, mode: ProductMode) -> Result<Mnwa, AutomatonError> {
    if **b1.alphabet() != **b2.alphabet() {
        return Err(AutomatonError::AlphabetMismatch);
    }
    let alphabet = Arc::clone(b1.alphabet());
    let (n1, n2) = (b1.states().len(), b2.states().len());
    match mode {
        ProductMode::Intersection => {
            let id = |p: usize, q: usize| p * n2 + q;
            let states = b1
                .states()
                .iter()
                .flat_map(|p| b2.states().iter().map(move |q| format!("{p}|{q}")))
                .collect();
            let initial = b1
                .initial()
                .iter()
                .flat_map(|&p| b2.initial().iter().map(move |&q| id(p, q)))
                .collect();
            let finals = b1
                .finals()
                .into_iter()
                .flat_map(|p| b2.finals().into_iter().map(move |q| id(p, q)))
                .collect();
            let calling = (0..n1)
                .flat_map(|p| (0..n2).map(move |q| (p, q)))
                .filter(|&(p, q)| b1.is_calling(p) || b2.is_calling(q))
                .map(|(p, q)| id(p, q))
                .collect();
            let mut d1 = Vec::new();
            for &(p, a, p2) in b1.delta1() {
                for &(q, a2, q2) in b2.delta1() {
                    if a == a2 {
                        d1.push((id(p, q), a, id(p2, q2)));
                    }
                }
            }
            let mut d2 = Vec::new();
            for &(cp, p, a, p2) in b1.delta2() {
                for &(cq, q, a2, q2) in b2.delta2() {
                    if a == a2 {
                        d2.push((id(cp, cq), id(p, q), a, id(p2, q2)));
                    }
                }
            }
            Mnwa::new(alphabet, states, initial, finals, calling, d1, d2)
        }
        ProductMode::Union => {
            let states = b1
                .states()
                .iter()
                .map(|p| format!("1|{p}"))
                .chain(b2.states().iter().map(|q| format!("2|{q}")))
                .collect();
            let shift = |q: usize| q + n1;
            let initial = b1.initial().iter().copied().chain(b2.initial().iter().map(|&q| shift(q))).collect();
            let finals = b1.finals().into_iter().chain(b2.finals().into_iter().map(shift)).collect();
            let calling = b1.calling().into_iter().chain(b2.calling().into_iter().map(shift)).collect();
            let d1 = b1
                .delta1()
                .iter()
                .copied()
                .chain(b2.delta1().iter().map(|&(q, a, q2)| (shift(q), a, shift(q2))))
                .collect();
            let d2 = b1
                .delta2()
                .iter()
                .copied()
                .chain(b2.delta2().iter().map(|&(p, q, a, q2)| (shift(p), shift(q), a, shift(q2))))
                .collect();
            Mnwa::new(alphabet, states, initial, finals, calling, d1, d2)
        }
    }
}
