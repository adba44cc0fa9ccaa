//! Worked examples used by the tests, the acceptance suite and the CLI docs.

use std::sync::Arc;

use crate::alphabet::{CallReturnAlphabet, SymbolClass};
use crate::automata::{Mnwa, MnwaSpec, Mvpa, MvpaSpec};
use crate::nested::NestedWord;

fn rows<const N: usize>(xs: &[[&str; N]]) -> Vec<[String; N]> {
    xs.iter().map(|r| r.map(str::to_string)).collect()
}

fn names(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

pub fn two_stack() -> Arc<CallReturnAlphabet> {
    Arc::new(CallReturnAlphabet::two_stack())
}

/// The MVPA recognising `((ab)^n ā^(n+1) b̄^(n+1))+`.
pub fn example_mvpa() -> Mvpa {
    MvpaSpec {
        alphabet: two_stack().spec().clone(),
        states: names(&["q0", "q1", "q2", "q3", "q4"]),
        initial: names(&["q0"]),
        finals: names(&["q0"]),
        gamma: names(&["$"]),
        bottom: "⊥".into(),
        delta_c: rows(&[
            ["q0", "a", "$", "q2"],
            ["q2", "b", "$", "q1"],
            ["q1", "a", "$", "q2"],
            ["q2", "b", "$", "q3"],
        ]),
        delta_r: rows(&[
            ["q3", "a~", "$", "q3"],
            ["q3", "a~", "⊥", "q4"],
            ["q4", "b~", "$", "q4"],
            ["q4", "b~", "⊥", "q0"],
        ]),
        delta_int: vec![],
    }
    .build()
    .expect("fixture is valid")
}

/// The MNWA for the same language, counting through its return transitions.
pub fn example_mnwa() -> Mnwa {
    MnwaSpec {
        alphabet: two_stack().spec().clone(),
        states: names(&["q0", "q1", "q2", "q3", "q4"]),
        initial: names(&["q0"]),
        finals: names(&["q0"]),
        calling: vec![],
        delta_1: rows(&[
            ["q0", "a", "q2"],
            ["q2", "b", "q1"],
            ["q1", "a", "q2"],
            ["q2", "b", "q3"],
            ["q3", "a~", "q4"],
            ["q4", "b~", "q0"],
        ]),
        delta_2: rows(&[["q2", "q3", "a~", "q3"], ["q3", "q4", "b~", "q4"], ["q1", "q4", "b~", "q4"]]),
    }
    .build()
    .expect("fixture is valid")
}

/// Generalized MNWA over the two-stack alphabet that enters the calling state
/// `c` on every call and `n` elsewhere: it accepts exactly the words whose
/// calls are all matched.
pub fn calling_on_calls_mnwa() -> Mnwa {
    let al = two_stack();
    let (c, n) = (0, 1);
    let mut d1 = Vec::new();
    let mut d2 = Vec::new();
    for q in [c, n] {
        for a in al.symbols() {
            match al.class(a) {
                SymbolClass::Call(_) => d1.push((q, a, c)),
                _ => d1.push((q, a, n)),
            }
            if al.class(a).is_return() {
                for p in [c, n] {
                    d2.push((p, q, a, n));
                }
            }
        }
    }
    Mnwa::new(al, names(&["c", "n"]), vec![n], vec![c, n], vec![c], d1, d2).expect("fixture is valid")
}

/// One-state automaton accepting every nested word over `alphabet`.
pub fn accept_all_mnwa(alphabet: Arc<CallReturnAlphabet>) -> Mnwa {
    let d1 = alphabet.symbols().map(|a| (0, a, 0)).collect();
    let d2 = alphabet.returns().map(|a| (0, 0, a, 0)).collect();
    Mnwa::new(alphabet, names(&["s"]), vec![0], vec![0], vec![], d1, d2).expect("fixture is valid")
}

/// Two-state automaton accepting the words that contain `symbol`.
pub fn contains_mnwa(alphabet: Arc<CallReturnAlphabet>, symbol: &str) -> Mnwa {
    let target = alphabet.lookup(symbol).expect("symbol in alphabet");
    let mut d1 = Vec::new();
    let mut d2 = Vec::new();
    for a in alphabet.symbols() {
        let hit = usize::from(a == target);
        d1.push((0, a, hit));
        d1.push((1, a, 1));
        if alphabet.class(a).is_return() {
            for p in 0..2 {
                d2.push((p, 0, a, hit));
                d2.push((p, 1, a, 1));
            }
        }
    }
    Mnwa::new(alphabet, names(&["seek", "seen"]), vec![0], vec![1], vec![], d1, d2).expect("fixture is valid")
}

/// `a b a b ā ā ā b̄ b̄ b̄`, the running example.
pub fn running_word() -> NestedWord {
    NestedWord::parse(&two_stack(), "a b a b a~ a~ a~ b~ b~ b~").expect("fixture is valid")
}

/// Two stacks plus the internal symbol `c`.
pub fn internal_alphabet() -> Arc<CallReturnAlphabet> {
    Arc::new(CallReturnAlphabet::from_parts(&[(&["a"], &["a~"]), (&["b"], &["b~"])], &["c"]).expect("valid"))
}

/// The 16-position word with two isomorphic 2-spheres (around positions 10 and 14).
pub fn sphere_word() -> NestedWord {
    NestedWord::parse(
        &internal_alphabet(),
        "c a b c a b b~ b~ b~ a~ b~ b~ b~ a~ b~ b~",
    )
    .expect("fixture is valid")
}

/// Two-stack word on which the doubled direction string revisits positions.
pub fn revisiting_word() -> NestedWord {
    NestedWord::parse(&two_stack(), "a b a b b~ a b~ a a~ a~ a~ a~").expect("fixture is valid")
}

pub fn three_stack() -> Arc<CallReturnAlphabet> {
    Arc::new(
        CallReturnAlphabet::from_parts(&[(&["a"], &["a~"]), (&["b"], &["b~"]), (&["c"], &["c~"])], &[])
            .expect("valid"),
    )
}

/// Three-stack word on which a doubled circular string closes a simple cycle.
pub fn three_stack_word() -> NestedWord {
    NestedWord::parse(&three_stack(), "a c a c c~ b c~ b b~ a~ b~ a~").expect("fixture is valid")
}
