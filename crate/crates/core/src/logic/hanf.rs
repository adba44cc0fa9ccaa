//! Sphere-count constraints (positive Boolean combinations of "exactly t" and
//! "more than t" occurrences of a sphere type) and their acceptor.
//!
//! The acceptor reads a word through the canonical run of the sphere
//! automaton and keeps one saturating counter per atom, bumped whenever the
//! centred sphere of the current state is the atom's sphere. It is a decision
//! procedure rather than an explicit state table because the sphere automaton
//! itself is realized as predicates.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::LogicError;
use crate::alphabet::CallReturnAlphabet;
use crate::nested::NestedWord;
use crate::sphere_automaton::SphereAutomaton;
use crate::spheres::{sphere_count, Sphere, SphereFile};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SphereConstraint {
    /// Exactly `t` positions have this sphere.
    CountEq(Arc<Sphere>, usize),
    /// More than `t` positions have this sphere.
    CountGt(Arc<Sphere>, usize),
    And(Vec<SphereConstraint>),
    Or(Vec<SphereConstraint>),
}

impl SphereConstraint {
    fn atoms<'a>(&'a self, out: &mut Vec<&'a SphereConstraint>) {
        match self {
            SphereConstraint::CountEq(..) | SphereConstraint::CountGt(..) => out.push(self),
            SphereConstraint::And(xs) | SphereConstraint::Or(xs) => xs.iter().for_each(|x| x.atoms(out)),
        }
    }

    /// Checks that every atom has radius `r`.
    pub fn check_radius(&self, r: usize) -> Result<(), LogicError> {
        let mut atoms = Vec::new();
        self.atoms(&mut atoms);
        for atom in atoms {
            let (SphereConstraint::CountEq(s, _) | SphereConstraint::CountGt(s, _)) = atom else {
                unreachable!()
            };
            if s.radius() != r {
                return Err(LogicError::MixedRadius {
                    expected: r,
                    found: s.radius(),
                });
            }
        }
        Ok(())
    }

    /// Truth value given a count lookup per atom. Every atom is visited, in
    /// the same order as `atoms`.
    fn decide(&self, count: &mut impl FnMut(&Sphere, usize) -> usize) -> bool {
        match self {
            SphereConstraint::CountEq(s, t) => count(s, *t) == *t,
            SphereConstraint::CountGt(s, t) => count(s, *t) > *t,
            SphereConstraint::And(xs) => xs.iter().map(|x| x.decide(count)).fold(true, |a, b| a & b),
            SphereConstraint::Or(xs) => xs.iter().map(|x| x.decide(count)).fold(false, |a, b| a | b),
        }
    }
}

/// A sphere given either as a position of a word or as an explicit sphere file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SphereRef {
    /// `position` is 1-based.
    Around { word: String, position: usize, radius: usize },
    File(SphereFile),
}

impl SphereRef {
    pub fn resolve(&self, alphabet: &Arc<CallReturnAlphabet>) -> Result<Sphere, LogicError> {
        match self {
            SphereRef::Around { word, position, radius } => {
                let w = NestedWord::parse(alphabet, word).map_err(crate::spheres::SphereError::from)?;
                if *position == 0 {
                    return Err(LogicError::Json("positions are 1-based".into()));
                }
                Ok(Sphere::around(&w, position - 1, *radius)?)
            }
            SphereRef::File(f) => Ok(f.build(alphabet)?),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountAtom {
    pub sphere: SphereRef,
    pub t: usize,
}

/// JSON form: `{"count_eq":{"sphere":..,"t":2}}`, `{"count_gt":..}`,
/// `{"and":[..]}`, `{"or":[..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintExpr {
    CountEq(CountAtom),
    CountGt(CountAtom),
    And(Vec<ConstraintExpr>),
    Or(Vec<ConstraintExpr>),
}

impl ConstraintExpr {
    pub fn parse(text: &str) -> Result<Self, LogicError> {
        serde_json::from_str(text).map_err(|e| LogicError::Json(e.to_string()))
    }

    pub fn resolve(&self, alphabet: &Arc<CallReturnAlphabet>) -> Result<SphereConstraint, LogicError> {
        Ok(match self {
            ConstraintExpr::CountEq(a) => SphereConstraint::CountEq(Arc::new(a.sphere.resolve(alphabet)?), a.t),
            ConstraintExpr::CountGt(a) => SphereConstraint::CountGt(Arc::new(a.sphere.resolve(alphabet)?), a.t),
            ConstraintExpr::And(xs) => SphereConstraint::And(xs.iter().map(|x| x.resolve(alphabet)).collect::<Result<_, _>>()?),
            ConstraintExpr::Or(xs) => SphereConstraint::Or(xs.iter().map(|x| x.resolve(alphabet)).collect::<Result<_, _>>()?),
        })
    }
}

/// Acceptor for the words satisfying a sphere constraint.
#[derive(Clone, Debug)]
pub struct CountingAcceptor {
    constraint: SphereConstraint,
    automaton: SphereAutomaton,
}

pub fn compile_constraint(
    constraint: &SphereConstraint,
    alphabet: Arc<CallReturnAlphabet>,
    r: usize,
) -> Result<CountingAcceptor, LogicError> {
    constraint.check_radius(r)?;
    Ok(CountingAcceptor {
        constraint: constraint.clone(),
        automaton: SphereAutomaton::new(alphabet, r),
    })
}

impl CountingAcceptor {
    pub fn radius(&self) -> usize {
        self.automaton.radius()
    }

    pub fn constraint(&self) -> &SphereConstraint {
        &self.constraint
    }

    /// Per-atom counters saturated at `t + 1`, in atom order.
    pub fn counters(&self, word: &NestedWord) -> Vec<usize> {
        let run = self.automaton.canonical_run(word);
        let centred: Vec<Sphere> = run
            .iter()
            .map(|s| self.automaton.eta(s).expect("canonical runs consist of valid states"))
            .collect();
        let mut atoms = Vec::new();
        self.constraint.atoms(&mut atoms);
        atoms
            .into_iter()
            .map(|atom| {
                let (SphereConstraint::CountEq(s, t) | SphereConstraint::CountGt(s, t)) = atom else {
                    unreachable!()
                };
                let mut c = 0;
                for eta in &centred {
                    if eta.is_realized() && eta == &**s {
                        c = (c + 1).min(t + 1);
                    }
                }
                c
            })
            .collect()
    }

    pub fn accepts(&self, word: &NestedWord) -> bool {
        let counters = self.counters(word);
        let mut k = 0;
        self.constraint.decide(&mut |_, _| {
            k += 1;
            counters[k - 1]
        })
    }
}

/// Verdict obtained by recomputing every sphere of the word and counting.
pub fn direct_count_verdict(constraint: &SphereConstraint, word: &NestedWord) -> bool {
    constraint.decide(&mut |s, _| sphere_count(word, s, s.radius()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::fixtures;
    use crate::spheres::RawSphere;

    fn singleton(al: &CallReturnAlphabet, name: &str) -> Arc<Sphere> {
        Arc::new(
            Sphere::from_raw(&RawSphere {
                labels: vec![al.lookup(name).unwrap()],
                ..RawSphere::default()
            })
            .unwrap(),
        )
    }

    #[test]
    fn at_least_one_a() {
        let al = fixtures::two_stack();
        let c = SphereConstraint::CountGt(singleton(&al, "a"), 0);
        let acc = compile_constraint(&c, al.clone(), 0).unwrap();
        for w in corpus::corpus(&al, 4) {
            let word = NestedWord::new(al.clone(), w.clone()).unwrap();
            let has_a = w.contains(&al.lookup("a").unwrap());
            assert_eq!(acc.accepts(&word), has_a, "{}", word.string());
            assert_eq!(direct_count_verdict(&c, &word), has_a);
        }
    }

    #[test]
    fn recount_after_relabeling() {
        let w = fixtures::sphere_word();
        let al = w.alphabet().clone();
        let s = Arc::new(Sphere::around(&w, 9, 2).unwrap());
        let c = SphereConstraint::CountEq(s, 2);
        let acc = compile_constraint(&c, al.clone(), 2).unwrap();
        assert!(acc.accepts(&w));
        let mut labels = w.labels().to_vec();
        assert_eq!(al.name(labels[13]), "a~");
        labels[13] = al.lookup("b~").unwrap();
        let mutated = NestedWord::new(al.clone(), labels).unwrap();
        assert!(!acc.accepts(&mutated));
        assert!(!direct_count_verdict(&c, &mutated));
    }

    #[test]
    fn mixed_radius_is_rejected() {
        let w = fixtures::sphere_word();
        let al = w.alphabet().clone();
        let c = SphereConstraint::And(vec![
            SphereConstraint::CountEq(Arc::new(Sphere::around(&w, 0, 1).unwrap()), 1),
            SphereConstraint::CountGt(singleton(&al, "a"), 0),
        ]);
        assert_eq!(
            compile_constraint(&c, al, 1).unwrap_err(),
            LogicError::MixedRadius { expected: 1, found: 0 }
        );
    }

    #[test]
    fn json_expressions() {
        let al = fixtures::two_stack();
        let text = r#"{"or":[{"count_eq":{"sphere":{"word":"a a~","position":1,"radius":1},"t":1}},
                            {"count_gt":{"sphere":{"nodes":[{"id":1,"label":"b"}],"center":1,"radius":0},"t":0}}]}"#;
        let c = ConstraintExpr::parse(text).unwrap().resolve(&al).unwrap();
        assert!(matches!(&c, SphereConstraint::Or(xs) if xs.len() == 2));
        assert!(c.check_radius(1).is_err());
        assert!(ConstraintExpr::parse(r#"{"count_lt":{}}"#).is_err());
    }
}
