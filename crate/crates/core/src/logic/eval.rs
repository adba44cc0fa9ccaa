//! Model checking of formulas over finite structures (nested words, grids).

use std::collections::BTreeMap;

use super::formula::{Formula, Relation};
use super::LogicError;
use crate::nested::NestedWord;

/// Default cap on the universe size for set quantifiers.
pub const DEFAULT_SO_LIMIT: usize = 18;

/// A finite relational structure a formula can be evaluated on. Elements
/// are `0..size()`.
pub trait Structure {
    fn size(&self) -> usize;
    /// Resolves a label name to an id understood by `has_label`.
    fn resolve_label(&self, name: &str) -> Result<usize, LogicError>;
    fn has_label(&self, x: usize, label: usize) -> bool;
    fn supports(&self, rel: Relation) -> bool;
    fn holds(&self, rel: Relation, x: usize, y: usize) -> bool;
}

impl Structure for NestedWord {
    fn size(&self) -> usize {
        self.len()
    }

    fn resolve_label(&self, name: &str) -> Result<usize, LogicError> {
        self.alphabet()
            .lookup(name)
            .map(|a| a.index())
            .map_err(|_| LogicError::UnknownSymbol(name.to_string()))
    }

    fn has_label(&self, x: usize, label: usize) -> bool {
        self.label(x).index() == label
    }

    fn supports(&self, rel: Relation) -> bool {
        matches!(rel, Relation::Succ | Relation::Match)
    }

    fn holds(&self, rel: Relation, x: usize, y: usize) -> bool {
        match rel {
            Relation::Succ => y == x + 1,
            Relation::Match => self.return_of(x) == Some(y),
            _ => false,
        }
    }
}

/// Variable assignment: positions for first-order variables, position sets
/// for set variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    pub fo: BTreeMap<String, usize>,
    pub so: BTreeMap<String, Vec<usize>>,
}

impl Assignment {
    pub fn with(mut self, x: &str, v: usize) -> Self {
        self.fo.insert(x.to_string(), v);
        self
    }
}

#[derive(Clone, Debug)]
enum Node {
    True,
    False,
    Label(usize, usize),
    Rel(Relation, usize, usize),
    Eq(usize, usize),
    In(usize, usize),
    Not(Box<Node>),
    Or(Box<Node>, Box<Node>),
    Exists(usize, Box<Node>),
    ExistsSet(usize, Box<Node>),
}

/// A formula with variables resolved to slots and labels resolved against
/// one structure, ready for repeated evaluation.
#[derive(Clone, Debug)]
pub struct Compiled {
    root: Node,
    fo_slots: usize,
    so_slots: usize,
    fo_free: Vec<String>,
    so_free: Vec<String>,
    uses_sets: bool,
}

struct Scope<'a> {
    fo: Vec<&'a str>,
    so: Vec<&'a str>,
    fo_max: usize,
    so_max: usize,
}

fn lookup(stack: &[&str], x: &str) -> Result<usize, LogicError> {
    stack
        .iter()
        .rposition(|v| *v == x)
        .ok_or_else(|| LogicError::UnboundVariable(x.to_string()))
}

fn compile_node<'a, S: Structure + ?Sized>(f: &'a Formula, s: &S, sc: &mut Scope<'a>) -> Result<Node, LogicError> {
    Ok(match f {
        Formula::True => Node::True,
        Formula::False => Node::False,
        Formula::Label(x, a) => Node::Label(lookup(&sc.fo, x)?, s.resolve_label(a)?),
        Formula::Rel(r, x, y) => {
            if !s.supports(*r) {
                return Err(LogicError::UnsupportedRelation(r.keyword().to_string()));
            }
            Node::Rel(*r, lookup(&sc.fo, x)?, lookup(&sc.fo, y)?)
        }
        Formula::Eq(x, y) => Node::Eq(lookup(&sc.fo, x)?, lookup(&sc.fo, y)?),
        Formula::In(x, set) => Node::In(lookup(&sc.fo, x)?, lookup(&sc.so, set)?),
        Formula::Not(a) => Node::Not(Box::new(compile_node(a, s, sc)?)),
        Formula::Or(a, b) => Node::Or(Box::new(compile_node(a, s, sc)?), Box::new(compile_node(b, s, sc)?)),
        Formula::Exists(x, a) => {
            sc.fo.push(x);
            sc.fo_max = sc.fo_max.max(sc.fo.len());
            let slot = sc.fo.len() - 1;
            let body = compile_node(a, s, sc)?;
            sc.fo.pop();
            Node::Exists(slot, Box::new(body))
        }
        Formula::ExistsSet(x, a) => {
            sc.so.push(x);
            sc.so_max = sc.so_max.max(sc.so.len());
            let slot = sc.so.len() - 1;
            let body = compile_node(a, s, sc)?;
            sc.so.pop();
            Node::ExistsSet(slot, Box::new(body))
        }
        Formula::And(..) | Formula::Implies(..) | Formula::Forall(..) | Formula::ForallSet(..) => {
            unreachable!("compiled formulas are desugared first")
        }
    })
}

impl Compiled {
    /// `fo_free`/`so_free` name the free variables in the order their values
    /// will be supplied to [`Compiled::eval`].
    pub fn new<S: Structure + ?Sized>(f: &Formula, s: &S, fo_free: &[&str], so_free: &[&str]) -> Result<Self, LogicError> {
        let core = f.desugar();
        let mut sc = Scope {
            fo: fo_free.to_vec(),
            so: so_free.to_vec(),
            fo_max: fo_free.len(),
            so_max: so_free.len(),
        };
        let root = compile_node(&core, s, &mut sc)?;
        Ok(Compiled {
            root,
            fo_slots: sc.fo_max,
            so_slots: sc.so_max,
            fo_free: fo_free.iter().map(|x| x.to_string()).collect(),
            so_free: so_free.iter().map(|x| x.to_string()).collect(),
            uses_sets: !f.is_first_order() || !so_free.is_empty(),
        })
    }

    pub fn free_variables(&self) -> (&[String], &[String]) {
        (&self.fo_free, &self.so_free)
    }

    /// Evaluates with the free variables bound to `fo` and `so` (sets as bit masks).
    pub fn eval<S: Structure + ?Sized>(&self, s: &S, fo: &[usize], so: &[u64], so_limit: usize) -> Result<bool, LogicError> {
        if self.uses_sets && s.size() > so_limit.min(63) {
            return Err(LogicError::WordTooLargeForSO {
                size: s.size(),
                limit: so_limit.min(63),
            });
        }
        let mut fo_env = vec![0usize; self.fo_slots];
        fo_env[..fo.len()].copy_from_slice(fo);
        let mut so_env = vec![0u64; self.so_slots];
        so_env[..so.len()].copy_from_slice(so);
        Ok(run(&self.root, s, &mut fo_env, &mut so_env))
    }
}

fn run<S: Structure + ?Sized>(n: &Node, s: &S, fo: &mut [usize], so: &mut [u64]) -> bool {
    match n {
        Node::True => true,
        Node::False => false,
        Node::Label(x, a) => s.has_label(fo[*x], *a),
        Node::Rel(r, x, y) => s.holds(*r, fo[*x], fo[*y]),
        Node::Eq(x, y) => fo[*x] == fo[*y],
        Node::In(x, set) => so[*set] >> fo[*x] & 1 == 1,
        Node::Not(a) => !run(a, s, fo, so),
        Node::Or(a, b) => run(a, s, fo, so) || run(b, s, fo, so),
        Node::Exists(slot, body) => (0..s.size()).any(|v| {
            fo[*slot] = v;
            run(body, s, fo, so)
        }),
        Node::ExistsSet(slot, body) => (0..1u64 << s.size()).any(|m| {
            so[*slot] = m;
            run(body, s, fo, so)
        }),
    }
}

/// Evaluates `f` on `s` under `env`, refusing set quantification over
/// universes larger than `so_limit`.
pub fn eval_with_limit<S: Structure + ?Sized>(s: &S, f: &Formula, env: &Assignment, so_limit: usize) -> Result<bool, LogicError> {
    let fo_names: Vec<&str> = env.fo.keys().map(String::as_str).collect();
    let so_names: Vec<&str> = env.so.keys().map(String::as_str).collect();
    let compiled = Compiled::new(f, s, &fo_names, &so_names)?;
    let mut fo = Vec::new();
    for (x, &v) in &env.fo {
        if v >= s.size() {
            return Err(LogicError::ValueOutOfRange(x.clone()));
        }
        fo.push(v);
    }
    let mut so = Vec::new();
    for (x, set) in &env.so {
        let mut mask = 0u64;
        for &v in set {
            if v >= s.size() || v >= 64 {
                return Err(LogicError::ValueOutOfRange(x.clone()));
            }
            mask |= 1 << v;
        }
        so.push(mask);
    }
    compiled.eval(s, &fo, &so, so_limit)
}

pub fn eval<S: Structure + ?Sized>(s: &S, f: &Formula, env: &Assignment) -> Result<bool, LogicError> {
    eval_with_limit(s, f, env, DEFAULT_SO_LIMIT)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn word(s: &str) -> NestedWord {
        NestedWord::parse(&fixtures::two_stack(), s).unwrap()
    }

    fn holds(w: &NestedWord, f: &str) -> bool {
        eval(w, &Formula::parse(f).unwrap(), &Assignment::default()).unwrap()
    }

    const A_MATCHES_B: &str = "(forall x (forall y (implies (and (label x a) (match x y)) (label y b))))";

    #[test]
    fn matching_examples() {
        assert!(holds(&word("a b~"), A_MATCHES_B));
        assert!(!holds(&word("a a~"), A_MATCHES_B));
        let all_matched = "(forall x (exists y (or (match x y) (match y x))))";
        assert!(!holds(&fixtures::running_word(), all_matched));
        assert!(holds(&word("a b a~ b~"), all_matched));
    }

    #[test]
    fn free_variables_and_errors() {
        let w = word("a a~");
        let f = Formula::parse("(match x y)").unwrap();
        assert!(eval(&w, &f, &Assignment::default().with("x", 0).with("y", 1)).unwrap());
        assert_eq!(
            eval(&w, &f, &Assignment::default().with("x", 0)).unwrap_err(),
            LogicError::UnboundVariable("y".into())
        );
        let g = Formula::parse("(exists x (label x z))").unwrap();
        assert_eq!(eval(&w, &g, &Assignment::default()).unwrap_err(), LogicError::UnknownSymbol("z".into()));
    }

    #[test]
    fn set_quantifiers() {
        // some set contains exactly the calls
        let f = "(exists-set X (forall x (or (and (in x X) (label x a)) (and (not (in x X)) (not (label x a))))))";
        assert!(holds(&word("a a~ a"), f));
        let long = NestedWord::parse(&fixtures::two_stack(), &["a"; 19].join(" ")).unwrap();
        assert!(matches!(
            eval(&long, &Formula::parse(f).unwrap(), &Assignment::default()),
            Err(LogicError::WordTooLargeForSO { size: 19, limit: 18 })
        ));
        // first-order formulas are not capped
        assert!(holds(&long, "(forall x (label x a))"));
    }
}
