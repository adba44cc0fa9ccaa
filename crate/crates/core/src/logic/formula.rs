//! Formula syntax tree and its parenthesized prefix notation, e.g.
//! `(forall x (implies (and (label x a) (match x y)) (label y b)))`.

use std::fmt;

use super::LogicError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    /// Word successor.
    Succ,
    /// Call-return matching.
    Match,
    /// Grid row step `(i,j) -> (i+1,j)`.
    Succ1,
    /// Grid column step `(i,j) -> (i,j+1)`.
    Succ2,
}

impl Relation {
    pub fn keyword(self) -> &'static str {
        match self {
            Relation::Succ => "succ",
            Relation::Match => "match",
            Relation::Succ1 => "succ1",
            Relation::Succ2 => "succ2",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Label(String, String),
    Rel(Relation, String, String),
    Eq(String, String),
    In(String, String),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    ExistsSet(String, Box<Formula>),
    ForallSet(String, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(x: &str, f: Formula) -> Formula {
        Formula::Exists(x.to_string(), Box::new(f))
    }

    pub fn forall(x: &str, f: Formula) -> Formula {
        Formula::Forall(x.to_string(), Box::new(f))
    }

    pub fn label(x: &str, a: &str) -> Formula {
        Formula::Label(x.to_string(), a.to_string())
    }

    pub fn rel(r: Relation, x: &str, y: &str) -> Formula {
        Formula::Rel(r, x.to_string(), y.to_string())
    }

    pub fn eq(x: &str, y: &str) -> Formula {
        Formula::Eq(x.to_string(), y.to_string())
    }

    /// Rewrites `and`, `implies` and the universal quantifiers into
    /// `not`/`or`/`exists`.
    pub fn desugar(&self) -> Formula {
        use Formula::*;
        match self {
            True | False | Label(..) | Rel(..) | Eq(..) | In(..) => self.clone(),
            Not(f) => Formula::not(f.desugar()),
            Or(a, b) => Formula::or(a.desugar(), b.desugar()),
            And(a, b) => Formula::not(Formula::or(Formula::not(a.desugar()), Formula::not(b.desugar()))),
            Implies(a, b) => Formula::or(Formula::not(a.desugar()), b.desugar()),
            Exists(x, f) => Exists(x.clone(), Box::new(f.desugar())),
            Forall(x, f) => Formula::not(Exists(x.clone(), Box::new(Formula::not(f.desugar())))),
            ExistsSet(x, f) => ExistsSet(x.clone(), Box::new(f.desugar())),
            ForallSet(x, f) => Formula::not(ExistsSet(x.clone(), Box::new(Formula::not(f.desugar())))),
        }
    }

    /// True when no set quantifier occurs.
    pub fn is_first_order(&self) -> bool {
        use Formula::*;
        match self {
            True | False | Label(..) | Rel(..) | Eq(..) | In(..) => true,
            Not(f) | Exists(_, f) | Forall(_, f) => f.is_first_order(),
            Or(a, b) | And(a, b) | Implies(a, b) => a.is_first_order() && b.is_first_order(),
            ExistsSet(..) | ForallSet(..) => false,
        }
    }

    pub fn parse(text: &str) -> Result<Formula, LogicError> {
        let tokens = tokenize(text);
        let mut pos = 0;
        let f = parse_formula(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(LogicError::Syntax(format!("unexpected `{}` after the formula", tokens[pos])));
        }
        Ok(f)
    }
}

fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        if ch == '(' || ch == ')' || ch.is_whitespace() {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            if !ch.is_whitespace() {
                out.push(ch.to_string());
            }
        } else {
            cur.push(ch);
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn expect(tokens: &[String], pos: &mut usize, want: &str) -> Result<(), LogicError> {
    match tokens.get(*pos) {
        Some(t) if t == want => {
            *pos += 1;
            Ok(())
        }
        Some(t) => Err(LogicError::Syntax(format!("expected `{want}`, found `{t}`"))),
        None => Err(LogicError::Syntax(format!("expected `{want}`, found end of input"))),
    }
}

fn atom(tokens: &[String], pos: &mut usize) -> Result<String, LogicError> {
    match tokens.get(*pos) {
        Some(t) if t != "(" && t != ")" => {
            *pos += 1;
            Ok(t.clone())
        }
        Some(t) => Err(LogicError::Syntax(format!("expected a name, found `{t}`"))),
        None => Err(LogicError::Syntax("expected a name, found end of input".into())),
    }
}

fn parse_formula(tokens: &[String], pos: &mut usize) -> Result<Formula, LogicError> {
    expect(tokens, pos, "(")?;
    let head = atom(tokens, pos)?;
    let f = match head.as_str() {
        "true" => Formula::True,
        "false" => Formula::False,
        "label" => Formula::Label(atom(tokens, pos)?, atom(tokens, pos)?),
        "succ" | "match" | "succ1" | "succ2" => {
            let rel = match head.as_str() {
                "succ" => Relation::Succ,
                "match" => Relation::Match,
                "succ1" => Relation::Succ1,
                _ => Relation::Succ2,
            };
            Formula::Rel(rel, atom(tokens, pos)?, atom(tokens, pos)?)
        }
        "eq" => Formula::Eq(atom(tokens, pos)?, atom(tokens, pos)?),
        "in" => Formula::In(atom(tokens, pos)?, atom(tokens, pos)?),
        "not" => Formula::not(parse_formula(tokens, pos)?),
        "implies" => {
            let a = parse_formula(tokens, pos)?;
            Formula::implies(a, parse_formula(tokens, pos)?)
        }
        "and" | "or" => {
            let mut parts = vec![parse_formula(tokens, pos)?];
            while tokens.get(*pos).map(String::as_str) == Some("(") {
                parts.push(parse_formula(tokens, pos)?);
            }
            let join = if head == "and" { Formula::and } else { Formula::or };
            let mut it = parts.into_iter().rev();
            let last = it.next().expect("at least one operand");
            it.fold(last, |acc, f| join(f, acc))
        }
        "exists" | "forall" | "exists-set" | "forall-set" => {
            let x = atom(tokens, pos)?;
            let body = Box::new(parse_formula(tokens, pos)?);
            match head.as_str() {
                "exists" => Formula::Exists(x, body),
                "forall" => Formula::Forall(x, body),
                "exists-set" => Formula::ExistsSet(x, body),
                _ => Formula::ForallSet(x, body),
            }
        }
        other => return Err(LogicError::Syntax(format!("unknown operator `{other}`"))),
    };
    expect(tokens, pos, ")")?;
    Ok(f)
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        match self {
            True => write!(f, "(true)"),
            False => write!(f, "(false)"),
            Label(x, a) => write!(f, "(label {x} {a})"),
            Rel(r, x, y) => write!(f, "({} {x} {y})", r.keyword()),
            Eq(x, y) => write!(f, "(eq {x} {y})"),
            In(x, s) => write!(f, "(in {x} {s})"),
            Not(a) => write!(f, "(not {a})"),
            Or(a, b) => write!(f, "(or {a} {b})"),
            And(a, b) => write!(f, "(and {a} {b})"),
            Implies(a, b) => write!(f, "(implies {a} {b})"),
            Exists(x, a) => write!(f, "(exists {x} {a})"),
            Forall(x, a) => write!(f, "(forall {x} {a})"),
            ExistsSet(x, a) => write!(f, "(exists-set {x} {a})"),
            ForallSet(x, a) => write!(f, "(forall-set {x} {a})"),
        }
    }
}
