//! Labeled grids, their encoding as two-stack nested words, a mechanical
//! check of the first-order reduction between the two, and membership in
//! the image of the encoding.
//!
//! Columns are encoded alternately on the two stacks: column 1 is a run of
//! `a` calls read top to bottom, column 2 the `b` calls interleaved with the
//! returns of column 1 and read bottom to top, and so on.

use std::sync::Arc;

use thiserror::Error;

use crate::alphabet::{CallReturnAlphabet, SymbolId};
use crate::logic::{Compiled, Formula, LogicError, Relation, Structure};
use crate::nested::NestedWord;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("grid {0}x{1} is outside the supported range")]
    BoundsExceeded(usize, usize),
    #[error("word is not over the two-stack alphabet a a~ b b~")]
    AlphabetMismatch,
    #[error(transparent)]
    Logic(#[from] LogicError),
}

/// Largest `n·m` accepted by [`verify_reduction`].
pub const VERIFY_LIMIT: usize = 64;

/// The grid `G(n,m)`: rows `1..=n`, columns `1..=m`. Node `(i,j)` is element
/// `(j-1)·n + (i-1)`; odd columns carry label `a`, even columns `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    pub n: usize,
    pub m: usize,
}

impl Grid {
    pub fn new(n: usize, m: usize) -> Self {
        assert!(n >= 1 && m >= 1, "grid dimensions must be positive");
        Grid { n, m }
    }

    pub fn element(&self, i: usize, j: usize) -> usize {
        (j - 1) * self.n + (i - 1)
    }

    pub fn node(&self, e: usize) -> (usize, usize) {
        (e % self.n + 1, e / self.n + 1)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=self.m).flat_map(move |j| (1..=self.n).map(move |i| (i, j)))
    }
}

const LABEL_A: usize = 0;
const LABEL_B: usize = 1;

impl Structure for Grid {
    fn size(&self) -> usize {
        self.n * self.m
    }

    fn resolve_label(&self, name: &str) -> Result<usize, LogicError> {
        match name {
            "a" => Ok(LABEL_A),
            "b" => Ok(LABEL_B),
            _ => Err(LogicError::UnknownSymbol(name.to_string())),
        }
    }

    fn has_label(&self, x: usize, label: usize) -> bool {
        let (_, j) = self.node(x);
        (j % 2 == 1) == (label == LABEL_A)
    }

    fn supports(&self, rel: Relation) -> bool {
        matches!(rel, Relation::Succ1 | Relation::Succ2)
    }

    fn holds(&self, rel: Relation, x: usize, y: usize) -> bool {
        let ((i1, j1), (i2, j2)) = (self.node(x), self.node(y));
        match rel {
            Relation::Succ1 => j1 == j2 && i2 == i1 + 1,
            Relation::Succ2 => i1 == i2 && j2 == j1 + 1,
            _ => false,
        }
    }
}

/// A grid together with its word and the position maps.
#[derive(Clone, Debug)]
pub struct GridEncoding {
    pub grid: Grid,
    pub word: NestedWord,
    chi: Vec<usize>,
}

impl GridEncoding {
    /// Word position (0-based) of grid node `(i,j)`.
    pub fn chi(&self, i: usize, j: usize) -> usize {
        self.chi[self.grid.element(i, j)]
    }

    /// Word position of copy `k ∈ {1,2}` of node `(i,j)`: the node's call
    /// for copy 1, its matching return for copy 2.
    pub fn chi_bar(&self, k: usize, i: usize, j: usize) -> usize {
        let p = self.chi(i, j);
        match k {
            1 => p,
            2 => self.word.return_of(p).expect("encoding is totally matched"),
            _ => panic!("copy index must be 1 or 2"),
        }
    }
}

fn canonical_alphabet() -> Arc<CallReturnAlphabet> {
    Arc::new(CallReturnAlphabet::two_stack())
}

/// The symbol string of the encoding of `G(n,m)`.
pub fn encoding_string(n: usize, m: usize) -> String {
    let rep = |s: &str, k: usize| vec![s; k].join(" ");
    let mut parts = vec![rep("a", n)];
    let block = format!("{} {}", rep("a~ b", n), rep("b~ a", n));
    if m % 2 == 1 {
        parts.extend(std::iter::repeat(block).take((m - 1) / 2));
        parts.push(rep("a~", n));
    } else {
        parts.extend(std::iter::repeat(block).take(m / 2 - 1));
        parts.push(rep("a~ b", n));
        parts.push(rep("b~", n));
    }
    parts.join(" ")
}

pub fn encode(n: usize, m: usize) -> GridEncoding {
    let grid = Grid::new(n, m);
    let al = canonical_alphabet();
    let word = NestedWord::parse(&al, &encoding_string(n, m)).expect("encoding is a valid word");
    let nth = |sym: &str| -> Vec<usize> {
        let s = al.lookup(sym).expect("two-stack symbol");
        (0..word.len()).filter(|&p| word.label(p) == s).collect()
    };
    let (pos_a, pos_b) = (nth("a"), nth("b"));
    let mut chi = vec![0; n * m];
    for (i, j) in grid.nodes() {
        chi[grid.element(i, j)] = if j % 2 == 1 {
            pos_a[n * ((j + 1) / 2 - 1) + i - 1]
        } else {
            pos_b[n * (j / 2 - 1) + (n + 1 - i) - 1]
        };
    }
    GridEncoding { grid, word, chi }
}

/// The formulas defining the reduction. Grid-side formulas use `x`, `x1`,
/// `x2`; word-side formulas likewise.
#[derive(Clone, Debug)]
pub struct ReductionFormulas {
    /// Word side; pairs the two copies of a node.
    pub copy_pairing: Formula,
    /// Grid side, by copy: defines `λ(x) = c` on copy `k`, indexed `[symbol][k-1]`
    /// in alphabet order.
    pub label: Vec<[Formula; 2]>,
    /// Grid side, by copy pair: defines `x1 ⋖ x2`.
    pub word_succ: [[Formula; 2]; 2],
    /// Grid side, by copy pair: defines `μ(x1,x2)`.
    pub word_match: [[Formula; 2]; 2],
    /// Word side: define `P_a`, `P_b` on copy 1.
    pub column_a: Formula,
    pub column_b: Formula,
    /// Word side: define the grid successors on copy 1.
    pub succ1: Formula,
    pub succ2: Formula,
}

fn f(text: &str) -> Formula {
    Formula::parse(text).expect("built-in formula parses")
}

const SUCC1_LITERAL: &str = "(or (and (label x1 a) (label x2 a) (or (succ x1 x2) (exists z (and (succ x1 z) (succ z x2))))) \
     (and (label x1 b) (label x2 b) (exists z (and (succ x2 z) (succ z x1)))))";

// Within the first column `a a a` the middle position also links the outer
// two at distance 2, so the distance-2 case must pass through a `b~`.
const SUCC1_GUARDED: &str = "(or (and (label x1 a) (label x2 a) (or (succ x1 x2) (exists z (and (succ x1 z) (label z b~) (succ z x2))))) \
     (and (label x1 b) (label x2 b) (exists z (and (succ x2 z) (succ z x1)))))";

fn call_then_return(a_then_b_return: &str) -> String {
    format!(
        "(or (and (eq x1 x2) (label x1 a) (not (exists z (succ1 x1 z)))) \
             (and (eq x1 x2) (label x1 b) (not (exists z (succ1 z x1)))) \
             (and (label x1 a) (label x2 b) {a_then_b_return}) \
             (and (label x1 b) (label x2 a) (exists z (and (succ1 z x1) (succ2 x2 z)))))"
    )
}

const CALL_THEN_RETURN_LITERAL: &str = "(exists z (and (succ1 z x1) (succ2 z x2)))";

// An `a` at (i,j+1) is followed by the `b~` of (i+1,j); both step into (i+1,j+1).
const CALL_THEN_RETURN_FIXED: &str = "(exists z (and (succ1 x1 z) (succ2 x2 z)))";

impl ReductionFormulas {
    /// The formulas exactly as displayed with the construction. They fail
    /// from `G(2,2)` on; see [`ReductionFormulas::corrected`].
    pub fn literal() -> Self {
        let grid_label = |c: &str, k: usize| -> Formula {
            match (c, k) {
                ("a" | "b", 1) => f(&format!("(label x {c})")),
                ("a~", 2) => f("(label x a)"),
                ("b~", 2) => f("(label x b)"),
                _ => Formula::False,
            }
        };
        let label = ["a", "a~", "b", "b~"].iter().map(|c| [grid_label(c, 1), grid_label(c, 2)]).collect();
        ReductionFormulas {
            copy_pairing: f("(match x1 x2)"),
            label,
            word_succ: [
                [
                    f("(and (succ1 x1 x2) (not (exists z (succ2 z x1))))"),
                    f(&call_then_return(CALL_THEN_RETURN_LITERAL)),
                ],
                [
                    f("(or (and (label x1 a) (label x2 b) (succ2 x1 x2)) (and (label x1 b) (label x2 a) (succ2 x1 x2)))"),
                    f("(or (and (label x1 a) (succ1 x2 x1) (not (exists z (succ2 x1 z)))) \
                           (and (label x1 b) (succ1 x1 x2) (not (exists z (succ2 x1 z)))))"),
                ],
            ],
            word_match: [[Formula::False, f("(eq x1 x2)")], [Formula::False, Formula::False]],
            column_a: f("(label x a)"),
            column_b: f("(label x b)"),
            succ1: f(SUCC1_LITERAL),
            succ2: f("(exists z (and (match x1 z) (succ z x2)))"),
        }
    }

    /// The literal formulas with two repairs: the call-then-return clause
    /// for an `a` followed by a `b~` steps forward from both ends, and the
    /// row successor only takes distance-2 steps through a `b~`.
    pub fn corrected() -> Self {
        let mut out = Self::literal();
        out.word_succ[0][1] = f(&call_then_return(CALL_THEN_RETURN_FIXED));
        out.succ1 = f(SUCC1_GUARDED);
        out
    }
}

impl Default for ReductionFormulas {
    fn default() -> Self {
        Self::corrected()
    }
}

/// A tuple on which a grid-side and a word-side statement disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionFailure {
    pub condition: String,
    /// `(copy, (row, column))` per variable.
    pub tuple: Vec<(usize, (usize, usize))>,
    pub grid_side: bool,
    pub word_side: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionReport {
    pub n: usize,
    pub m: usize,
    pub checks: usize,
    pub failure: Option<ReductionFailure>,
}

impl ReductionReport {
    pub fn is_success(&self) -> bool {
        self.failure.is_none()
    }
}

pub fn verify_reduction(n: usize, m: usize) -> Result<ReductionReport, GridError> {
    verify_reduction_with(n, m, &ReductionFormulas::default())
}

/// Checks every equivalence of the reduction on `G(n,m)` and its encoding,
/// stopping at the first disagreement.
pub fn verify_reduction_with(n: usize, m: usize, formulas: &ReductionFormulas) -> Result<ReductionReport, GridError> {
    if n == 0 || m == 0 || n * m > VERIFY_LIMIT {
        return Err(GridError::BoundsExceeded(n, m));
    }
    let enc = encode(n, m);
    let grid = enc.grid;
    let word = &enc.word;
    let al = word.alphabet().clone();
    let nodes: Vec<(usize, usize)> = grid.nodes().collect();
    let copies = [1usize, 2];
    let mut checks = 0;
    let mut report = |condition: String, tuple: Vec<(usize, (usize, usize))>, g: bool, w: bool| {
        checks += 1;
        (g != w).then_some(ReductionFailure {
            condition,
            tuple,
            grid_side: g,
            word_side: w,
        })
    };
    let mut failure = None;
    // each block breaks out of 'check on the first disagreement
    'check: {
    // copy pairing
    let pairing = Compiled::new(&formulas.copy_pairing, word, &["x1", "x2"], &[])?;
    for &k1 in &copies {
        for &u1 in &nodes {
            for &k2 in &copies {
                for &u2 in &nodes {
                    let w = pairing.eval(word, &[enc.chi_bar(k1, u1.0, u1.1), enc.chi_bar(k2, u2.0, u2.1)], &[], 0)?;
                    let expected = k1 == 1 && k2 == 2 && u1 == u2;
                    if let Some(fail) = report("copy pairing".into(), vec![(k1, u1), (k2, u2)], expected, w) {
                        failure = Some(fail);
                        break 'check;
                    }
                }
            }
        }
    }

    // labels of each copy
    for (c, pair) in al.symbols().zip(&formulas.label) {
        for &k in &copies {
            let compiled = Compiled::new(&pair[k - 1], &grid, &["x"], &[])?;
            for &u in &nodes {
                let g = compiled.eval(&grid, &[grid.element(u.0, u.1)], &[], 0)?;
                let w = word.label(enc.chi_bar(k, u.0, u.1)) == c;
                if let Some(fail) = report(format!("label {} on copy {k}", al.name(c)), vec![(k, u)], g, w) {
                    failure = Some(fail);
                        break 'check;
                }
            }
        }
    }

    // word successor and matching, per copy pair
    for (name, table, rel) in [("succ", &formulas.word_succ, Relation::Succ), ("match", &formulas.word_match, Relation::Match)] {
        for &k1 in &copies {
            for &k2 in &copies {
                let compiled = Compiled::new(&table[k1 - 1][k2 - 1], &grid, &["x1", "x2"], &[])?;
                for &u1 in &nodes {
                    for &u2 in &nodes {
                        let g = compiled.eval(&grid, &[grid.element(u1.0, u1.1), grid.element(u2.0, u2.1)], &[], 0)?;
                        let w = word.holds(rel, enc.chi_bar(k1, u1.0, u1.1), enc.chi_bar(k2, u2.0, u2.1));
                        if let Some(fail) = report(format!("{name} on copies ({k1},{k2})"), vec![(k1, u1), (k2, u2)], g, w) {
                            failure = Some(fail);
                        break 'check;
                        }
                    }
                }
            }
        }
    }

    // grid vocabulary on copy 1
    for (name, formula, label) in [("P_a", &formulas.column_a, LABEL_A), ("P_b", &formulas.column_b, LABEL_B)] {
        let compiled = Compiled::new(formula, word, &["x"], &[])?;
        for &u in &nodes {
            let g = grid.has_label(grid.element(u.0, u.1), label);
            let w = compiled.eval(word, &[enc.chi(u.0, u.1)], &[], 0)?;
            if let Some(fail) = report(name.into(), vec![(1, u)], g, w) {
                failure = Some(fail);
                        break 'check;
            }
        }
    }
    for (name, formula, rel) in [("succ1", &formulas.succ1, Relation::Succ1), ("succ2", &formulas.succ2, Relation::Succ2)] {
        let compiled = Compiled::new(formula, word, &["x1", "x2"], &[])?;
        for &u1 in &nodes {
            for &u2 in &nodes {
                let g = grid.holds(rel, grid.element(u1.0, u1.1), grid.element(u2.0, u2.1));
                let w = compiled.eval(word, &[enc.chi(u1.0, u1.1), enc.chi(u2.0, u2.1)], &[], 0)?;
                if let Some(fail) = report(name.into(), vec![(1, u1), (1, u2)], g, w) {
                    failure = Some(fail);
                        break 'check;
                }
            }
        }
    }
    }
    Ok(ReductionReport { n, m, checks, failure })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    Start,
    CallsA,
    ReturnA,
    TailA,
    PairAB,
    PairABReturn,
    ReturnB,
    TailB,
    PairBA,
    PairBAReturn,
}

/// Scans `a+ [(a~ b)+ (b~ a)+]* a~+  +  a+ [(a~ b)+ (b~ a)+]* (a~ b)+ b~+`.
fn shape_matches(al: &CallReturnAlphabet, labels: &[SymbolId]) -> bool {
    use Shape::*;
    let mut state = Start;
    for &x in labels {
        state = match (state, al.name(x)) {
            (Start | CallsA, "a") => CallsA,
            (CallsA | PairBA, "a~") => ReturnA,
            (ReturnA | TailA, "a~") => TailA,
            (ReturnA | PairABReturn, "b") => PairAB,
            (PairAB, "a~") => PairABReturn,
            (PairAB, "b~") => ReturnB,
            (ReturnB | TailB, "b~") => TailB,
            (ReturnB | PairBAReturn, "a") => PairBA,
            (PairBA, "b~") => PairBAReturn,
            _ => return false,
        };
    }
    matches!(state, ReturnA | TailA | ReturnB | TailB)
}

/// The five offset implications, on every pair of same-labelled matched calls.
pub fn offsets_hold(word: &NestedWord) -> bool {
    let al = word.alphabet();
    let name = |p: usize| al.name(word.label(p));
    let edges: Vec<(usize, usize)> = word.matching().iter().map(|e| (e.call, e.ret)).collect();
    let diff = |hi: usize, lo: usize| hi as isize - lo as isize;
    for &(x1, y1) in &edges {
        for &(x2, y2) in &edges {
            if word.label(x1) != word.label(x2) {
                continue;
            }
            let dx = diff(x2, x1);
            let dy = diff(y1, y2);
            let ok = (!(name(x1) == "a" && dx == 1) || matches!(dy, 1 | 2))
                && (!(name(y1) == "a~" && dy == 1) || matches!(dx, 1 | 2))
                && (!(name(y1) == "b~" && dy == 1) || dx == 2)
                && (!(dx == 2 && word.label(x1 + 1) != word.label(x1)) || matches!(dy, 1 | 2))
                && (!(dy == 2 && word.label(y2 + 1) != word.label(y2)) || matches!(dx, 1 | 2));
            if !ok {
                return false;
            }
        }
    }
    true
}

/// The offset property as a plain first-order sentence over succ/match.
pub fn offsets_formula() -> Formula {
    let syms = ["a", "a~", "b", "b~"];
    let same = |u: &str, v: &str| {
        let parts: Vec<String> = syms.iter().map(|c| format!("(and (label {u} {c}) (label {v} {c}))")).collect();
        format!("(or {})", parts.join(" "))
    };
    let one = |lo: &str, hi: &str| format!("(succ {lo} {hi})");
    let two = |lo: &str, hi: &str| format!("(exists s (and (succ {lo} s) (succ s {hi})))");
    let one_or_two = |lo: &str, hi: &str| format!("(or {} {})", one(lo, hi), two(lo, hi));
    let two_changing = |lo: &str, hi: &str| {
        format!(
            "(exists s (and (succ {lo} s) (succ s {hi}) (not {})))",
            same(lo, "s")
        )
    };
    let body = format!(
        "(and (implies (and (label x1 a) {}) {}) \
              (implies (and (label y1 a~) {}) {}) \
              (implies (and (label y1 b~) {}) {}) \
              (implies {} {}) \
              (implies {} {}))",
        one("x1", "x2"),
        one_or_two("y2", "y1"),
        one("y2", "y1"),
        one_or_two("x1", "x2"),
        one("y2", "y1"),
        two("x1", "x2"),
        two_changing("x1", "x2"),
        one_or_two("y2", "y1"),
        two_changing("y2", "y1"),
        one_or_two("x1", "x2"),
    );
    f(&format!(
        "(forall x1 (forall y1 (implies (match x1 y1) (forall x2 (forall y2 (implies (and (match x2 y2) {}) {}))))))",
        same("x1", "x2"),
        body
    ))
}

/// The three ingredients of image membership, kept apart for reporting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ImageReport {
    pub shape: bool,
    pub total_matching: bool,
    pub offsets: bool,
    /// The offset property evaluated through the logic engine.
    pub offsets_by_formula: bool,
}

impl ImageReport {
    pub fn is_member(&self) -> bool {
        self.shape && self.total_matching && self.offsets
    }
}

pub fn image_report(word: &NestedWord) -> Result<ImageReport, GridError> {
    let al = word.alphabet();
    if **al != CallReturnAlphabet::two_stack() {
        return Err(GridError::AlphabetMismatch);
    }
    Ok(ImageReport {
        shape: shape_matches(al, word.labels()),
        total_matching: word.pending().is_empty(),
        offsets: offsets_hold(word),
        offsets_by_formula: crate::logic::eval(word, &offsets_formula(), &Default::default())?,
    })
}

/// True iff `word` encodes some grid.
pub fn image_membership(word: &NestedWord) -> Result<bool, GridError> {
    let report = image_report(word)?;
    debug_assert_eq!(report.offsets, report.offsets_by_formula, "offset checks disagree on {}", word.string());
    Ok(report.is_member())
}
