//! `twostack`: command-line front end for nested words, their automata,
//! spheres, logic, grids and direction strings.
//!
//! Exit codes: 0 success or accept, 1 reject or failed property, 2 usage or
//! input error.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use twostack::automata::{self, AutomatonFile, Mnwa, MnwaSpec, Mvpa, MvpaSpec, ProductMode};
use twostack::circularity::{self, CircularityVerdict};
use twostack::grids;
use twostack::logic::{self, Assignment, ConstraintExpr, Formula};
use twostack::sphere_automaton::SphereAutomaton;
use twostack::spheres::Sphere;
use twostack::{corpus, CallReturnAlphabet, NestedWord};

#[derive(Parser, Debug)]
#[command(name = "twostack", version, about = "Nested words over multi-stack call-return alphabets")]
struct Cli {
    /// Alphabet JSON file; defaults to the two-stack alphabet a a~ b b~.
    #[arg(long, global = true)]
    alphabet: Option<PathBuf>,
    /// Upper bound on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the matching relation of a word.
    Nest {
        word: PathBuf,
        #[arg(long)]
        dot: bool,
    },
    /// Run an automaton (MVPA or MNWA) on a word.
    Simulate { automaton: PathBuf, word: PathBuf },
    /// Convert an MVPA to an MNWA or the other way round.
    Convert { automaton: PathBuf },
    /// Remove calling states from a generalized MNWA.
    Degeneralize { automaton: PathBuf },
    /// Union or intersection of two MNWA.
    Product {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, value_enum, default_value = "intersection")]
        mode: Mode,
    },
    /// Spheres of a word.
    Spheres {
        word: PathBuf,
        #[arg(long)]
        radius: usize,
        /// 1-based position; without it every position is listed.
        #[arg(long)]
        position: Option<usize>,
        #[arg(long)]
        dot: bool,
        #[arg(long)]
        json: bool,
    },
    /// Canonical run of the sphere automaton on a word, with verification.
    SphereRun {
        word: PathBuf,
        #[arg(long)]
        radius: usize,
    },
    /// Evaluate a formula on a word.
    Eval {
        word: PathBuf,
        formula: PathBuf,
        /// Largest word length for set quantifiers.
        #[arg(long, default_value_t = logic::DEFAULT_SO_LIMIT)]
        so_limit: usize,
    },
    /// Compile a sphere-count constraint and compare it with direct counting.
    CompileCount {
        expr: PathBuf,
        #[arg(long)]
        radius: usize,
        /// Directory of word files (one word per line) to check.
        #[arg(long)]
        check_against_corpus: Option<PathBuf>,
        /// Check every word up to this length.
        #[arg(long)]
        max_len: Option<usize>,
        /// Decide a single word.
        #[arg(long)]
        word: Option<PathBuf>,
    },
    /// Grid encodings.
    Grid {
        #[command(subcommand)]
        command: GridCommand,
    },
    /// Bounded circularity check for a direction string.
    Circular {
        directions: PathBuf,
        #[arg(long, default_value_t = 20)]
        bound: usize,
        /// Also print the topological translation.
        #[arg(long)]
        topo: bool,
    },
    /// All words of length 1..=L in length-lexicographic order.
    Corpus { max_len: usize },
}

#[derive(Subcommand, Debug)]
enum GridCommand {
    Encode {
        n: usize,
        m: usize,
        #[arg(long)]
        dot: bool,
    },
    Verify {
        n: usize,
        m: usize,
    },
    Member {
        word: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Union,
    Intersection,
}

/// A failure that maps to exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type Outcome = Result<(String, u8), InputError>;

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_alphabet(path: Option<&Path>) -> Result<Arc<CallReturnAlphabet>, InputError> {
    match path {
        None => Ok(Arc::new(CallReturnAlphabet::two_stack())),
        Some(p) => Ok(Arc::new(CallReturnAlphabet::from_json(&read(p)?).map_err(InputError)?)),
    }
}

/// Accepts `ā` and `b̄` (precomposed or with a combining macron) for `a~` and `b~`.
fn normalize(alphabet: &CallReturnAlphabet, token: &str) -> String {
    if alphabet.lookup(token).is_ok() {
        return token.to_string();
    }
    if let Some(base) = token.strip_suffix('\u{304}') {
        return format!("{base}~");
    }
    match token {
        "\u{101}" => "a~".to_string(),
        _ => token.to_string(),
    }
}

fn parse_word(alphabet: &Arc<CallReturnAlphabet>, text: &str) -> Result<NestedWord, InputError> {
    let tokens: Vec<String> = text.split_whitespace().map(|t| normalize(alphabet, t)).collect();
    Ok(NestedWord::parse(alphabet, &tokens.join(" "))?)
}

fn read_word(alphabet: &Arc<CallReturnAlphabet>, path: &Path) -> Result<NestedWord, InputError> {
    parse_word(alphabet, &read(path)?)
}

enum Automaton {
    Mvpa(Mvpa),
    Mnwa(Mnwa),
}

fn load_automaton(path: &Path) -> Result<Automaton, InputError> {
    Ok(match AutomatonFile::parse(&read(path)?).map_err(InputError)? {
        AutomatonFile::Mvpa(spec) => Automaton::Mvpa(spec.build()?),
        AutomatonFile::Mnwa(spec) => Automaton::Mnwa(spec.build()?),
    })
}

fn load_mnwa(path: &Path) -> Result<Mnwa, InputError> {
    match load_automaton(path)? {
        Automaton::Mnwa(b) => Ok(b),
        Automaton::Mvpa(_) => Err(InputError(format!("{}: expected an mnwa", path.display()))),
    }
}

fn verdict(accept: bool) -> (String, u8) {
    (if accept { "ACCEPT\n" } else { "REJECT\n" }.to_string(), u8::from(!accept))
}

fn run(cli: Cli) -> Outcome {
    let alphabet = load_alphabet(cli.alphabet.as_deref())?;
    let mut out = String::new();
    match cli.command {
        Command::Nest { word, dot } => {
            let w = read_word(&alphabet, &word)?;
            if dot {
                return Ok((w.to_dot(), 0));
            }
            writeln!(out, "word: {}", w.string())?;
            writeln!(out, "length: {}", w.len())?;
            let edges: Vec<String> = w
                .matching()
                .iter()
                .map(|e| format!("({},{},{})", e.call + 1, e.ret + 1, e.stack + 1))
                .collect();
            writeln!(out, "matching: {}", edges.join(" "))?;
            let pending: Vec<String> = w.pending().iter().map(|p| (p + 1).to_string()).collect();
            writeln!(out, "pending: {}", pending.join(" "))?;
        }
        Command::Simulate { automaton, word } => {
            let accept = match load_automaton(&automaton)? {
                Automaton::Mvpa(a) => {
                    let w = read_word(a.alphabet(), &word)?;
                    a.accepts_symbols(w.labels())
                }
                Automaton::Mnwa(b) => {
                    let w = read_word(b.alphabet(), &word)?;
                    b.accepts(&w)?
                }
            };
            return Ok(verdict(accept));
        }
        Command::Convert { automaton } => {
            let converted = match load_automaton(&automaton)? {
                Automaton::Mvpa(a) => AutomatonFile::Mnwa(MnwaSpec::from_mnwa(&automata::mvpa_to_mnwa(&a))),
                Automaton::Mnwa(b) => AutomatonFile::Mvpa(MvpaSpec::from_mvpa(&automata::mnwa_to_mvpa(&b)?)),
            };
            writeln!(out, "{}", converted.to_json())?;
        }
        Command::Degeneralize { automaton } => {
            let b = load_mnwa(&automaton)?;
            writeln!(out, "{}", AutomatonFile::Mnwa(MnwaSpec::from_mnwa(&automata::degeneralize(&b))).to_json())?;
        }
        Command::Product { left, right, mode } => {
            let mode = match mode {
                Mode::Union => ProductMode::Union,
                Mode::Intersection => ProductMode::Intersection,
            };
            let p = automata::product(&load_mnwa(&left)?, &load_mnwa(&right)?, mode)?;
            writeln!(out, "{}", AutomatonFile::Mnwa(MnwaSpec::from_mnwa(&p)).to_json())?;
        }
        Command::Spheres {
            word,
            radius,
            position,
            dot,
            json,
        } => {
            let w = read_word(&alphabet, &word)?;
            let positions: Vec<usize> = match position {
                Some(0) => return Err(InputError("positions are 1-based".into())),
                Some(p) => vec![p - 1],
                None => (0..w.len()).collect(),
            };
            for p in positions {
                let s = Sphere::around(&w, p, radius)?;
                if dot {
                    out.push_str(&s.to_dot(&alphabet));
                } else if json {
                    writeln!(out, "{}", serde_json::to_string(&s.to_file(&alphabet))?)?;
                } else {
                    writeln!(out, "{}: size={} {}", p + 1, s.len(), s.canonical_string(&alphabet))?;
                }
            }
        }
        Command::SphereRun { word, radius } => {
            let w = read_word(&alphabet, &word)?;
            let b = SphereAutomaton::new(alphabet.clone(), radius);
            let coloring = b.chi_coloring(&w);
            let run = b.canonical_run(&w);
            for (i, state) in run.iter().enumerate() {
                let eta = b.eta(state)?;
                let agrees = eta == Sphere::around(&w, i, radius)?;
                writeln!(
                    out,
                    "{}: members={} color={} sphere={}",
                    i + 1,
                    state.len(),
                    coloring.colors[i],
                    if agrees { "ok" } else { "WRONG" }
                )?;
            }
            writeln!(out, "colors: {}", coloring.color_count())?;
            writeln!(out, "max-degree: {}", coloring.max_degree)?;
            let ok = b.verify_run(&w, &run);
            match &ok {
                Ok(()) => writeln!(out, "verify: ok")?,
                Err(v) => writeln!(out, "verify: {v}")?,
            }
            return Ok((out, u8::from(ok.is_err())));
        }
        Command::Eval { word, formula, so_limit } => {
            let w = read_word(&alphabet, &word)?;
            let f = Formula::parse(&read(&formula)?)?;
            let holds = logic::eval_with_limit(&w, &f, &Assignment::default(), so_limit)?;
            writeln!(out, "{holds}")?;
            return Ok((out, u8::from(!holds)));
        }
        Command::CompileCount {
            expr,
            radius,
            check_against_corpus,
            max_len,
            word,
        } => {
            let constraint = ConstraintExpr::parse(&read(&expr)?)?.resolve(&alphabet)?;
            let acceptor = logic::compile_constraint(&constraint, alphabet.clone(), radius)?;
            if let Some(path) = word {
                let w = read_word(&alphabet, &path)?;
                return Ok(verdict(acceptor.accepts(&w)));
            }
            let mut words = Vec::new();
            if let Some(dir) = check_against_corpus {
                let mut files: Vec<PathBuf> = fs::read_dir(&dir)
                    .map_err(|e| InputError(format!("{}: {e}", dir.display())))?
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| p.is_file())
                    .collect();
                files.sort();
                for f in files {
                    for line in read(&f)?.lines().filter(|l| !l.trim().is_empty()) {
                        words.push(parse_word(&alphabet, line)?);
                    }
                }
            }
            if let Some(len) = max_len {
                for w in corpus::corpus(&alphabet, len) {
                    words.push(NestedWord::new(alphabet.clone(), w)?);
                }
            }
            if words.is_empty() {
                return Err(InputError("give --word, --max-len or --check-against-corpus".into()));
            }
            use rayon::prelude::*;
            let disagreements: Vec<&NestedWord> = words
                .par_iter()
                .filter(|w| acceptor.accepts(w) != logic::direct_count_verdict(&constraint, w))
                .collect();
            let accepted = words.par_iter().filter(|w| acceptor.accepts(w)).count();
            writeln!(out, "words: {}", words.len())?;
            writeln!(out, "accepted: {accepted}")?;
            writeln!(out, "disagreements: {}", disagreements.len())?;
            if let Some(w) = disagreements.first() {
                writeln!(out, "first-disagreement: {}", w.string())?;
            }
            return Ok((out, u8::from(!disagreements.is_empty())));
        }
        Command::Grid { command } => match command {
            GridCommand::Encode { n, m, dot } => {
                if n == 0 || m == 0 {
                    return Err(InputError("grid dimensions must be positive".into()));
                }
                let enc = grids::encode(n, m);
                if dot {
                    return Ok((enc.word.to_dot(), 0));
                }
                writeln!(out, "word: {}", enc.word.string())?;
                writeln!(out, "length: {}", enc.word.len())?;
                for (i, j) in enc.grid.nodes() {
                    writeln!(out, "({i},{j}): {} {}", enc.chi_bar(1, i, j) + 1, enc.chi_bar(2, i, j) + 1)?;
                }
            }
            GridCommand::Verify { n, m } => {
                let report = grids::verify_reduction(n, m)?;
                writeln!(out, "checks: {}", report.checks)?;
                match &report.failure {
                    None => writeln!(out, "result: ok")?,
                    Some(f) => {
                        let tuple: Vec<String> = f.tuple.iter().map(|(k, (i, j))| format!("({k},({i},{j}))")).collect();
                        writeln!(out, "result: FAILED {}", f.condition)?;
                        writeln!(out, "tuple: {}", tuple.join(" "))?;
                        writeln!(out, "grid: {} word: {}", f.grid_side, f.word_side)?;
                    }
                }
                return Ok((out, u8::from(!report.is_success())));
            }
            GridCommand::Member { word } => {
                let w = read_word(&alphabet, &word)?;
                let r = grids::image_report(&w)?;
                writeln!(out, "shape: {}", r.shape)?;
                writeln!(out, "total-matching: {}", r.total_matching)?;
                writeln!(out, "offsets: {}", r.offsets)?;
                out.push_str(if r.is_member() { "MEMBER\n" } else { "NOT MEMBER\n" });
                return Ok((out, u8::from(!r.is_member())));
            }
        },
        Command::Circular { directions, bound, topo } => {
            let w = circularity::parse_directions(&read(&directions)?)?;
            if topo {
                writeln!(out, "topo: {}", circularity::render_topo(&circularity::f_map(&w)))?;
            }
            return match circularity::is_circular(&w, bound)? {
                CircularityVerdict::Circular(wit) => {
                    writeln!(out, "CIRCULAR")?;
                    writeln!(out, "witness: {}", wit.word.string())?;
                    writeln!(out, "start: {}", wit.start + 1)?;
                    Ok((out, 0))
                }
                CircularityVerdict::NotCircular { bound } => {
                    writeln!(out, "NOT CIRCULAR (bound={bound})")?;
                    Ok((out, 1))
                }
            };
        }
        Command::Corpus { max_len } => {
            if max_len == 0 {
                return Err(InputError("length bound must be at least 1".into()));
            }
            for w in corpus::corpus(&alphabet, max_len) {
                writeln!(out, "{}", alphabet.render(&w))?;
            }
        }
    }
    Ok((out, 0))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code)
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
