mod common;

use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twostack::automata::{self, ProductMode};
use twostack::nested::is_well_formed;
use twostack::{fixtures, CallReturnAlphabet, NestedWord, SymbolId};

fn al() -> Arc<CallReturnAlphabet> {
    fixtures::two_stack()
}

fn word_strategy(max: usize) -> impl Strategy<Value = Vec<SymbolId>> {
    prop::collection::vec((0u16..4).prop_map(SymbolId), 1..=max)
}

fn nested(w: &[SymbolId]) -> NestedWord {
    NestedWord::new(al(), w.to_vec()).unwrap()
}

#[test]
fn oracles_reproduce_the_running_example() {
    let w = fixtures::running_word();
    let m = common::all_pairs_matching(&al(), w.labels());
    let expected = [(2, 4, 0), (0, 5, 0), (3, 7, 1), (1, 8, 1)].into_iter().collect();
    assert_eq!(m, expected);
    assert!(common::in_l_plus(&al(), w.labels()));
    let parse = |s: &str| al().parse_symbols(s).unwrap();
    assert!(common::in_l_plus(&al(), &parse("a b a~ a~ b~ b~ a b a~ a~ b~ b~")));
    assert!(!common::in_l_plus(&al(), &parse("a b a~ b~")));
    assert!(!common::in_l_plus(&al(), &parse("a~ a~ b~ b~")));
}

#[test]
fn search_oracles_on_fixtures() {
    let w = fixtures::running_word();
    assert!(common::mvpa_accepts_by_search(&fixtures::example_mvpa(), w.labels()));
    assert!(common::mnwa_accepts_by_search(&fixtures::example_mnwa(), &w));
    let unmatched = NestedWord::parse(&al(), "a b a~").unwrap();
    let calling = fixtures::calling_on_calls_mnwa();
    assert!(!common::mnwa_accepts_by_search(&calling, &unmatched));
    assert!(common::mnwa_accepts_by_search(&calling, &w));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn matching_equals_all_pairs(w in word_strategy(12)) {
        let nw = nested(&w);
        let got: std::collections::BTreeSet<_> = nw.matching().iter().map(|e| (e.call, e.ret, e.stack)).collect();
        prop_assert_eq!(got, common::all_pairs_matching(&al(), &w));
    }

    #[test]
    fn balanced_projection_equals_grammar(w in prop::collection::vec((0u16..4).prop_map(SymbolId), 0..=12), s in 0usize..2) {
        prop_assert_eq!(is_well_formed(&al(), s, &w), common::grammar_well_formed(&al(), s, &w));
    }

    #[test]
    fn string_round_trip(w in word_strategy(14)) {
        let nw = nested(&w);
        let again = NestedWord::parse(&al(), &nw.string()).unwrap();
        prop_assert_eq!(again.labels(), nw.labels());
        prop_assert_eq!(again.matching(), nw.matching());
    }

    #[test]
    fn degree_at_most_three_and_no_crossing(w in word_strategy(14)) {
        let nw = nested(&w);
        for i in 0..nw.len() {
            prop_assert!(nw.neighbors(i).count() <= 3);
        }
        let edges = nw.matching();
        for e in &edges {
            for f in &edges {
                if e.stack == f.stack && e.call < f.call {
                    let crosses = f.call < e.ret && e.ret < f.ret;
                    prop_assert!(!crosses, "{:?} crosses {:?}", e, f);
                }
            }
        }
    }

    #[test]
    fn distances_match_reference_search(w in word_strategy(12), seed in any::<usize>()) {
        let nw = nested(&w);
        let i = seed % w.len();
        let reference = common::distances(&al(), &w, i);
        for j in 0..w.len() {
            prop_assert_eq!(nw.distance(i, j).unwrap(), reference[j]);
            prop_assert_eq!(nw.distance(j, i).unwrap(), reference[j]);
        }
    }

    #[test]
    fn frontier_stack_heights_agree(seed in any::<u64>(), w in word_strategy(10)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = common::random_mvpa(&mut rng, &al(), 4);
        let mut f = a.start();
        for &sym in &w {
            f = a.step(&f, sym);
            let heights: std::collections::BTreeSet<Vec<usize>> =
                f.configs().iter().map(|c| c.stacks.iter().map(Vec::len).collect()).collect();
            prop_assert!(heights.len() <= 1);
        }
    }

    #[test]
    fn mvpa_simulation_equals_stack_search(seed in any::<u64>(), w in word_strategy(9)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = common::random_mvpa(&mut rng, &al(), 4);
        prop_assert_eq!(a.accepts_symbols(&w), common::mvpa_accepts_by_search(&a, &w));
    }

    #[test]
    fn mnwa_acceptance_equals_run_search(seed in any::<u64>(), generalized in any::<bool>(), w in word_strategy(8)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = common::random_mnwa(&mut rng, &al(), 3, generalized);
        let nw = nested(&w);
        prop_assert_eq!(b.accepts(&nw).unwrap(), common::mnwa_accepts_by_search(&b, &nw));
    }

    #[test]
    fn conversions_preserve_acceptance(seed in any::<u64>(), w in word_strategy(8)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = common::random_mvpa(&mut rng, &al(), 3);
        let b = common::random_mnwa(&mut rng, &al(), 3, false);
        let nw = nested(&w);
        prop_assert_eq!(a.accepts_symbols(&w), common::mnwa_accepts_by_search(&automata::mvpa_to_mnwa(&a), &nw));
        let back = automata::mnwa_to_mvpa(&b).unwrap();
        prop_assert_eq!(common::mvpa_accepts_by_search(&back, &w), common::mnwa_accepts_by_search(&b, &nw));
    }

    #[test]
    fn products_are_conjunction_and_disjunction(seed in any::<u64>(), w in word_strategy(7)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b1 = common::random_mnwa(&mut rng, &al(), 2, true);
        let b2 = common::random_mnwa(&mut rng, &al(), 3, true);
        let nw = nested(&w);
        let (x, y) = (common::mnwa_accepts_by_search(&b1, &nw), common::mnwa_accepts_by_search(&b2, &nw));
        let inter = automata::product(&b1, &b2, ProductMode::Intersection).unwrap();
        let union = automata::product(&b1, &b2, ProductMode::Union).unwrap();
        prop_assert_eq!(common::mnwa_accepts_by_search(&inter, &nw), x && y);
        prop_assert_eq!(common::mnwa_accepts_by_search(&union, &nw), x || y);
    }

    #[test]
    fn run_check_accepts_exactly_the_searched_runs(seed in any::<u64>(), w in word_strategy(5)) {
        // some run passes run_check iff the search oracle accepts
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = common::random_mnwa(&mut rng, &al(), 2, true);
        let nw = nested(&w);
        let n = w.len();
        let any_run = (0..1usize << n).any(|bits| {
            let run: Vec<usize> = (0..n).map(|i| bits >> i & 1).collect();
            b.run_check(&nw, &run).unwrap()
        });
        prop_assert_eq!(any_run, common::mnwa_accepts_by_search(&b, &nw));
    }
}

#[test]
fn product_identities_on_corpus() {
    let all = fixtures::accept_all_mnwa(al());
    let b = fixtures::example_mnwa();
    let has_a = fixtures::contains_mnwa(al(), "a");
    let has_b = fixtures::contains_mnwa(al(), "b");
    let with_all = automata::product(&b, &all, ProductMode::Intersection).unwrap();
    let twice = automata::product(&b, &b, ProductMode::Union).unwrap();
    let both = automata::product(&has_a, &has_b, ProductMode::Intersection).unwrap();
    let (a, bb) = (al().lookup("a").unwrap(), al().lookup("b").unwrap());
    for w in twostack::corpus::corpus(&al(), 6) {
        let nw = nested(&w);
        let base = b.accepts(&nw).unwrap();
        assert_eq!(with_all.accepts(&nw).unwrap(), base);
        assert_eq!(twice.accepts(&nw).unwrap(), base);
        assert_eq!(both.accepts(&nw).unwrap(), w.contains(&a) && w.contains(&bb), "{}", nw.string());
    }
}

#[test]
fn degeneralize_without_calling_states_keeps_the_language() {
    let b = fixtures::example_mnwa();
    let d = automata::degeneralize(&b);
    for w in twostack::corpus::corpus(&al(), 6) {
        let nw = nested(&w);
        assert_eq!(d.accepts(&nw).unwrap(), common::in_l_plus(&al(), &w));
    }
}
