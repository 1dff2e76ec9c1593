use std::path::Path;

use chainplex::engine::{enumerate_complexes, recognize, validate, SearchConfig};
use chainplex::{load_store, tokenize_sentence, ChainStore, Complex, Token};

fn store(name: &str) -> ChainStore {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name);
    load_store(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn s() -> Token {
    Token::category("S").unwrap()
}

#[test]
fn golden_sentences_are_recognized() {
    let cases = [
        ("svo.chains", "cows eat grass"),
        ("adj.chains", "brown cows eat grass"),
        ("mixed.chains", "it's okay to eat grass"),
        ("analogy.chains", "cows hate beans"),
        ("bats.chains", "bats sing"),
        ("case.chains", "he loves Mary"),
        ("case.chains", "Mary loves him"),
        ("case.chains", "he loves him"),
        (
            "golden_line.chains",
            "aurea purpuream subnectit fibula vestem",
        ),
        ("dutch.chains", "geiten haten kinderen die lawaai maken"),
    ];
    for (file, sentence) in cases {
        let st = store(file);
        let fresh = tokenize_sentence(sentence).unwrap();
        let t = std::time::Instant::now();
        let r = recognize(&fresh, &st, &SearchConfig::default());
        eprintln!(
            "{sentence}: {:?} {:?}",
            t.elapsed(),
            r.witnesses.first().map(|w| w.complex.instances.len())
        );
        assert!(r.accepted, "{sentence}");
        assert!(r.conclusions.contains(&s()), "{sentence}");
        let w = &r.witnesses[0];
        assert!(
            validate(&w.complex, &fresh, &st, &SearchConfig::default())
                .unwrap()
                .valid
        );
    }
}

#[test]
fn case_rejects() {
    let st = store("case.chains");
    let fresh = tokenize_sentence("he loves he").unwrap();
    let r = recognize(&fresh, &st, &SearchConfig::default());
    assert!(!r.accepted);
    let cfg = SearchConfig::default();
    assert_eq!(enumerate_complexes(&fresh, &st, &cfg).count(), 0);
}

#[test]
fn smallest_witness_sizes() {
    let cases = [
        ("svo.chains", "cows eat grass", 5),
        ("adj.chains", "brown cows eat grass", 7),
        ("bats.chains", "bats sing", 4),
        ("case.chains", "he loves him", 7),
        (
            "golden_line.chains",
            "aurea purpuream subnectit fibula vestem",
            9,
        ),
        ("dutch.chains", "geiten haten kinderen die lawaai maken", 9),
    ];
    let cfg = SearchConfig::default().with_target(s());
    for (file, sentence, size) in cases {
        let st = store(file);
        let fresh = tokenize_sentence(sentence).unwrap();
        let r = recognize(&fresh, &st, &cfg);
        assert_eq!(r.witnesses[0].complex.instances.len(), size, "{sentence}");
        let smaller = cfg.clone().with_bounds(size - 1, 3);
        assert!(!recognize(&fresh, &st, &smaller).accepted, "{sentence}");
    }
}

#[test]
fn search_and_oracle_list_the_same_case_complexes() {
    let st = store("case.chains");
    let cfg = SearchConfig::all().with_bounds(8, 3);
    for sentence in [
        "he loves Mary",
        "Mary loves him",
        "he loves him",
        "Mary loves Mary",
    ] {
        let fresh = tokenize_sentence(sentence).unwrap();
        let fast: Vec<Complex> = recognize(&fresh, &st, &cfg)
            .witnesses
            .into_iter()
            .map(|w| w.complex)
            .collect();
        let slow: Vec<Complex> = enumerate_complexes(&fresh, &st, &cfg)
            .map(|w| w.complex)
            .collect();
        assert!(!fast.is_empty(), "{sentence}");
        assert!(fast == slow, "{sentence}: {} vs {}", fast.len(), slow.len());
    }
}

#[test]
fn single_word_closes_into_its_category() {
    let st = load_store("\"cows\" -> NP\n").unwrap();
    let fresh = tokenize_sentence("cows").unwrap();
    let np = Token::category("NP").unwrap();
    let r = recognize(&fresh, &st, &SearchConfig::default());
    assert_eq!(r.witnesses.len(), 1);
    assert_eq!(r.witnesses[0].complex.occurrence_count(), 3);
    assert_eq!(r.witnesses[0].dangling(), Some(&np));
    // with more copies the chain can also echo through itself: the first
    // copy's NP bonds to a second copy, whose word bonds to a third
    let single = SearchConfig::default().with_bounds(9, 1);
    assert_eq!(enumerate_complexes(&fresh, &st, &single).count(), 1);
    let all: Vec<_> = enumerate_complexes(&fresh, &st, &SearchConfig::default()).collect();
    assert_eq!(all.len(), 2);
    assert_eq!(all[1].complex.instances.len(), 4);
    assert!(all.iter().all(|w| w.dangling() == Some(&np)));

    let fresh = tokenize_sentence("cows eat grass").unwrap();
    assert_eq!(
        enumerate_complexes(&fresh, &ChainStore::new(), &SearchConfig::default()).count(),
        0
    );
}
