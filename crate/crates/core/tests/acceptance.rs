//! End-to-end acceptance checks. Runs without the libtest harness and prints
//! one PASS/FAIL line per criterion; the process fails if any line is FAIL.

use std::collections::{BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use chainplex::categorial::{count_derivations, parse_lexicon, DeriveBounds};
use chainplex::containers::{load_pipeline, run_pipeline};
use chainplex::crosscheck::{crosscheck, random_pure_store};
use chainplex::engine::token_counts;
use chainplex::geometry::{embed, export_json, export_xyz, StyleMap, DEFAULT_ITERATIONS};
use chainplex::{
    consolidate, enumerate_complexes, format_chain, load_store, parse_chain_line, recognize,
    tokenize_sentence, validate, Chain, ChainStore, Complex, SearchConfig, Token, Witness,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SINGLE_RUN: Duration = Duration::from_secs(1);
const EXHAUSTIVE_RUN: Duration = Duration::from_secs(30);
const SWEEP_RUN: Duration = Duration::from_secs(300);
const SWEEP_STORES: usize = 50;
const SWEEP_SEED: u64 = 2024;
const SWEEP_LEN: usize = 4;
const ROUND_TRIPS: usize = 1000;

const GOLDEN: [(&str, &str); 10] = [
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

const REJECTS: [(&str, &str); 2] = [
    ("case.chains", "he loves he"),
    ("svo.chains", "eat cows grass"),
];

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(data(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn store(name: &str) -> ChainStore {
    load_store(&read(name)).unwrap()
}

fn s() -> Token {
    Token::category("S").unwrap()
}

fn sentence_cfg() -> SearchConfig {
    SearchConfig::default().with_target(s())
}

fn timed<T>(limit: Duration, what: &str, f: impl FnOnce() -> T) -> T {
    let t = Instant::now();
    let out = f();
    let took = t.elapsed();
    assert!(took <= limit, "{what} took {took:?}, limit {limit:?}");
    out
}

/// Odd occurrence total and exactly one odd label, the dangling one.
fn parity_holds(w: &Witness) -> bool {
    let counts = token_counts(&w.complex);
    let odd: Vec<&Token> = counts
        .iter()
        .filter(|(_, &n)| n % 2 == 1)
        .map(|(t, _)| t)
        .collect();
    w.complex.occurrence_count() % 2 == 1 && odd.len() == 1 && Some(odd[0]) == w.dangling()
}

struct Witnesses(Vec<(String, Witness)>);

fn golden_accepts(seen: &mut Witnesses) {
    for (file, sentence) in GOLDEN {
        let st = store(file);
        let fresh = tokenize_sentence(sentence).unwrap();
        let cfg = sentence_cfg();
        let r = timed(SINGLE_RUN, sentence, || recognize(&fresh, &st, &cfg));
        assert!(r.accepted, "{sentence} rejected");
        assert_eq!(r.conclusions, BTreeSet::from([s()]), "{sentence}");
        for w in &r.witnesses {
            assert!(
                validate(&w.complex, &fresh, &st, &cfg).unwrap().valid,
                "{sentence}"
            );
            seen.0.push((sentence.to_string(), w.clone()));
        }
    }
    let bats = store("bats.chains");
    let r = recognize(
        &tokenize_sentence("bats sing").unwrap(),
        &bats,
        &sentence_cfg(),
    );
    assert_eq!(
        r.witnesses[0].complex.chain_multiset(&bats),
        vec![0, 1, 2],
        "bats sing uses each stored chain once"
    );
    let analogy = store("analogy.chains");
    assert!(analogy
        .chains()
        .iter()
        .all(|c| !c.body.contains(&Token::word("beans").unwrap())
            || c.conclusion != Some(Token::category("NP").unwrap())));
}

fn golden_rejects(seen: &mut Witnesses) {
    let cfg = sentence_cfg().with_bounds(9, 3);
    for (file, sentence) in REJECTS {
        let st = store(file);
        let fresh = tokenize_sentence(sentence).unwrap();
        let r = timed(EXHAUSTIVE_RUN, sentence, || recognize(&fresh, &st, &cfg));
        assert!(!r.accepted, "{sentence} accepted");
        let all: Vec<Witness> = timed(EXHAUSTIVE_RUN, sentence, || {
            enumerate_complexes(&fresh, &st, &cfg).collect()
        });
        assert!(
            all.is_empty(),
            "oracle found {} witnesses for {sentence}",
            all.len()
        );
        seen.0
            .extend(all.into_iter().map(|w| (sentence.to_string(), w)));
    }
}

fn ablation() {
    let st = store("case.chains");
    let fresh = tokenize_sentence("he loves he").unwrap();
    let cfg = SearchConfig {
        enforce_span: false,
        ..sentence_cfg()
    };
    let r = timed(SINGLE_RUN, "he loves he without the span rule", || {
        recognize(&fresh, &st, &cfg)
    });
    assert!(r.accepted, "still rejected without the span rule");
    let w = &r.witnesses[0];
    assert!(
        !validate(&w.complex, &fresh, &st, &sentence_cfg())
            .unwrap()
            .valid,
        "witness should need the ablation"
    );
}

fn multiplicity(seen: &mut Witnesses) {
    let st = store("case.chains");
    let fresh = tokenize_sentence("he loves him").unwrap();
    let cfg = sentence_cfg().with_bounds(8, 3);
    let all: Vec<Witness> = timed(SINGLE_RUN, "he loves him", || {
        enumerate_complexes(&fresh, &st, &cfg).collect()
    });
    let distinct: HashSet<Complex> = all.iter().map(|w| w.complex.canonical()).collect();
    assert!(
        distinct.len() >= 2,
        "only {} distinct witnesses",
        distinct.len()
    );
    // one witness joins "he loves" under the nominative pattern, another
    // "loves him" under the accusative one
    let uses = |id: &str| {
        let k = st.index_of(id).unwrap();
        all.iter()
            .any(|w| w.complex.chain_multiset(&st).contains(&k))
    };
    let nominative = st
        .chains()
        .iter()
        .find(|c| format_chain(c) == "NP1 - V2 - NP -> S")
        .unwrap();
    let accusative = st
        .chains()
        .iter()
        .find(|c| format_chain(c) == "NP - V2 - NP4 -> S")
        .unwrap();
    assert!(uses(&nominative.id) && uses(&accusative.id));
    seen.0
        .extend(all.into_iter().map(|w| ("he loves him".to_string(), w)));
}

fn categorial_parity() {
    let bounds = DeriveBounds::default();
    let count = |types: &str, sentence: &str| {
        let lex = parse_lexicon(&read(types)).unwrap();
        let words: Vec<&str> = sentence.split_whitespace().collect();
        let target = lex.parse_type("S").unwrap();
        timed(SINGLE_RUN, sentence, || {
            count_derivations(&lex, &words, &target, &bounds).unwrap()
        })
    };
    assert!(count("basic.types", "birds sing") >= 1);
    assert!(count("adj.types", "brown cows eat grass") >= 2);
    assert!(count("case.types", "he loves Mary") >= 1);
    assert!(count("case.types", "he loves him") >= 2);
    assert_eq!(count("case.types", "he loves he"), 0);

    let st = store("case.chains");
    for sentence in [
        "he loves Mary",
        "Mary loves him",
        "he loves him",
        "he loves he",
        "Mary loves Mary",
    ] {
        let derived = count("case.types", sentence) > 0;
        let fresh = tokenize_sentence(sentence).unwrap();
        let recognized = recognize(&fresh, &st, &sentence_cfg()).accepted;
        assert_eq!(derived, recognized, "engines disagree on {sentence}");
    }
}

fn soundness_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(SWEEP_SEED);
    let stores: Vec<ChainStore> = (0..SWEEP_STORES)
        .map(|_| random_pure_store(&mut rng, 6, 4, 3))
        .collect();
    let (violations, checked) = timed(SWEEP_RUN, "sweep", || {
        let mut violations = Vec::new();
        let mut checked = 0;
        for st in &stores {
            let r = crosscheck(st, SWEEP_LEN, &s(), &SearchConfig::default()).unwrap();
            checked += r.sentences.len();
            violations.extend(r.violations().map(|v| v.words.join(" ")));
        }
        (violations, checked)
    });
    assert!(checked > 0);
    assert!(violations.is_empty(), "violations: {violations:?}");
}

fn parity_invariant(seen: &Witnesses) {
    assert!(!seen.0.is_empty());
    for (sentence, w) in &seen.0 {
        assert!(parity_holds(w), "parity broken in a witness for {sentence}");
    }
}

fn pipeline() {
    let p = load_pipeline(&data("dutch.pipeline")).unwrap();
    let sentence = "geiten haten kinderen die lawaai maken";
    let r = timed(SINGLE_RUN, sentence, || run_pipeline(&p, sentence).unwrap());
    assert!(r.accepted);
    let trace: Vec<(&str, (usize, usize), String)> = r
        .trace
        .iter()
        .map(|t| (t.container.as_str(), t.span, t.token.to_string()))
        .collect();
    assert_eq!(
        trace,
        vec![
            ("cp", (4, 6), "CP".to_string()),
            ("s", (1, 4), "S".to_string())
        ]
    );
    let single = recognize(
        &tokenize_sentence(sentence).unwrap(),
        &store("dutch.chains"),
        &sentence_cfg(),
    );
    assert!(single.accepted);
}

fn learning_loop() {
    let full = store("bats.chains");
    let bats_fly = tokenize_sentence("bats fly").unwrap();
    let kept: Vec<Chain> = full
        .chains()
        .iter()
        .filter(|c| !(c.body == bats_fly.body && c.conclusion == Some(s())))
        .cloned()
        .collect();
    assert_eq!(kept.len(), full.len() - 1);
    let before = ChainStore::from_chains(kept).unwrap();
    let bats_sing = tokenize_sentence("bats sing").unwrap();
    assert!(!recognize(&bats_sing, &before, &sentence_cfg()).accepted);
    let after = consolidate(&before, &bats_fly, &s()).unwrap();
    assert!(recognize(&bats_sing, &after, &sentence_cfg()).accepted);
    // the learned store survives a trip through its file form
    assert_eq!(load_store(&after.to_text()).unwrap(), after);
}

fn random_token(rng: &mut ChaCha8Rng) -> Token {
    const WORD: &[char] = &[
        'a', 'b', 'z', 'Q', '\'', '-', '>', '#', 'é', 'ß', '1', '.', ',',
    ];
    const CAT: &[char] = &['A', 'b', 'N', 'P', '_', '1', '4', 'z'];
    if rng.gen_bool(0.5) {
        let n = rng.gen_range(1..6);
        let label: String = (0..n).map(|_| WORD[rng.gen_range(0..WORD.len())]).collect();
        Token::word(&label).unwrap()
    } else {
        let n = rng.gen_range(0..5);
        let first = ['A', 'N', 'S', 'v'][rng.gen_range(0..4)];
        let label: String = std::iter::once(first)
            .chain((0..n).map(|_| CAT[rng.gen_range(0..CAT.len())]))
            .collect();
        Token::category(&label).unwrap()
    }
}

fn round_trips(seen: &Witnesses) {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..ROUND_TRIPS {
        let len = rng.gen_range(1..6);
        let body: Vec<Token> = (0..len).map(|_| random_token(&mut rng)).collect();
        let conclusion = rng.gen_bool(0.6).then(|| loop {
            let t = random_token(&mut rng);
            if t.is_category() {
                break t;
            }
        });
        let chain = Chain::new("", body, conclusion).unwrap();
        let text = format_chain(&chain);
        let back = parse_chain_line(&text).unwrap().unwrap();
        assert_eq!(back, chain, "{text}");
    }
    let style = StyleMap::default();
    // one witness per golden sentence, as found by the first criterion
    let mut done = BTreeSet::new();
    for (sentence, w) in &seen.0 {
        if !GOLDEN.iter().any(|(_, g)| g == sentence) || !done.insert(sentence) {
            continue;
        }
        let a = embed(&w.complex, &w.positions, 7, DEFAULT_ITERATIONS);
        let b = embed(&w.complex, &w.positions, 7, DEFAULT_ITERATIONS);
        let xyz = export_xyz(&a, &w.complex, &style);
        assert_eq!(xyz, export_xyz(&b, &w.complex, &style), "{sentence}");
        assert_eq!(
            export_json(&w.complex, Some(&a), &w.positions),
            export_json(&w.complex, Some(&b), &w.positions)
        );
        let classes = w.complex.occurrence_count() - w.complex.bonds.len();
        let atoms: usize = xyz.lines().next().unwrap().parse().unwrap();
        assert_eq!(atoms, classes, "{sentence}");
        assert_eq!(xyz.lines().count(), atoms + 2);
    }
}

fn main() {
    let mut seen = Witnesses(Vec::new());
    let mut failed = 0;
    let mut run = |n: usize, name: &str, f: &mut dyn FnMut(&mut Witnesses)| {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| f(&mut seen)));
        let verdict = if outcome.is_ok() { "PASS" } else { "FAIL" };
        if outcome.is_err() {
            failed += 1;
        }
        println!("criterion {n:>2} {verdict} {name} ({:.2?})", t.elapsed());
    };
    run(1, "golden accepts", &mut golden_accepts);
    run(2, "golden rejects", &mut golden_rejects);
    run(3, "span rule ablation", &mut |_| ablation());
    run(4, "witness multiplicity", &mut multiplicity);
    run(5, "categorial parity", &mut |_| categorial_parity());
    run(6, "soundness sweep", &mut |_| soundness_sweep());
    run(7, "parity invariant", &mut |w| parity_invariant(w));
    run(8, "container pipeline", &mut |_| pipeline());
    run(9, "learning loop", &mut |_| learning_loop());
    run(10, "round trips and determinism", &mut |w| round_trips(w));
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
