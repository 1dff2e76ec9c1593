//! Differential check of a pure store against its context-free reading.
//!
//! Every sentence the grammar derives must also close into a complex. The
//! opposite direction is expected to fail now and then: complexes accept by
//! analogy, which a grammar cannot. Those cases are collected, not flagged.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::chain::{Chain, ChainStore, Token};
use crate::engine::{cky_reference, recognize, tree_to_complex, SearchConfig};
use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Verdict {
    /// Both accept or both reject.
    Agree,
    /// The grammar derives the sentence, the complex search does not, and
    /// the complex built from the parse tree fits the search bounds.
    Violation,
    /// The grammar derives the sentence but its tree complex is larger than
    /// the search bounds allow.
    BoundLimited,
    /// Accepted by complexes only.
    Analogy,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceReport {
    pub words: Vec<String>,
    pub cfg: bool,
    pub complex: bool,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CrosscheckReport {
    pub sentences: Vec<SentenceReport>,
}

impl CrosscheckReport {
    pub fn count(&self, v: Verdict) -> usize {
        self.sentences.iter().filter(|s| s.verdict == v).count()
    }

    pub fn violations(&self) -> impl Iterator<Item = &SentenceReport> {
        self.sentences
            .iter()
            .filter(|s| s.verdict == Verdict::Violation)
    }

    /// One line per sentence: `words<TAB>cfg:0|1<TAB>complex:0|1`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.sentences {
            let _ = writeln!(
                out,
                "{}\tcfg:{}\tcomplex:{}",
                s.words.join(" "),
                u8::from(s.cfg),
                u8::from(s.complex)
            );
        }
        out
    }
}

/// Distinct words of the store's word chains, in store order.
pub fn vocabulary(store: &ChainStore) -> Vec<Token> {
    let mut out: Vec<Token> = Vec::new();
    for c in store.chains() {
        for t in &c.body {
            if t.is_word() && !out.contains(t) {
                out.push(t.clone());
            }
        }
    }
    out
}

/// Every word sequence of length 1 to `max_len`, shorter first, then in
/// vocabulary order.
pub fn sentences(vocabulary: &[Token], max_len: usize) -> Vec<Vec<Token>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Token>> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|prefix| {
                vocabulary.iter().map(move |w| {
                    let mut s = prefix.clone();
                    s.push(w.clone());
                    s
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Runs both recognizers over all sentences up to `max_len` words, asking
/// each whether the sentence is a `target`.
pub fn crosscheck(
    store: &ChainStore,
    max_len: usize,
    target: &Token,
    search: &SearchConfig,
) -> Result<CrosscheckReport, Error> {
    if let Some(bad) = store.chains().iter().find(|c| !c.is_pure()) {
        return Err(Error::ImpureStore(bad.id.clone()));
    }
    let search = search.clone().with_target(target.clone());
    let all = sentences(&vocabulary(store), max_len);
    let sentences = all
        .par_iter()
        .map(|words| -> Result<SentenceReport, Error> {
            let fresh = Chain::new("fresh", words.clone(), None)?;
            let cky = cky_reference(&fresh, store)?;
            let cfg = cky.accepts_as(target);
            let complex = recognize(&fresh, store, &search).accepted;
            let verdict = match (cfg, complex) {
                (true, false) => {
                    let tree = cky.tree(target).expect("accepted category has a tree");
                    let x = tree_to_complex(&tree, &fresh, store)?;
                    if search.admits(&x) {
                        Verdict::Violation
                    } else {
                        Verdict::BoundLimited
                    }
                }
                (false, true) => Verdict::Analogy,
                _ => Verdict::Agree,
            };
            Ok(SentenceReport {
                words: words.iter().map(|t| t.label.clone()).collect(),
                cfg,
                complex,
                verdict,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CrosscheckReport { sentences })
}

/// A small random grammar: up to `max_words` words over up to
/// `max_categories` categories (always including `S`) and up to
/// `max_patterns` category patterns of one to three tokens.
pub fn random_pure_store<R: Rng>(
    rng: &mut R,
    max_words: usize,
    max_categories: usize,
    max_patterns: usize,
) -> ChainStore {
    const NAMES: [&str; 6] = ["S", "A", "B", "C", "D", "E"];
    let n_cats = rng.gen_range(1..=max_categories.clamp(1, NAMES.len()));
    let cats: Vec<Token> = NAMES[..n_cats]
        .iter()
        .map(|c| Token::category(c).expect("valid"))
        .collect();
    let n_words = rng.gen_range(1..=max_words.max(1));
    let mut store = ChainStore::new();
    let push = |store: &mut ChainStore, body: Vec<Token>, conclusion: Token| {
        let id = store.next_id();
        let chain = Chain::new(id, body, Some(conclusion)).expect("non-empty body");
        if !store.contains_content(&chain.body, chain.conclusion.as_ref()) {
            store.push(chain).expect("fresh id");
        }
    };
    for w in 0..n_words {
        let word = Token::word(&format!("w{}", w + 1)).expect("valid");
        let k = if rng.gen_bool(0.25) { 2 } else { 1 };
        for c in cats.choose_multiple(rng, k.min(cats.len())) {
            push(&mut store, vec![word.clone()], c.clone());
        }
    }
    let n_patterns = rng.gen_range(1..=max_patterns.max(1));
    for p in 0..n_patterns {
        let len = rng.gen_range(1..=3);
        let body: Vec<Token> = (0..len)
            .map(|_| cats.choose(rng).expect("non-empty").clone())
            .collect();
        let conclusion = if p == 0 {
            cats[0].clone()
        } else {
            cats.choose(rng).expect("non-empty").clone()
        };
        push(&mut store, body, conclusion);
    }
    store
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::chain::load_store;
    use crate::engine::fixtures::SVO;

    fn s() -> Token {
        Token::category("S").unwrap()
    }

    #[test]
    fn svo_store_up_to_three_words() {
        let store = load_store(SVO).unwrap();
        let r = crosscheck(&store, 3, &s(), &SearchConfig::default()).unwrap();
        assert_eq!(r.sentences.len(), 3 + 9 + 27);
        assert_eq!(r.count(Verdict::Violation), 0);
        let both: Vec<String> = r
            .sentences
            .iter()
            .filter(|x| x.cfg && x.complex)
            .map(|x| x.words.join(" "))
            .collect();
        for want in [
            "cows eat grass",
            "grass eat cows",
            "cows eat cows",
            "grass eat grass",
        ] {
            assert!(both.contains(&want.to_string()), "{want}");
        }
        assert!(r.to_text().contains("cows eat grass\tcfg:1\tcomplex:1\n"));
    }

    #[test]
    fn word_chains_only() {
        let store = load_store("\"a\" -> NP\n\"b\" -> V2\n").unwrap();
        let r = crosscheck(&store, 2, &s(), &SearchConfig::default()).unwrap();
        assert!(r.sentences.iter().all(|x| !x.cfg && !x.complex));
    }

    #[test]
    fn impure_store_refused() {
        let store = load_store("\"birds\" - \"fly\" -> S\n").unwrap();
        assert!(matches!(
            crosscheck(&store, 2, &s(), &SearchConfig::default()),
            Err(Error::ImpureStore(_))
        ));
    }

    #[test]
    fn random_stores_are_pure_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let st = random_pure_store(&mut rng, 6, 4, 3);
            assert!(st.is_pure());
            assert!(vocabulary(&st).len() <= 6);
            assert!(st.chains().iter().filter(|c| !c.is_lexical()).count() <= 3);
        }
    }
}
