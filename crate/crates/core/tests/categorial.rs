use chainplex::categorial::{
    apply_rule, check_derivation, count_derivations, derive, format_type, parse_type,
    parse_type_with, Abbreviations, CatType, Derivation, DeriveBounds, Lexicon, Step, TypedWord,
};
use proptest::prelude::*;

fn arb_type() -> impl Strategy<Value = CatType> {
    let leaf = prop_oneof![Just("S"), Just("NP"), Just("N"), Just("CP")].prop_map(CatType::atom);
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| CatType::right(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| CatType::left(a, b)),
        ]
    })
}

/// Lexical types of the kind the bundled lexicons use.
fn arb_lexical_type() -> impl Strategy<Value = CatType> {
    let abbrev = Abbreviations::default();
    prop::sample::select(vec![
        "NP", "S", "V1", "V2", "NP1", "NP4", "NP/NP", "S/S", "NP\\NP",
    ])
    .prop_map(move |s| parse_type_with(s, &abbrev).unwrap())
}

fn arb_sentence() -> impl Strategy<Value = (Lexicon, Vec<String>)> {
    let words = ["a", "b", "c"];
    (
        prop::collection::vec((0..3usize, arb_lexical_type()), 1..6),
        prop::collection::vec(0..3usize, 1..5),
    )
        .prop_map(move |(entries, picks)| {
            let mut entries: Vec<TypedWord> = entries
                .into_iter()
                .map(|(w, ty)| TypedWord {
                    word: words[w].to_string(),
                    ty,
                })
                .collect();
            // every word needs at least one type
            for w in words {
                if !entries.iter().any(|e| e.word == w) {
                    entries.push(TypedWord {
                        word: w.to_string(),
                        ty: CatType::atom("NP"),
                    });
                }
            }
            let sentence = picks.iter().map(|&k| words[k].to_string()).collect();
            (Lexicon::new(entries), sentence)
        })
}

fn bounds(atoms: usize, unary: usize) -> DeriveBounds {
    DeriveBounds {
        max_type_atoms: atoms,
        max_unary_chain: unary,
        ..DeriveBounds::default()
    }
}

fn s() -> CatType {
    CatType::atom("S")
}

#[test]
fn he_loves_him_has_composition_and_associativity_readings() {
    let lex = chainplex::categorial::parse_lexicon("\"he\" : NP1\n\"loves\" : V2\n\"him\" : NP4\n")
        .unwrap();
    let ds = derive(
        &lex,
        &["he", "loves", "him"],
        &s(),
        &DeriveBounds::default(),
    )
    .unwrap();
    let steps: Vec<Vec<Step>> = ds.iter().map(Derivation::steps).collect();
    // "he loves" composed first, then the object applies
    assert!(steps.iter().any(|st| st.contains(&Step::R2R)));
    // "loves" re-bracketed so that it meets "him" first
    assert!(steps.iter().any(|st| st.contains(&Step::R3R)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn type_text_round_trip(t in arb_type()) {
        prop_assert_eq!(parse_type(&format_type(&t)).unwrap(), t);
    }

    #[test]
    fn associativity_is_an_involution(t in arb_type()) {
        for (there, back) in [(Step::R3R, Step::R3L), (Step::R3L, Step::R3R)] {
            if let Some(u) = apply_rule(there, &[&t], None) {
                prop_assert_eq!(apply_rule(back, &[&u], None), Some(t.clone()));
                prop_assert_eq!(u.size(), t.size());
            }
        }
    }

    #[test]
    fn lifted_arguments_apply_like_plain_ones(a in arb_type(), b in arb_type()) {
        let lifted = apply_rule(Step::R4R, &[&a], Some(&b)).unwrap();
        let function = CatType::left(a.clone(), b.clone());
        prop_assert_eq!(apply_rule(Step::R1R, &[&lifted, &function], None), Some(b.clone()));
        prop_assert_eq!(apply_rule(Step::R1L, &[&a, &function], None), Some(b.clone()));

        let lifted = apply_rule(Step::R4L, &[&a], Some(&b)).unwrap();
        let function = CatType::right(b.clone(), a.clone());
        prop_assert_eq!(apply_rule(Step::R1L, &[&function, &lifted], None), Some(b.clone()));
        prop_assert_eq!(apply_rule(Step::R1R, &[&function, &a], None), Some(b));
    }

    #[test]
    fn derivations_check_out((lex, sentence) in arb_sentence()) {
        let words: Vec<&str> = sentence.iter().map(String::as_str).collect();
        let b = bounds(5, 1);
        let ds = derive(&lex, &words, &s(), &b).unwrap();
        let n = count_derivations(&lex, &words, &s(), &b).unwrap();
        prop_assert_eq!(n, ds.len() as u128);
        for d in &ds {
            prop_assert!(check_derivation(d, &lex));
            prop_assert_eq!(d.ty(), &s());
            prop_assert_eq!(d.span(), (1, words.len()));
        }
    }

    #[test]
    fn looser_bounds_never_lose_derivations((lex, sentence) in arb_sentence()) {
        let words: Vec<&str> = sentence.iter().map(String::as_str).collect();
        let count = |a, u| count_derivations(&lex, &words, &s(), &bounds(a, u)).unwrap();
        let base = count(4, 1);
        prop_assert!(base <= count(5, 1));
        prop_assert!(base <= count(4, 2));
    }
}
