//! A small categorial grammar: slash types, the application, composition,
//! associativity and lifting rules, and a bounded chart search for
//! derivations. Used as an independent check on the chain model.

pub mod derive;
pub mod lexicon;
pub mod rules;
pub mod types;

pub use derive::{
    check_derivation, count_derivations, derive, render_derivation, Derivation, DeriveBounds,
};
pub use lexicon::{parse_lexicon, Lexicon, TypedWord};
pub use rules::{apply_rule, RuleKind, Side, Step};
pub use types::{format_type, parse_type, parse_type_with, Abbreviations, CatType};
