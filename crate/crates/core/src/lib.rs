//! Sentence recognition by bonding token chains.
//!
//! A sentence is read as a *fresh* chain of word tokens. It is recognized as
//! category `X` when copies of stored chains can be bonded to it, and to each
//! other, so that every token is paired with an equal token except a single
//! conclusion `X`, and the whole arrangement fits on the sentence's time
//! line. See [`engine::recognize`].

pub mod categorial;
pub mod chain;
pub mod containers;
pub mod crosscheck;
pub mod engine;
pub mod error;
pub mod geometry;

pub use chain::{
    consolidate, format_chain, load_store, parse_chain_line, parse_token, tokenize_sentence, Chain,
    ChainStore, Token, TokenKind,
};
pub use engine::{
    cky_reference, enumerate_complexes, recognize, solve_positions, tree_to_complex, validate,
    Complex, RecognitionResult, SearchConfig, SearchMode, Witness,
};
pub use error::{Error, ParseError};
