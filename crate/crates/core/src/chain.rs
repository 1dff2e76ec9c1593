//! Tokens, chains and chain stores.
//!
//! A chain store is plain text, one chain per line:
//!
//! ```text
//! # comments start with '#'
//! "cows" -> NP
//! NP - V2 - NP -> S
//! # @id mixed
//! "it's" - "okay" - "to" - V2 - NP -> S
//! ```
//!
//! Quoted tokens are words, bare identifiers are categories. A `# @id NAME`
//! comment names the next chain; otherwise chains get `c1, c2, ...` by their
//! position among the chains of the file.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Word,
    Category,
}

/// A word occurrence or a grammatical-category label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Token {
    pub kind: TokenKind,
    pub label: String,
}

impl Token {
    pub fn word(label: &str) -> Result<Token, Error> {
        if label.is_empty() || label.chars().any(|c| c.is_whitespace() || c == '"') {
            return Err(Error::InvalidToken(label.to_string()));
        }
        Ok(Token {
            kind: TokenKind::Word,
            label: label.to_string(),
        })
    }

    pub fn category(label: &str) -> Result<Token, Error> {
        if !is_ident(label) {
            return Err(Error::InvalidToken(label.to_string()));
        }
        Ok(Token {
            kind: TokenKind::Category,
            label: label.to_string(),
        })
    }

    pub fn is_category(&self) -> bool {
        self.kind == TokenKind::Category
    }

    pub fn is_word(&self) -> bool {
        self.kind == TokenKind::Word
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TokenKind::Word => write!(f, "\"{}\"", self.label),
            TokenKind::Category => f.write_str(&self.label),
        }
    }
}

pub(crate) fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// An ordered body of tokens with an optional conclusion.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chain {
    pub id: String,
    pub body: Vec<Token>,
    pub conclusion: Option<Token>,
}

impl Chain {
    pub fn new(
        id: impl Into<String>,
        body: Vec<Token>,
        conclusion: Option<Token>,
    ) -> Result<Chain, Error> {
        if body.is_empty() {
            return Err(Error::EmptyBody);
        }
        Ok(Chain {
            id: id.into(),
            body,
            conclusion,
        })
    }

    /// Number of occurrences: body tokens plus the conclusion, if any.
    pub fn occurrence_count(&self) -> usize {
        self.body.len() + usize::from(self.conclusion.is_some())
    }

    /// True when the chain reads as a context-free production: a single word
    /// classified into a category, or a category-only body with a category
    /// conclusion.
    pub fn is_pure(&self) -> bool {
        match &self.conclusion {
            Some(c) if c.is_category() => {
                (self.body.len() == 1 && self.body[0].is_word())
                    || self.body.iter().all(Token::is_category)
            }
            _ => false,
        }
    }

    pub fn is_lexical(&self) -> bool {
        self.is_pure() && self.body[0].is_word()
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_chain(self))
    }
}

/// Chains in file order, indexed by id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChainStore {
    chains: Vec<Chain>,
    by_id: HashMap<String, usize>,
}

impl ChainStore {
    pub fn new() -> ChainStore {
        ChainStore::default()
    }

    pub fn from_chains(chains: Vec<Chain>) -> Result<ChainStore, Error> {
        let mut store = ChainStore::new();
        for chain in chains {
            store.push(chain)?;
        }
        Ok(store)
    }

    pub fn push(&mut self, chain: Chain) -> Result<(), Error> {
        if self.by_id.contains_key(&chain.id) {
            return Err(Error::DuplicateId(chain.id));
        }
        self.by_id.insert(chain.id.clone(), self.chains.len());
        self.chains.push(chain);
        Ok(())
    }

    pub fn chains(&self) -> &[Chain] {
        &self.chains
    }

    pub fn len(&self) -> usize {
        self.chains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Chain> {
        self.by_id.get(id).map(|&i| &self.chains[i])
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    pub fn is_pure(&self) -> bool {
        self.chains.iter().all(Chain::is_pure)
    }

    /// A fresh id of the `cN` form that is not yet taken.
    pub fn next_id(&self) -> String {
        let mut n = self.chains.len() + 1;
        loop {
            let id = format!("c{n}");
            if !self.by_id.contains_key(&id) {
                return id;
            }
            n += 1;
        }
    }

    /// Returns a copy with `chain` appended unless an identical body and
    /// conclusion is already stored.
    pub fn with_chain(&self, chain: Chain) -> Result<ChainStore, Error> {
        let mut out = self.clone();
        if !self.contains_content(&chain.body, chain.conclusion.as_ref()) {
            out.push(chain)?;
        }
        Ok(out)
    }

    pub fn contains_content(&self, body: &[Token], conclusion: Option<&Token>) -> bool {
        self.chains
            .iter()
            .any(|c| c.body == body && c.conclusion.as_ref() == conclusion)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (pos, chain) in self.chains.iter().enumerate() {
            if chain.id != format!("c{}", pos + 1) {
                out.push_str(&format!("# @id {}\n", chain.id));
            }
            out.push_str(&format_chain(chain));
            out.push('\n');
        }
        out
    }
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn column(&self) -> usize {
        self.text[..self.pos].chars().count() + 1
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column(),
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.text[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn token(&mut self) -> Result<Token, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('"') => {
                let start = self.pos;
                self.pos += 1;
                let rest = &self.text[self.pos..];
                let end = rest
                    .find(|c: char| c == '"' || c.is_whitespace())
                    .ok_or_else(|| self.err("unterminated word token"))?;
                if !rest[end..].starts_with('"') {
                    self.pos += end;
                    return Err(self.err("whitespace inside word token"));
                }
                let label = &rest[..end];
                if label.is_empty() {
                    self.pos = start;
                    return Err(self.err("empty word token"));
                }
                self.pos += end + 1;
                Ok(Token {
                    kind: crate::chain::TokenKind::Word,
                    label: label.to_string(),
                })
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let rest = &self.text[self.pos..];
                let end = rest
                    .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                    .unwrap_or(rest.len());
                self.pos += end;
                Ok(Token {
                    kind: TokenKind::Category,
                    label: rest[..end].to_string(),
                })
            }
            Some(_) => Err(self.err("expected a token")),
            None => Err(self.err("expected a token, found end of line")),
        }
    }
}

fn parse_line_at(
    line: &str,
    line_no: usize,
) -> Result<Option<(Vec<Token>, Option<Token>)>, ParseError> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    let trimmed = line.trim_start();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Ok(None);
    }
    let mut cur = Cursor {
        text: line,
        pos: 0,
        line: line_no,
    };
    let mut body = vec![cur.token()?];
    let mut conclusion = None;
    loop {
        cur.skip_ws();
        if cur.peek().is_none() {
            break;
        }
        if cur.eat("->") {
            conclusion = Some(cur.token()?);
            cur.skip_ws();
            if cur.peek().is_some() {
                return Err(cur.err("unexpected text after conclusion"));
            }
            break;
        }
        if cur.eat("-") {
            body.push(cur.token()?);
            continue;
        }
        return Err(cur.err("expected '-' or '->'"));
    }
    Ok(Some((body, conclusion)))
}

/// Parses one line of chain notation. Blank and comment lines yield `None`;
/// the returned chain has an empty id.
/// A single token in chain syntax: `"word"` or `Category`.
pub fn parse_token(text: &str) -> Result<Token, Error> {
    let text = text.trim();
    match text.strip_prefix('"').and_then(|t| t.strip_suffix('"')) {
        Some(word) => Token::word(word),
        None => Token::category(text),
    }
}

pub fn parse_chain_line(line: &str) -> Result<Option<Chain>, ParseError> {
    Ok(parse_line_at(line, 1)?.map(|(body, conclusion)| Chain {
        id: String::new(),
        body,
        conclusion,
    }))
}

pub fn format_chain(chain: &Chain) -> String {
    let mut out = chain
        .body
        .iter()
        .map(Token::to_string)
        .collect::<Vec<_>>()
        .join(" - ");
    if let Some(c) = &chain.conclusion {
        out.push_str(" -> ");
        out.push_str(&c.to_string());
    }
    out
}

fn id_directive(line: &str) -> Option<&str> {
    let rest = line.trim_start().strip_prefix('#')?.trim_start();
    let name = rest.strip_prefix("@id")?;
    if !name.starts_with(char::is_whitespace) {
        return None;
    }
    Some(name.trim())
}

pub fn load_store(document: &str) -> Result<ChainStore, Error> {
    let mut store = ChainStore::new();
    let mut pending_id: Option<(String, usize)> = None;
    for (idx, line) in document.lines().enumerate() {
        let line_no = idx + 1;
        if let Some(name) = id_directive(line) {
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(ParseError {
                    line: line_no,
                    column: 1,
                    message: format!("invalid @id name {name:?}"),
                }
                .into());
            }
            pending_id = Some((name.to_string(), line_no));
            continue;
        }
        if let Some((body, conclusion)) = parse_line_at(line, line_no)? {
            let id = match pending_id.take() {
                Some((name, _)) => name,
                None => format!("c{}", store.len() + 1),
            };
            store
                .push(Chain {
                    id,
                    body,
                    conclusion,
                })
                .map_err(|e| match e {
                    Error::DuplicateId(id) => Error::Parse(ParseError {
                        line: line_no,
                        column: 1,
                        message: format!("duplicate chain id {id:?}"),
                    }),
                    other => other,
                })?;
        }
    }
    if let Some((name, line)) = pending_id {
        return Err(ParseError {
            line,
            column: 1,
            message: format!("@id {name} is not followed by a chain"),
        }
        .into());
    }
    Ok(store)
}

pub fn tokenize_sentence(text: &str) -> Result<Chain, Error> {
    let body = text
        .split_whitespace()
        .map(Token::word)
        .collect::<Result<Vec<_>, _>>()?;
    if body.is_empty() {
        return Err(Error::EmptySentence);
    }
    Ok(Chain {
        id: String::from("fresh"),
        body,
        conclusion: None,
    })
}

/// Records that `fresh` was confirmed as `label`.
pub fn consolidate(store: &ChainStore, fresh: &Chain, label: &Token) -> Result<ChainStore, Error> {
    if !label.is_category() {
        return Err(Error::WordConclusion(label.label.clone()));
    }
    if fresh.conclusion.is_some() {
        return Err(Error::NotFresh);
    }
    if store.contains_content(&fresh.body, Some(label)) {
        return Ok(store.clone());
    }
    let chain = Chain {
        id: store.next_id(),
        body: fresh.body.clone(),
        conclusion: Some(label.clone()),
    };
    store.with_chain(chain)
}
