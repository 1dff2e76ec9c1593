use std::collections::BTreeMap;

use crate::chain::{parse_token, Token, TokenKind};
use crate::error::{Error, ParseError};

/// Element symbols for XYZ output, chosen so molecular viewers color the
/// balls roughly as in the usual renderings: words white (H), noun phrases
/// blue (N), verbs red (O), sentences yellow (S).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StyleMap {
    pub word: String,
    /// Symbol for categories without an entry.
    pub fallback: String,
    pub tokens: BTreeMap<Token, String>,
}

impl Default for StyleMap {
    fn default() -> Self {
        let tokens = [
            ("NP", "N"),
            ("V1", "O"),
            ("V2", "O"),
            ("S", "S"),
            ("Adj", "C"),
            ("NP1", "N"),
            ("NP4", "P"),
            ("CP", "B"),
        ]
        .into_iter()
        .map(|(c, e)| (Token::category(c).expect("valid category"), e.to_string()))
        .collect();
        StyleMap {
            word: "H".into(),
            fallback: "C".into(),
            tokens,
        }
    }
}

impl StyleMap {
    pub fn symbol(&self, t: &Token) -> &str {
        if let Some(e) = self.tokens.get(t) {
            return e;
        }
        match t.kind {
            TokenKind::Word => &self.word,
            TokenKind::Category => &self.fallback,
        }
    }

    /// Adds `TOKEN = ELEMENT` lines on top of the defaults. `TOKEN` uses
    /// chain syntax (`"word"` or `Category`).
    pub fn with_overrides(mut self, text: &str) -> Result<StyleMap, Error> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| {
                Error::Parse(ParseError {
                    line: n + 1,
                    column: 1,
                    message,
                })
            };
            let (lhs, rhs) = line
                .split_once('=')
                .ok_or_else(|| err("expected TOKEN = ELEMENT".into()))?;
            let token = parse_token(lhs).map_err(|e| err(e.to_string()))?;
            let element = rhs.trim();
            if !is_element(element) {
                return Err(err(format!("bad element symbol {element:?}")));
            }
            self.tokens.insert(token, element.to_string());
        }
        Ok(self)
    }
}

fn is_element(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_uppercase())
        && cs.all(|c| c.is_ascii_lowercase())
        && s.len() <= 3
}
