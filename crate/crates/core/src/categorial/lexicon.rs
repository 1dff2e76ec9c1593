use crate::chain::is_ident;
use crate::error::{Error, ParseError};

use super::types::{format_type, parse_type_with, Abbreviations, CatType};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedWord {
    pub word: String,
    pub ty: CatType,
}

/// Word typings plus the abbreviations in force when they were read.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Lexicon {
    pub entries: Vec<TypedWord>,
    pub abbreviations: Abbreviations,
}

impl Lexicon {
    pub fn new(entries: Vec<TypedWord>) -> Lexicon {
        Lexicon {
            entries,
            abbreviations: Abbreviations::default(),
        }
    }

    /// Types of `word` in file order.
    pub fn types_of(&self, word: &str) -> Vec<&CatType> {
        self.entries
            .iter()
            .filter(|e| e.word == word)
            .map(|e| &e.ty)
            .collect()
    }

    pub fn parse_type(&self, text: &str) -> Result<CatType, Error> {
        parse_type_with(text, &self.abbreviations)
    }

    pub fn to_text(&self) -> String {
        self.entries
            .iter()
            .map(|e| format!("\"{}\" : {}\n", e.word, format_type(&e.ty)))
            .collect()
    }
}

fn at(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse(ParseError {
        line,
        column,
        message: message.into(),
    })
}

/// Reads lines `"word" : TYPE` and `NAME := TYPE`. A definition applies to
/// the lines after it; `V1`, `V2`, `NP1` and `NP4` are predefined.
pub fn parse_lexicon(text: &str) -> Result<Lexicon, Error> {
    let mut lex = Lexicon::default();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let content = raw.split('#').next().unwrap_or("");
        let indent = content.len() - content.trim_start().len();
        let line = content.trim();
        if line.is_empty() {
            continue;
        }
        let with_col = |e: Error, offset: usize| match e {
            Error::Parse(p) => at(line_no, indent + offset + p.column, p.message),
            other => other,
        };
        if let Some(rest) = line.strip_prefix('"') {
            let close = rest
                .find('"')
                .ok_or_else(|| at(line_no, indent + 1, "unterminated word"))?;
            let word = &rest[..close];
            if word.is_empty() || word.chars().any(char::is_whitespace) {
                return Err(at(line_no, indent + 2, format!("bad word {word:?}")));
            }
            let after = &rest[close + 1..];
            let Some(ty_text) = after.trim_start().strip_prefix(':') else {
                return Err(at(line_no, indent + close + 3, "expected ':' after word"));
            };
            let offset = line.len() - ty_text.len();
            let ty =
                parse_type_with(ty_text, &lex.abbreviations).map_err(|e| with_col(e, offset))?;
            lex.entries.push(TypedWord {
                word: word.to_string(),
                ty,
            });
        } else if let Some((name, ty_text)) = line.split_once(":=") {
            let name = name.trim();
            if !is_ident(name) {
                return Err(at(
                    line_no,
                    indent + 1,
                    format!("bad abbreviation name {name:?}"),
                ));
            }
            let offset = line.len() - ty_text.len();
            let ty =
                parse_type_with(ty_text, &lex.abbreviations).map_err(|e| with_col(e, offset))?;
            lex.abbreviations.insert(name, ty);
        } else {
            return Err(at(
                line_no,
                indent + 1,
                "expected `\"word\" : TYPE` or `NAME := TYPE`",
            ));
        }
    }
    Ok(lex)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_entries_and_definitions() {
        let lex = parse_lexicon(
            "# case\nADJ := NP/NP\n\"he\" : NP1\n\"brown\" : ADJ  # adjective\n\"he\" : NP\n",
        )
        .unwrap();
        assert_eq!(lex.entries.len(), 3);
        assert_eq!(format_type(lex.types_of("brown")[0]), "NP/NP");
        assert_eq!(lex.types_of("he").len(), 2);
        assert!(lex.types_of("she").is_empty());
    }

    #[test]
    fn round_trips_through_text() {
        let lex = parse_lexicon("\"loves\" : V2\n\"him\" : NP4\n").unwrap();
        assert_eq!(parse_lexicon(&lex.to_text()).unwrap().entries, lex.entries);
    }

    #[test]
    fn reports_positions() {
        let Err(Error::Parse(p)) = parse_lexicon("\"a\" : NP\n\"b\" : (NP") else {
            panic!("expected a parse error")
        };
        assert_eq!(p.line, 2);
        assert!(p.column > 6, "{p:?}");
        assert!(parse_lexicon("\"a\" NP").is_err());
        assert!(parse_lexicon("a : NP").is_err());
        assert!(parse_lexicon("\"a").is_err());
    }
}
