use std::collections::BTreeMap;
use std::fmt;

use crate::chain::is_ident;
use crate::error::{Error, ParseError};

/// A categorial type. `Right(b, a)` is `b/a`, looking right for an `a`;
/// `Left(a, b)` is `a\b`, looking left for an `a`. Both yield `b`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CatType {
    Atom(String),
    Right(Box<CatType>, Box<CatType>),
    Left(Box<CatType>, Box<CatType>),
}

impl CatType {
    pub fn atom(name: &str) -> CatType {
        CatType::Atom(name.to_string())
    }

    /// `num/den`
    pub fn right(num: CatType, den: CatType) -> CatType {
        CatType::Right(Box::new(num), Box::new(den))
    }

    /// `den\num`
    pub fn left(den: CatType, num: CatType) -> CatType {
        CatType::Left(Box::new(den), Box::new(num))
    }

    /// Number of atom occurrences.
    pub fn size(&self) -> usize {
        match self {
            CatType::Atom(_) => 1,
            CatType::Right(a, b) | CatType::Left(a, b) => a.size() + b.size(),
        }
    }

    pub fn atoms(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            CatType::Atom(a) => out.push(a),
            CatType::Right(a, b) | CatType::Left(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }
}

impl fmt::Display for CatType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn operand(t: &CatType, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match t {
                CatType::Atom(a) => f.write_str(a),
                _ => write!(f, "({t})"),
            }
        }
        match self {
            CatType::Atom(a) => f.write_str(a),
            CatType::Right(num, den) => {
                operand(num, f)?;
                f.write_str("/")?;
                operand(den, f)
            }
            CatType::Left(den, num) => {
                operand(den, f)?;
                f.write_str("\\")?;
                operand(num, f)
            }
        }
    }
}

/// Prints every compound operand in brackets, e.g. `(NP\S)/NP`. The output
/// always parses back to the same type.
pub fn format_type(t: &CatType) -> String {
    t.to_string()
}

/// Named shorthands expanded while parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abbreviations(BTreeMap<String, CatType>);

impl Default for Abbreviations {
    /// `V1`, `V2`, `NP1` and `NP4`.
    fn default() -> Self {
        let (np, s) = (CatType::atom("NP"), CatType::atom("S"));
        let v1 = CatType::left(np.clone(), s.clone());
        let mut map = BTreeMap::new();
        map.insert("V1".to_string(), v1.clone());
        map.insert("V2".to_string(), CatType::right(v1.clone(), np.clone()));
        map.insert("NP1".to_string(), CatType::right(s.clone(), v1));
        map.insert(
            "NP4".to_string(),
            CatType::left(CatType::right(s.clone(), np), s),
        );
        Abbreviations(map)
    }
}

impl Abbreviations {
    pub fn empty() -> Abbreviations {
        Abbreviations(BTreeMap::new())
    }

    pub fn get(&self, name: &str) -> Option<&CatType> {
        self.0.get(name)
    }

    pub fn insert(&mut self, name: &str, t: CatType) {
        self.0.insert(name.to_string(), t);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &CatType)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }
}

/// Parses a type with the standard abbreviations.
pub fn parse_type(text: &str) -> Result<CatType, Error> {
    parse_type_with(text, &Abbreviations::default())
}

/// Slashes associate to the left: `A\B/C` is `(A\B)/C`.
pub fn parse_type_with(text: &str, abbrev: &Abbreviations) -> Result<CatType, Error> {
    let mut p = TypeParser {
        chars: text.char_indices().collect(),
        pos: 0,
        abbrev,
    };
    p.skip_ws();
    if p.peek().is_none() {
        return Err(p.err("empty type").into());
    }
    let t = p.expr()?;
    p.skip_ws();
    if let Some(c) = p.peek() {
        return Err(p.err(&format!("unexpected {c:?}")).into());
    }
    Ok(t)
}

struct TypeParser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    abbrev: &'a Abbreviations,
}

impl TypeParser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn err(&self, message: &str) -> ParseError {
        ParseError {
            line: 1,
            column: self.pos + 1,
            message: message.to_string(),
        }
    }

    fn expr(&mut self) -> Result<CatType, ParseError> {
        let mut t = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('/') => {
                    self.pos += 1;
                    t = CatType::right(t, self.term()?);
                }
                Some('\\') => {
                    self.pos += 1;
                    t = CatType::left(t, self.term()?);
                }
                _ => return Ok(t),
            }
        }
    }

    fn term(&mut self) -> Result<CatType, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let t = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(t)
            }
            Some(c) if c.is_alphanumeric() || c == '_' => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos]
                    .iter()
                    .map(|&(_, c)| c)
                    .collect();
                if !is_ident(&name) {
                    self.pos = start;
                    return Err(self.err(&format!("bad atom {name:?}")));
                }
                Ok(self
                    .abbrev
                    .get(&name)
                    .cloned()
                    .unwrap_or(CatType::Atom(name)))
            }
            Some(c) => Err(self.err(&format!("unexpected {c:?}"))),
            None => Err(self.err("unexpected end of type")),
        }
    }
}
