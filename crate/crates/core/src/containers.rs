//! Chains of recognizers. Each container owns a store and a set of trigger
//! categories; a span it recognizes as a trigger is replaced by that
//! category token, and the shortened stream moves on to the next container.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

use ini::Ini;

use crate::chain::{load_store, tokenize_sentence, Chain, ChainStore, Token};
use crate::engine::{recognize, SearchConfig};
use crate::error::Error;

#[derive(Debug, Clone)]
pub struct Container {
    pub name: String,
    pub store: ChainStore,
    pub triggers: BTreeSet<Token>,
    pub search: SearchConfig,
}

impl Container {
    pub fn new(
        name: &str,
        store: ChainStore,
        triggers: BTreeSet<Token>,
        search: SearchConfig,
    ) -> Result<Container, Error> {
        if triggers.is_empty() {
            return Err(Error::Config(format!("container {name}: no triggers")));
        }
        if let Some(t) = triggers.iter().find(|t| !t.is_category()) {
            return Err(Error::Config(format!(
                "container {name}: trigger {t} is not a category"
            )));
        }
        Ok(Container {
            name: name.to_string(),
            store,
            triggers,
            search,
        })
    }

    fn recognizes(&self, tokens: &[Token]) -> Option<Token> {
        let fresh = Chain::new("fresh", tokens.to_vec(), None).ok()?;
        self.triggers
            .iter()
            .find(|t| {
                recognize(
                    &fresh,
                    &self.store,
                    &self.search.clone().with_target((*t).clone()),
                )
                .accepted
            })
            .cloned()
    }
}

/// Inclusive 1-based word span.
pub type Span = (usize, usize);

fn spans_in_order(n: usize) -> impl Iterator<Item = Span> {
    (1..=n).flat_map(move |i| (i..=n).rev().map(move |j| (i, j)))
}

/// Every sub-span the container recognizes as one of its triggers, leftmost
/// first, then longest first. A span recognized as several triggers is
/// reported once, with the first trigger in category order.
pub fn recognize_spans(c: &Container, stream: &[Token]) -> Vec<(Span, Token)> {
    spans_in_order(stream.len())
        .filter_map(|(i, j)| c.recognizes(&stream[i - 1..j]).map(|t| ((i, j), t)))
        .collect()
}

/// Spans that may be replaced: at least two tokens, so every replacement
/// shortens the stream.
fn replaceable<'a>(
    c: &'a Container,
    stream: &'a [Token],
) -> impl Iterator<Item = (Span, Token)> + 'a {
    spans_in_order(stream.len())
        .filter(|(i, j)| j > i)
        .filter_map(|(i, j)| c.recognizes(&stream[i - 1..j]).map(|t| ((i, j), t)))
}

fn replace(stream: &[Token], (i, j): Span, t: Token) -> Vec<Token> {
    let mut out = stream[..i - 1].to_vec();
    out.push(t);
    out.extend_from_slice(&stream[j..]);
    out
}

#[derive(Debug, Clone)]
pub struct Pipeline {
    pub containers: Vec<Container>,
}

impl Pipeline {
    pub fn new(containers: Vec<Container>) -> Result<Pipeline, Error> {
        let mut seen = BTreeSet::new();
        for c in &containers {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::Config(format!(
                    "duplicate container name {:?}",
                    c.name
                )));
            }
        }
        Ok(Pipeline { containers })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub container: String,
    pub span: Span,
    pub token: Token,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineResult {
    pub stream: Vec<Token>,
    pub trace: Vec<TraceStep>,
    pub accepted: bool,
}

fn finish(p: &Pipeline, stream: Vec<Token>, trace: Vec<TraceStep>) -> PipelineResult {
    let accepted = match (p.containers.last(), stream.as_slice()) {
        (Some(last), [t]) => last.triggers.contains(t),
        _ => false,
    };
    PipelineResult {
        stream,
        trace,
        accepted,
    }
}

/// Runs the sentence through every container in turn. Inside a container
/// the leftmost-longest recognized span is replaced until none is left.
pub fn run_pipeline(p: &Pipeline, sentence: &str) -> Result<PipelineResult, Error> {
    let mut stream = tokenize_sentence(sentence)?.body;
    let mut trace = Vec::new();
    for c in &p.containers {
        loop {
            let Some((span, t)) = replaceable(c, &stream).next() else {
                break;
            };
            stream = replace(&stream, span, t.clone());
            trace.push(TraceStep {
                container: c.name.clone(),
                span,
                token: t,
            });
        }
    }
    Ok(finish(p, stream, trace))
}

/// Like [`run_pipeline`] but follows every replacement choice. Returns one
/// result per distinct final stream (with the first trace found for it),
/// ordered by stream.
pub fn run_pipeline_all(p: &Pipeline, sentence: &str) -> Result<Vec<PipelineResult>, Error> {
    let start = tokenize_sentence(sentence)?.body;
    let mut current: BTreeMap<Vec<Token>, Vec<TraceStep>> = BTreeMap::from([(start, Vec::new())]);
    for c in &p.containers {
        let mut finals: BTreeMap<Vec<Token>, Vec<TraceStep>> = BTreeMap::new();
        let mut seen: HashSet<Vec<Token>> = HashSet::new();
        let mut work: Vec<(Vec<Token>, Vec<TraceStep>)> = current.into_iter().collect();
        while let Some((stream, trace)) = work.pop() {
            if !seen.insert(stream.clone()) {
                continue;
            }
            let moves: Vec<(Span, Token)> = replaceable(c, &stream).collect();
            if moves.is_empty() {
                finals.entry(stream).or_insert(trace);
                continue;
            }
            for (span, t) in moves.into_iter().rev() {
                let mut next_trace = trace.clone();
                next_trace.push(TraceStep {
                    container: c.name.clone(),
                    span,
                    token: t.clone(),
                });
                work.push((replace(&stream, span, t), next_trace));
            }
        }
        current = finals;
    }
    Ok(current.into_iter().map(|(s, t)| finish(p, s, t)).collect())
}

/// Reads a pipeline description:
///
/// ```text
/// [container cp]
/// triggers = CP
/// chains = dutch_cp.chains
/// max_instances = 9
/// max_copies = 3
/// ```
///
/// Chain paths are resolved against `base`.
pub fn parse_pipeline(text: &str, base: &Path) -> Result<Pipeline, Error> {
    let ini = Ini::load_from_str(text).map_err(|e| Error::Config(format!("pipeline: {e}")))?;
    let mut containers = Vec::new();
    for (section, props) in ini.iter() {
        let Some(section) = section else {
            if props.iter().next().is_some() {
                return Err(Error::Config(
                    "pipeline: keys outside a [container NAME] section".into(),
                ));
            }
            continue;
        };
        let name = section
            .strip_prefix("container")
            .filter(|rest| rest.starts_with(char::is_whitespace))
            .map(str::trim)
            .filter(|n| !n.is_empty())
            .ok_or_else(|| {
                Error::Config(format!(
                    "pipeline: expected [container NAME], got [{section}]"
                ))
            })?;
        let mut triggers = None;
        let mut chains = None;
        let mut search = SearchConfig::default();
        for (key, value) in props.iter() {
            let bad = |what: &str| Error::Config(format!("container {name}: bad {what} {value:?}"));
            match key {
                "triggers" => {
                    let set = value
                        .split(',')
                        .map(|t| Token::category(t.trim()))
                        .collect::<Result<BTreeSet<_>, _>>()
                        .map_err(|_| bad("triggers"))?;
                    triggers = Some(set);
                }
                "chains" => chains = Some(base.join(value.trim())),
                "max_instances" => {
                    search.max_instances = value.trim().parse().map_err(|_| bad("max_instances"))?
                }
                "max_copies" => {
                    search.max_copies_per_chain =
                        value.trim().parse().map_err(|_| bad("max_copies"))?
                }
                other => {
                    return Err(Error::Config(format!(
                        "container {name}: unknown key {other:?}"
                    )))
                }
            }
        }
        let triggers =
            triggers.ok_or_else(|| Error::Config(format!("container {name}: missing triggers")))?;
        let path =
            chains.ok_or_else(|| Error::Config(format!("container {name}: missing chains")))?;
        let text = std::fs::read_to_string(&path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        let store = load_store(&text)?;
        containers.push(Container::new(name, store, triggers, search)?);
    }
    Pipeline::new(containers)
}

pub fn load_pipeline(path: &Path) -> Result<Pipeline, Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_pipeline(&text, path.parent().unwrap_or(Path::new(".")))
}
