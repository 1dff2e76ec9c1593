//! Context-free reading of a pure store.
//!
//! A pure store is a grammar: `"w" -> X` is a lexical rule and
//! `A - B - C -> X` the production `X => A B C`. The chart below is plain
//! CKY with n-ary rules handled by recursing over split points and unary
//! rules by closure. Every cell keeps the first way each category was
//! found, which keeps the extracted trees acyclic.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::chain::{Chain, ChainStore, Token};
use crate::error::Error;

use super::{instance_of, Bond, Complex, Occurrence, Slot, Source};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParseTree {
    /// A word chain covering fresh position `position` (1-based).
    Lexical { chain: String, position: usize },
    Rule {
        chain: String,
        children: Vec<ParseTree>,
    },
}

impl ParseTree {
    pub fn chain(&self) -> &str {
        match self {
            ParseTree::Lexical { chain, .. } | ParseTree::Rule { chain, .. } => chain,
        }
    }

    /// Number of tree nodes, i.e. store instances of the matching complex.
    pub fn size(&self) -> usize {
        match self {
            ParseTree::Lexical { .. } => 1,
            ParseTree::Rule { children, .. } => {
                1 + children.iter().map(ParseTree::size).sum::<usize>()
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Back {
    Lexical(usize),
    /// Rule chain index and the child spans, one per body token.
    Rule(usize, Vec<(usize, usize)>),
}

#[derive(Debug, Clone)]
pub struct CkyResult {
    /// Categories deriving the whole sentence.
    pub categories: BTreeSet<Token>,
    n: usize,
    /// chart[(i, j)]: half-open span i..j to the first derivation of each category
    chart: HashMap<(usize, usize), BTreeMap<Token, Back>>,
    ids: Vec<String>,
    bodies: Vec<Vec<Token>>,
}

impl CkyResult {
    pub fn accepts(&self) -> bool {
        !self.categories.is_empty()
    }

    pub fn accepts_as(&self, category: &Token) -> bool {
        self.categories.contains(category)
    }

    /// Categories deriving the half-open word span `i..j`.
    pub fn span(&self, i: usize, j: usize) -> BTreeSet<Token> {
        self.chart
            .get(&(i, j))
            .map(|c| c.keys().cloned().collect())
            .unwrap_or_default()
    }

    /// One parse tree for `category` over the whole sentence.
    pub fn tree(&self, category: &Token) -> Option<ParseTree> {
        self.categories
            .contains(category)
            .then(|| self.build(0, self.n, category))
    }

    fn build(&self, i: usize, j: usize, cat: &Token) -> ParseTree {
        match &self.chart[&(i, j)][cat] {
            Back::Lexical(c) => ParseTree::Lexical {
                chain: self.ids[*c].clone(),
                position: i + 1,
            },
            Back::Rule(c, spans) => ParseTree::Rule {
                chain: self.ids[*c].clone(),
                children: spans
                    .iter()
                    .zip(&self.bodies[*c])
                    .map(|(&(a, b), t)| self.build(a, b, t))
                    .collect(),
            },
        }
    }
}

/// Chart recognition of `fresh` under the grammar read off a pure store.
pub fn cky_reference(fresh: &Chain, store: &ChainStore) -> Result<CkyResult, Error> {
    if let Some(bad) = store.chains().iter().find(|c| !c.is_pure()) {
        return Err(Error::ImpureStore(bad.id.clone()));
    }
    let n = fresh.body.len();
    let rules: Vec<usize> = (0..store.len())
        .filter(|&c| !store.chains()[c].is_lexical())
        .collect();
    let chains = store.chains();
    let mut chart: HashMap<(usize, usize), BTreeMap<Token, Back>> = HashMap::new();

    for len in 1..=n {
        for i in 0..=n - len {
            let j = i + len;
            let mut cell: BTreeMap<Token, Back> = BTreeMap::new();
            if len == 1 {
                for (c, chain) in chains.iter().enumerate() {
                    if chain.is_lexical() && chain.body[0] == fresh.body[i] {
                        let x = chain.conclusion.clone().expect("pure chains conclude");
                        cell.entry(x).or_insert(Back::Lexical(c));
                    }
                }
            }
            for &c in &rules {
                let body = &chains[c].body;
                if body.len() < 2 || body.len() > len {
                    continue;
                }
                let mut spans = Vec::new();
                if split(&chart, body, i, j, &mut spans) {
                    let x = chains[c].conclusion.clone().expect("pure chains conclude");
                    cell.entry(x).or_insert(Back::Rule(c, spans));
                }
            }
            // unary closure
            loop {
                let mut added = false;
                for &c in &rules {
                    let body = &chains[c].body;
                    let x = chains[c].conclusion.as_ref().expect("pure chains conclude");
                    if body.len() == 1 && cell.contains_key(&body[0]) && !cell.contains_key(x) {
                        cell.insert(x.clone(), Back::Rule(c, vec![(i, j)]));
                        added = true;
                    }
                }
                if !added {
                    break;
                }
            }
            if !cell.is_empty() {
                chart.insert((i, j), cell);
            }
        }
    }
    let categories = if n == 0 {
        BTreeSet::new()
    } else {
        chart
            .get(&(0, n))
            .map(|c| c.keys().cloned().collect())
            .unwrap_or_default()
    };
    Ok(CkyResult {
        categories,
        n,
        chart,
        ids: chains.iter().map(|c| c.id.clone()).collect(),
        bodies: chains.iter().map(|c| c.body.clone()).collect(),
    })
}

/// Finds the first split of `i..j` into `body.len()` nonempty spans, each
/// deriving the corresponding body category.
fn split(
    chart: &HashMap<(usize, usize), BTreeMap<Token, Back>>,
    body: &[Token],
    i: usize,
    j: usize,
    spans: &mut Vec<(usize, usize)>,
) -> bool {
    let Some((head, rest)) = body.split_first() else {
        return i == j;
    };
    if rest.is_empty() {
        if chart.get(&(i, j)).is_some_and(|c| c.contains_key(head)) {
            spans.push((i, j));
            return true;
        }
        return false;
    }
    for k in i + 1..=j - rest.len() {
        if chart.get(&(i, k)).is_some_and(|c| c.contains_key(head)) {
            spans.push((i, k));
            if split(chart, rest, k, j, spans) {
                return true;
            }
            spans.pop();
        }
    }
    false
}

/// Stacks the chains of a parse tree into a complex: lexical chains bond
/// their word to the fresh chain, every child's conclusion bonds to the
/// matching body token of its parent, and the root conclusion dangles.
pub fn tree_to_complex(
    tree: &ParseTree,
    fresh: &Chain,
    store: &ChainStore,
) -> Result<Complex, Error> {
    let mut x = Complex {
        instances: vec![instance_of(0, Source::Fresh, 1, fresh)],
        bonds: Vec::new(),
    };
    let mut copies: HashMap<String, usize> = HashMap::new();
    let mut next_word = 1;
    place(tree, fresh, store, &mut x, &mut copies, &mut next_word)?;
    if next_word != fresh.body.len() + 1 {
        return Err(Error::TreeMismatch(format!(
            "tree covers {} of {} words",
            next_word - 1,
            fresh.body.len()
        )));
    }
    Ok(x.canonical())
}

fn place(
    tree: &ParseTree,
    fresh: &Chain,
    store: &ChainStore,
    x: &mut Complex,
    copies: &mut HashMap<String, usize>,
    next_word: &mut usize,
) -> Result<usize, Error> {
    let id = tree.chain();
    let chain = store
        .get(id)
        .ok_or_else(|| Error::UnknownChain(id.to_string()))?;
    if chain.conclusion.is_none() {
        return Err(Error::TreeMismatch(format!("chain {id} has no conclusion")));
    }
    let copy = copies.entry(id.to_string()).or_insert(0);
    *copy += 1;
    let me = x.instances.len();
    x.instances
        .push(instance_of(me, Source::Store(id.to_string()), *copy, chain));
    match tree {
        ParseTree::Lexical { position, .. } => {
            if !chain.is_lexical() {
                return Err(Error::TreeMismatch(format!(
                    "chain {id} is not a word chain"
                )));
            }
            if *position != *next_word {
                return Err(Error::TreeMismatch(format!(
                    "expected word {next_word}, got {position}"
                )));
            }
            if fresh.body.get(position - 1) != Some(&chain.body[0]) {
                return Err(Error::TreeMismatch(format!(
                    "chain {id} does not match word {position}"
                )));
            }
            *next_word += 1;
            x.bonds.push(Bond::new(
                Occurrence::new(0, Slot::Body(*position)),
                Occurrence::new(me, Slot::Body(1)),
            ));
        }
        ParseTree::Rule { children, .. } => {
            if children.len() != chain.body.len() || chain.body.iter().any(|t| !t.is_category()) {
                return Err(Error::TreeMismatch(format!(
                    "chain {id} does not fit {} children",
                    children.len()
                )));
            }
            for (k, child) in children.iter().enumerate() {
                let c = place(child, fresh, store, x, copies, next_word)?;
                if x.instances[c].conclusion.as_ref() != Some(&chain.body[k]) {
                    return Err(Error::TreeMismatch(format!(
                        "child {} of chain {id} does not conclude {}",
                        k + 1,
                        chain.body[k]
                    )));
                }
                x.bonds.push(Bond::new(
                    Occurrence::new(c, Slot::Conclusion),
                    Occurrence::new(me, Slot::Body(k + 1)),
                ));
            }
        }
    }
    Ok(me)
}
