//! Complexes: chain instances joined by bonds between equal tokens.
//!
//! A complex is complete when every occurrence but one is bonded, the loose
//! one is a conclusion, the instances are connected, and the occurrences can
//! be placed on a time line that respects each chain's order (see
//! [`positions`]). The loose conclusion is what the sentence is recognized as.

pub mod cfg;
pub mod oracle;
pub mod positions;
pub mod search;

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chain::{Chain, ChainStore, Token};
use crate::error::Error;

pub use cfg::{cky_reference, tree_to_complex, CkyResult, ParseTree};
pub use oracle::enumerate_complexes;
pub use positions::{solve_positions, Infeasible, PositionAssignment, PositionClass};
pub use search::recognize;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Fresh,
    Store(String),
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Fresh => f.write_str("fresh"),
            Source::Store(id) => f.write_str(id),
        }
    }
}

/// One copy of a chain taking part in a complex. The body and conclusion are
/// a snapshot of the source chain so that a complex can be rendered without
/// its store.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainInstance {
    pub id: usize,
    pub source: Source,
    pub copy: usize,
    pub body: Vec<Token>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conclusion: Option<Token>,
}

impl ChainInstance {
    pub fn slots(&self) -> impl Iterator<Item = Slot> + '_ {
        (1..=self.body.len())
            .map(Slot::Body)
            .chain(self.conclusion.iter().map(|_| Slot::Conclusion))
    }

    pub fn token(&self, slot: Slot) -> Option<&Token> {
        match slot {
            Slot::Body(k) if k >= 1 => self.body.get(k - 1),
            Slot::Body(_) => None,
            Slot::Conclusion => self.conclusion.as_ref(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    /// 1-based body index.
    Body(usize),
    Conclusion,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Body(k) => write!(f, "{k}"),
            Slot::Conclusion => f.write_str("c"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Occurrence {
    pub instance: usize,
    pub slot: Slot,
}

impl Occurrence {
    pub fn new(instance: usize, slot: Slot) -> Occurrence {
        Occurrence { instance, slot }
    }
}

impl fmt::Display for Occurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "i{}_{}", self.instance, self.slot)
    }
}

/// An unordered pair of bonded occurrences, stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bond {
    pub a: Occurrence,
    pub b: Occurrence,
}

impl Bond {
    pub fn new(x: Occurrence, y: Occurrence) -> Bond {
        if x <= y {
            Bond { a: x, b: y }
        } else {
            Bond { a: y, b: x }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Complex {
    pub instances: Vec<ChainInstance>,
    pub bonds: Vec<Bond>,
}

impl Complex {
    pub fn instance(&self, id: usize) -> Option<&ChainInstance> {
        self.instances.iter().find(|i| i.id == id)
    }

    pub fn token(&self, occ: Occurrence) -> Option<&Token> {
        self.instance(occ.instance)?.token(occ.slot)
    }

    pub fn occurrences(&self) -> Vec<Occurrence> {
        self.instances
            .iter()
            .flat_map(|inst| inst.slots().map(move |s| Occurrence::new(inst.id, s)))
            .collect()
    }

    pub fn occurrence_count(&self) -> usize {
        self.instances
            .iter()
            .map(|i| i.body.len() + usize::from(i.conclusion.is_some()))
            .sum()
    }

    pub fn fresh(&self) -> Option<&ChainInstance> {
        self.instances.iter().find(|i| i.source == Source::Fresh)
    }

    /// Occurrences that take part in no bond.
    pub fn unbonded(&self) -> Vec<Occurrence> {
        let bonded: BTreeSet<Occurrence> = self.bonds.iter().flat_map(|b| [b.a, b.b]).collect();
        self.occurrences()
            .into_iter()
            .filter(|o| !bonded.contains(o))
            .collect()
    }

    /// The single unbonded conclusion of a complete complex.
    pub fn dangling(&self) -> Option<Occurrence> {
        match self.unbonded().as_slice() {
            [only] if only.slot == Slot::Conclusion => Some(*only),
            _ => None,
        }
    }

    pub fn dangling_token(&self) -> Option<&Token> {
        self.dangling().and_then(|o| self.token(o))
    }

    pub fn partner_map(&self) -> HashMap<Occurrence, Occurrence> {
        let mut map = HashMap::new();
        for b in &self.bonds {
            map.insert(b.a, b.b);
            map.insert(b.b, b.a);
        }
        map
    }

    /// Store-chain ids of the non-fresh instances, sorted by store order.
    pub fn chain_multiset(&self, store: &ChainStore) -> Vec<usize> {
        let mut ms: Vec<usize> = self
            .instances
            .iter()
            .filter_map(|i| match &i.source {
                Source::Store(id) => Some(store.index_of(id).unwrap_or(usize::MAX)),
                Source::Fresh => None,
            })
            .collect();
        ms.sort_unstable();
        ms
    }

    /// Relabels instances in breadth-first order from the fresh instance,
    /// following bonds slot by slot. Isomorphic complexes (up to permuting
    /// copies of the same chain) get identical canonical forms.
    pub fn canonical(&self) -> Complex {
        let partners = self.partner_map();
        let mut order: Vec<usize> = Vec::with_capacity(self.instances.len());
        let mut relabel: HashMap<usize, usize> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut starts: Vec<usize> = self
            .instances
            .iter()
            .filter(|i| i.source == Source::Fresh)
            .map(|i| i.id)
            .collect();
        starts.extend(
            self.instances
                .iter()
                .filter(|i| i.source != Source::Fresh)
                .map(|i| i.id),
        );
        for start in starts {
            if relabel.contains_key(&start) {
                continue;
            }
            relabel.insert(start, order.len());
            order.push(start);
            queue.push_back(start);
            while let Some(id) = queue.pop_front() {
                let inst = self.instance(id).expect("instance listed");
                for slot in inst.slots() {
                    if let Some(p) = partners.get(&Occurrence::new(id, slot)) {
                        if let Entry::Vacant(e) = relabel.entry(p.instance) {
                            e.insert(order.len());
                            order.push(p.instance);
                            queue.push_back(p.instance);
                        }
                    }
                }
            }
        }
        let mut copies: HashMap<&Source, usize> = HashMap::new();
        let instances = order
            .iter()
            .enumerate()
            .map(|(new_id, old)| {
                let inst = self.instance(*old).expect("instance listed");
                let copy = copies.entry(&inst.source).or_insert(0);
                *copy += 1;
                ChainInstance {
                    id: new_id,
                    source: inst.source.clone(),
                    copy: *copy,
                    body: inst.body.clone(),
                    conclusion: inst.conclusion.clone(),
                }
            })
            .collect();
        let map = |o: Occurrence| Occurrence::new(relabel[&o.instance], o.slot);
        let mut bonds: Vec<Bond> = self
            .bonds
            .iter()
            .map(|b| Bond::new(map(b.a), map(b.b)))
            .collect();
        bonds.sort();
        Complex { instances, bonds }
    }

    /// Deterministic ordering key: instance count, store-order chain
    /// multiset, bond list, then instance sources.
    pub fn order_key(&self, store: &ChainStore) -> (usize, Vec<usize>, Vec<Bond>, Vec<Source>) {
        let mut bonds = self.bonds.clone();
        bonds.sort();
        let sources = self.instances.iter().map(|i| i.source.clone()).collect();
        (
            self.instances.len(),
            self.chain_multiset(store),
            bonds,
            sources,
        )
    }
}

pub(crate) fn instance_of(id: usize, source: Source, copy: usize, chain: &Chain) -> ChainInstance {
    ChainInstance {
        id,
        source,
        copy,
        body: chain.body.clone(),
        conclusion: chain.conclusion.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    #[default]
    First,
    All,
}

/// Bounds and switches for complex search.
///
/// `max_instances` counts every instance including the fresh chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub max_instances: usize,
    pub max_copies_per_chain: usize,
    pub enforce_span: bool,
    pub enforce_conclusion_interval: bool,
    pub mode: SearchMode,
    /// Only accept complexes whose dangling conclusion is this token.
    pub target: Option<Token>,
}

pub const DEFAULT_MAX_INSTANCES: usize = 9;
pub const DEFAULT_MAX_COPIES: usize = 3;

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_instances: DEFAULT_MAX_INSTANCES,
            max_copies_per_chain: DEFAULT_MAX_COPIES,
            enforce_span: true,
            enforce_conclusion_interval: true,
            mode: SearchMode::First,
            target: None,
        }
    }
}

impl SearchConfig {
    pub fn all() -> SearchConfig {
        SearchConfig {
            mode: SearchMode::All,
            ..SearchConfig::default()
        }
    }

    pub fn with_bounds(mut self, max_instances: usize, max_copies: usize) -> SearchConfig {
        self.max_instances = max_instances;
        self.max_copies_per_chain = max_copies;
        self
    }

    pub fn with_target(mut self, target: Token) -> SearchConfig {
        self.target = Some(target);
        self
    }

    /// Whether a complex fits the instance and copy bounds.
    pub fn admits(&self, x: &Complex) -> bool {
        if x.instances.len() > self.max_instances {
            return false;
        }
        let mut copies: HashMap<&Source, usize> = HashMap::new();
        for inst in &x.instances {
            *copies.entry(&inst.source).or_insert(0) += 1;
        }
        copies
            .iter()
            .all(|(s, &n)| **s == Source::Fresh || n <= self.max_copies_per_chain)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub complex: Complex,
    pub positions: PositionAssignment,
}

impl Witness {
    pub fn dangling(&self) -> Option<&Token> {
        self.complex.dangling_token()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecognitionResult {
    pub accepted: bool,
    pub conclusions: BTreeSet<Token>,
    pub witnesses: Vec<Witness>,
}

/// Validity rules, in checking order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    C1,
    C2,
    C3,
    C4,
    P1,
    P2,
    P3,
    P4,
    P5,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub valid: bool,
    pub dangling: Option<Token>,
    pub first_violated_rule: Option<Rule>,
}

impl ValidationReport {
    fn violated(rule: Rule) -> ValidationReport {
        ValidationReport {
            valid: false,
            dangling: None,
            first_violated_rule: Some(rule),
        }
    }
}

/// Checks that every instance resolves against `fresh`/`store`, that its
/// snapshot matches the source chain, and that ids and bond endpoints are
/// well formed.
fn check_structure(x: &Complex, fresh: &Chain, store: &ChainStore) -> Result<(), Error> {
    let mut ids = BTreeSet::new();
    for inst in &x.instances {
        if !ids.insert(inst.id) {
            return Err(Error::MalformedComplex(format!(
                "duplicate instance id {}",
                inst.id
            )));
        }
        let chain = match &inst.source {
            Source::Fresh => fresh,
            Source::Store(id) => store
                .get(id)
                .ok_or_else(|| Error::UnknownChain(id.clone()))?,
        };
        let same_conclusion = match inst.source {
            Source::Fresh => inst.conclusion.is_none(),
            Source::Store(_) => inst.conclusion == chain.conclusion,
        };
        if inst.body != chain.body || !same_conclusion {
            return Err(Error::MalformedComplex(format!(
                "instance {} does not match chain {}",
                inst.id, inst.source
            )));
        }
    }
    for b in &x.bonds {
        for o in [b.a, b.b] {
            if x.token(o).is_none() {
                return Err(Error::MalformedComplex(format!(
                    "bond endpoint {o} does not exist"
                )));
            }
        }
    }
    Ok(())
}

/// Checks rules C1-C4 and position feasibility, reporting the first violated
/// rule.
pub fn validate(
    x: &Complex,
    fresh: &Chain,
    store: &ChainStore,
    cfg: &SearchConfig,
) -> Result<ValidationReport, Error> {
    check_structure(x, fresh, store)?;

    let fresh_count = x
        .instances
        .iter()
        .filter(|i| i.source == Source::Fresh)
        .count();
    if fresh_count != 1 || fresh.conclusion.is_some() {
        return Ok(ValidationReport::violated(Rule::C1));
    }

    let mut seen = BTreeSet::new();
    for b in &x.bonds {
        if b.a.instance == b.b.instance
            || x.token(b.a) != x.token(b.b)
            || !seen.insert(b.a)
            || !seen.insert(b.b)
        {
            return Ok(ValidationReport::violated(Rule::C2));
        }
    }

    let Some(dangling) = x.dangling() else {
        return Ok(ValidationReport::violated(Rule::C3));
    };

    if !is_connected(x) {
        return Ok(ValidationReport::violated(Rule::C4));
    }

    if let Err(infeasible) = positions::check_layers(x, cfg) {
        return Ok(ValidationReport::violated(infeasible.rule));
    }

    Ok(ValidationReport {
        valid: true,
        dangling: x.token(dangling).cloned(),
        first_violated_rule: None,
    })
}

fn is_connected(x: &Complex) -> bool {
    let Some(first) = x.instances.first() else {
        return true;
    };
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for b in &x.bonds {
        adj.entry(b.a.instance).or_default().push(b.b.instance);
        adj.entry(b.b.instance).or_default().push(b.a.instance);
    }
    let mut seen = BTreeSet::from([first.id]);
    let mut stack = vec![first.id];
    while let Some(id) = stack.pop() {
        for &n in adj.get(&id).into_iter().flatten() {
            if seen.insert(n) {
                stack.push(n);
            }
        }
    }
    seen.len() == x.instances.len()
}

/// Necessary condition for a candidate multiset to close into a complex:
/// exactly one token has an odd occurrence count, and that token occurs as
/// a conclusion somewhere in the multiset.
pub fn parity_filter(
    fresh: &Chain,
    store: &ChainStore,
    multiset: &BTreeMap<String, usize>,
) -> bool {
    let mut counts: HashMap<&Token, usize> = HashMap::new();
    let mut conclusions: BTreeSet<&Token> = BTreeSet::new();
    for t in &fresh.body {
        *counts.entry(t).or_insert(0) += 1;
    }
    for (id, &n) in multiset {
        if n == 0 {
            continue;
        }
        let Some(chain) = store.get(id) else {
            return false;
        };
        for t in chain.body.iter().chain(chain.conclusion.iter()) {
            *counts.entry(t).or_insert(0) += n;
        }
        if let Some(c) = &chain.conclusion {
            conclusions.insert(c);
        }
    }
    let odd: Vec<&Token> = counts
        .iter()
        .filter(|(_, &n)| n % 2 == 1)
        .map(|(t, _)| *t)
        .collect();
    matches!(odd.as_slice(), [t] if conclusions.contains(t))
}

/// Occurrence counts per token over a whole complex.
pub fn token_counts(x: &Complex) -> BTreeMap<Token, usize> {
    let mut counts = BTreeMap::new();
    for inst in &x.instances {
        for t in inst.body.iter().chain(inst.conclusion.iter()) {
            *counts.entry(t.clone()).or_insert(0) += 1;
        }
    }
    counts
}
