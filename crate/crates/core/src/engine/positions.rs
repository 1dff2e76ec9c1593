//! Time-line feasibility of a complex.
//!
//! Every occurrence gets a rational position:
//!
//! * P1: fresh body token `k` sits at exactly `k`;
//! * P2: body positions increase strictly along every chain;
//! * P3: bonded occurrences share a position;
//! * P4: a bonded conclusion lies between its chain's first and last body
//!   position;
//! * P5: bonded occurrences lie in `[1, n]` for a sentence of `n` words.
//!
//! These are difference constraints. Strict edges carry an infinitesimal, so
//! weights are pairs `(real, eps)` compared lexicographically, and the system
//! is feasible iff the longest-path graph from an origin node has no positive
//! cycle. The longest-path distances give the canonical (earliest) placement.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{Complex, Occurrence, Rule, SearchConfig, Slot, Source};

pub(crate) type Weight = (i64, i64);

pub(crate) const STRICT: Weight = (0, 1);
pub(crate) const WEAK: Weight = (0, 0);

fn add(a: Weight, b: Weight) -> Weight {
    (a.0 + b.0, a.1 + b.1)
}

/// Edge `u -> v` with weight `w` encodes `pos(v) >= pos(u) + w`.
#[derive(Debug, Clone, Default)]
pub(crate) struct DiffSystem {
    nodes: usize,
    edges: Vec<(usize, usize, Weight)>,
}

pub(crate) const ORIGIN: usize = 0;

impl DiffSystem {
    pub fn new(occurrence_nodes: usize) -> DiffSystem {
        DiffSystem {
            nodes: occurrence_nodes + 1,
            edges: Vec::new(),
        }
    }

    pub fn edge(&mut self, u: usize, v: usize, w: Weight) {
        self.edges.push((u, v, w));
    }

    pub fn at_least(&mut self, x: usize, lo: i64) {
        self.edge(ORIGIN, x, (lo, 0));
    }

    pub fn at_most(&mut self, x: usize, hi: i64) {
        self.edge(x, ORIGIN, (-hi, 0));
    }

    pub fn equal(&mut self, a: usize, b: usize) {
        self.edge(a, b, WEAK);
        self.edge(b, a, WEAK);
    }

    /// Longest-path distances from the origin, or the nodes of a positive
    /// cycle.
    pub fn solve(&self) -> Result<Vec<Option<Weight>>, Vec<usize>> {
        let mut dist: Vec<Option<Weight>> = vec![None; self.nodes];
        let mut pred: Vec<usize> = vec![usize::MAX; self.nodes];
        dist[ORIGIN] = Some((0, 0));
        let mut last_changed = None;
        for _ in 0..self.nodes {
            last_changed = None;
            for &(u, v, w) in &self.edges {
                let Some(du) = dist[u] else { continue };
                let cand = add(du, w);
                if dist[v].is_none_or(|dv| cand > dv) {
                    dist[v] = Some(cand);
                    pred[v] = u;
                    last_changed = Some(v);
                }
            }
            if last_changed.is_none() {
                return Ok(dist);
            }
        }
        // Still relaxing after |V| rounds: walk predecessors into the cycle.
        let mut v = last_changed.expect("relaxation happened");
        for _ in 0..self.nodes {
            if pred[v] == usize::MAX {
                return Err(vec![v]);
            }
            v = pred[v];
        }
        let start = v;
        let mut cycle = vec![start];
        let mut cur = pred[start];
        while cur != start && cur != usize::MAX && cycle.len() <= self.nodes {
            cycle.push(cur);
            cur = pred[cur];
        }
        cycle.reverse();
        Err(cycle)
    }
}

/// Incremental version used during search: constraints are added one at a
/// time and rolled back on backtrack. Distances are kept as a feasible
/// longest-path labelling; adding edge `u -> v` fails exactly when
/// propagation from `v` would have to raise `u` (or the origin), which means
/// the new edge closes a positive cycle.
#[derive(Debug, Clone)]
pub(crate) struct IncrementalSystem {
    dist: Vec<Option<Weight>>,
    adj: Vec<Vec<(usize, Weight)>>,
    trail: Vec<Trail>,
    queue: VecDeque<usize>,
    queued: Vec<bool>,
}

#[derive(Debug, Clone, Copy)]
enum Trail {
    Node,
    Edge(usize),
    Dist(usize, Option<Weight>),
}

impl IncrementalSystem {
    pub fn new() -> IncrementalSystem {
        IncrementalSystem {
            dist: vec![Some((0, 0))],
            adj: vec![Vec::new()],
            trail: Vec::new(),
            queue: VecDeque::new(),
            queued: vec![false],
        }
    }

    pub fn add_node(&mut self) -> usize {
        self.dist.push(None);
        self.adj.push(Vec::new());
        self.queued.push(false);
        self.trail.push(Trail::Node);
        self.dist.len() - 1
    }

    pub fn mark(&self) -> usize {
        self.trail.len()
    }

    pub fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("non-empty trail") {
                Trail::Node => {
                    self.dist.pop();
                    self.adj.pop();
                    self.queued.pop();
                }
                Trail::Edge(u) => {
                    self.adj[u].pop();
                }
                Trail::Dist(v, old) => self.dist[v] = old,
            }
        }
    }

    #[cfg(test)]
    pub fn dist(&self, v: usize) -> Option<Weight> {
        self.dist[v]
    }

    /// Adds `pos(v) >= pos(u) + w`. On `false` the system is inconsistent
    /// and the caller must `undo` to an earlier mark.
    pub fn add_edge(&mut self, u: usize, v: usize, w: Weight) -> bool {
        self.adj[u].push((v, w));
        self.trail.push(Trail::Edge(u));
        let Some(du) = self.dist[u] else {
            return true;
        };
        let cand = add(du, w);
        if self.dist[v].is_some_and(|dv| dv >= cand) {
            return true;
        }
        if v == u || v == ORIGIN {
            return false;
        }
        self.set(v, cand);
        self.queue.clear();
        self.queue.push_back(v);
        self.queued[v] = true;
        let mut ok = true;
        'outer: while let Some(x) = self.queue.pop_front() {
            self.queued[x] = false;
            let dx = self.dist[x].expect("queued nodes have distances");
            for i in 0..self.adj[x].len() {
                let (y, wy) = self.adj[x][i];
                let cand = add(dx, wy);
                if self.dist[y].is_none_or(|dy| cand > dy) {
                    if y == u || y == ORIGIN {
                        ok = false;
                        break 'outer;
                    }
                    self.set(y, cand);
                    if !self.queued[y] {
                        self.queued[y] = true;
                        self.queue.push_back(y);
                    }
                }
            }
        }
        if !ok {
            for q in self.queue.drain(..) {
                self.queued[q] = false;
            }
        }
        ok
    }

    fn set(&mut self, v: usize, d: Weight) {
        self.trail.push(Trail::Dist(v, self.dist[v]));
        self.dist[v] = Some(d);
    }
}

/// Placement of one merged class of occurrences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositionClass {
    pub occurrences: Vec<Occurrence>,
    #[serde(with = "ratio_text")]
    pub position: Ratio<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PositionAssignment {
    pub classes: Vec<PositionClass>,
}

impl PositionAssignment {
    pub fn position(&self, occ: Occurrence) -> Option<Ratio<i64>> {
        self.classes
            .iter()
            .find(|c| c.occurrences.contains(&occ))
            .map(|c| c.position)
    }
}

pub(crate) mod ratio_text {
    use num_rational::Ratio;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Ratio<i64>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<i64>, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).ok_or_else(|| D::Error::custom(format!("bad rational {text:?}")))
    }

    pub fn parse(text: &str) -> Option<Ratio<i64>> {
        match text.split_once('/') {
            Some((n, d)) => {
                let d: i64 = d.trim().parse().ok()?;
                let n: i64 = n.trim().parse().ok()?;
                (d != 0).then(|| Ratio::new(n, d))
            }
            None => Some(Ratio::from_integer(text.trim().parse().ok()?)),
        }
    }
}

/// A violated layer together with the occurrences on the offending cycle
/// (empty when the cycle only runs through the origin bounds).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Infeasible {
    pub rule: Rule,
    pub cycle: Vec<Occurrence>,
}

struct Builder<'a> {
    x: &'a Complex,
    node: HashMap<Occurrence, usize>,
    occs: Vec<Occurrence>,
    dangling: Option<Occurrence>,
    n: i64,
}

impl<'a> Builder<'a> {
    fn new(x: &'a Complex) -> Builder<'a> {
        let occs = x.occurrences();
        let node = occs.iter().enumerate().map(|(i, o)| (*o, i + 1)).collect();
        let n = x.fresh().map_or(0, |f| f.body.len()) as i64;
        Builder {
            x,
            node,
            occs,
            dangling: x.dangling(),
            n,
        }
    }

    fn system(&self, upto: Rule, cfg: &SearchConfig) -> DiffSystem {
        let mut sys = DiffSystem::new(self.occs.len());
        for &o in &self.occs {
            sys.at_least(self.node[&o], 0);
        }
        for inst in &self.x.instances {
            let fresh = inst.source == Source::Fresh;
            for k in 1..=inst.body.len() {
                let v = self.node[&Occurrence::new(inst.id, Slot::Body(k))];
                if fresh {
                    sys.at_least(v, k as i64);
                    sys.at_most(v, k as i64);
                }
                if upto >= Rule::P2 && k > 1 {
                    let u = self.node[&Occurrence::new(inst.id, Slot::Body(k - 1))];
                    sys.edge(u, v, STRICT);
                }
            }
        }
        if upto >= Rule::P3 {
            for b in &self.x.bonds {
                sys.equal(self.node[&b.a], self.node[&b.b]);
            }
        }
        if upto >= Rule::P4 && cfg.enforce_conclusion_interval {
            for inst in &self.x.instances {
                let c = Occurrence::new(inst.id, Slot::Conclusion);
                if inst.conclusion.is_none() || Some(c) == self.dangling {
                    continue;
                }
                let first = self.node[&Occurrence::new(inst.id, Slot::Body(1))];
                let last = self.node[&Occurrence::new(inst.id, Slot::Body(inst.body.len()))];
                sys.edge(first, self.node[&c], WEAK);
                sys.edge(self.node[&c], last, WEAK);
            }
        }
        if upto >= Rule::P5 && cfg.enforce_span {
            for &o in &self.occs {
                if Some(o) != self.dangling {
                    sys.at_least(self.node[&o], 1);
                    sys.at_most(self.node[&o], self.n);
                }
            }
        }
        sys
    }

    fn cycle(&self, nodes: Vec<usize>) -> Vec<Occurrence> {
        nodes
            .into_iter()
            .filter(|&v| v != ORIGIN)
            .map(|v| self.occs[v - 1])
            .collect()
    }
}

/// Adds constraint layers in rule order and reports the first one that
/// makes the system infeasible.
pub(crate) fn check_layers(
    x: &Complex,
    cfg: &SearchConfig,
) -> Result<Vec<Option<Weight>>, Infeasible> {
    let b = Builder::new(x);
    let mut last = None;
    for rule in [Rule::P2, Rule::P3, Rule::P4, Rule::P5] {
        match b.system(rule, cfg).solve() {
            Ok(d) => last = Some(d),
            Err(cycle) => {
                return Err(Infeasible {
                    rule,
                    cycle: b.cycle(cycle),
                })
            }
        }
    }
    Ok(last.expect("at least one layer"))
}

/// Canonical (earliest) placement of every merged occurrence class. The
/// dangling conclusion is unconstrained and is drawn at its chain's last
/// body position.
pub fn solve_positions(x: &Complex, cfg: &SearchConfig) -> Result<PositionAssignment, Infeasible> {
    let b = Builder::new(x);
    let dist = b
        .system(Rule::P5, cfg)
        .solve()
        .map_err(|cycle| Infeasible {
            rule: Rule::P5,
            cycle: b.cycle(cycle),
        })?;
    let eps = Ratio::new(1, b.occs.len() as i64 + 2);
    let value = |o: Occurrence| -> Ratio<i64> {
        let (c, s) = dist[b.node[&o]].unwrap_or((0, 0));
        Ratio::from_integer(c) + eps * s
    };

    let partners = x.partner_map();
    let mut classes: BTreeMap<Occurrence, Vec<Occurrence>> = BTreeMap::new();
    for &o in &b.occs {
        let rep = partners.get(&o).map_or(o, |p| o.min(*p));
        classes.entry(rep).or_default().push(o);
    }
    let classes = classes
        .into_values()
        .map(|mut occurrences| {
            occurrences.sort();
            let first = occurrences[0];
            let position = if Some(first) == b.dangling {
                let inst = x.instance(first.instance).expect("instance exists");
                value(Occurrence::new(first.instance, Slot::Body(inst.body.len())))
            } else {
                value(first)
            };
            PositionClass {
                occurrences,
                position,
            }
        })
        .collect();
    Ok(PositionAssignment { classes })
}
