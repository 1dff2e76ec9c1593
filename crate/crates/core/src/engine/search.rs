//! Occurrence-driven complex search.
//!
//! The complex grows outward from the fresh chain. At every step the lowest
//! open occurrence (by instance, then slot) is closed in one of three ways:
//! it becomes the dangling conclusion, it bonds to an open occurrence of an
//! existing instance, or it bonds to a new copy of a store chain. Position
//! constraints are added as bonds form, so infeasible branches die early.
//! Because instances are created in breadth-first discovery order, every
//! leaf is already in canonical form and no complex is produced twice.
//!
//! A parity look-ahead prunes states that cannot end with a single loose
//! conclusion: every bond removes two occurrences of one label, so the open
//! occurrences plus everything still to be added must have an odd count of
//! exactly one label.

use std::collections::hash_map::Entry;
use std::collections::{BTreeSet, HashMap};

use crate::chain::{Chain, ChainStore, Token};

use super::positions::{IncrementalSystem, ORIGIN, STRICT, WEAK};
use super::{
    instance_of, solve_positions, Bond, Complex, Occurrence, RecognitionResult, SearchConfig,
    SearchMode, Slot, Source, Witness,
};

const NONE: usize = usize::MAX;

pub(crate) struct Compiled<'a> {
    pub fresh: &'a Chain,
    pub store: &'a ChainStore,
    pub fresh_body: Vec<u32>,
    pub chains: Vec<(Vec<u32>, Option<u32>)>,
    /// token -> (chain index, 0-based slot; `body.len()` is the conclusion)
    pub by_token: Vec<Vec<(usize, usize)>>,
    pub target: Option<Option<u32>>,
    parity: Option<Parity>,
}

/// Label parities as bit vectors over GF(2).
struct Parity {
    /// Fewest store chains whose parity vectors sum to a given vector.
    fewest: Option<HashMap<u128, usize>>,
    /// Row-reduced basis of the chain vectors, used when `fewest` would be
    /// too large to tabulate.
    basis: Vec<u128>,
    /// Labels occurring as some chain's conclusion.
    conclusions: Vec<u32>,
}

const PARITY_TABLE_LIMIT: usize = 1 << 16;

impl Parity {
    fn new(chains: &[(Vec<u32>, Option<u32>)], labels: usize) -> Option<Parity> {
        if labels > 128 {
            return None;
        }
        let vectors: Vec<u128> = chains
            .iter()
            .map(|(body, concl)| {
                body.iter()
                    .chain(concl)
                    .fold(0u128, |v, &t| v ^ (1u128 << t))
            })
            .collect();
        let mut basis: Vec<u128> = Vec::new();
        for &v in &vectors {
            let r = reduce(&basis, v);
            if r != 0 {
                basis.push(r);
                basis.sort_unstable_by(|a, b| b.cmp(a));
            }
        }
        let mut fewest = Some(HashMap::from([(0u128, 0usize)]));
        if basis.len() > 16 {
            fewest = None;
        }
        if let Some(table) = fewest.as_mut() {
            // breadth-first, so the first time a vector appears is the fewest
            let mut frontier = vec![0u128];
            let mut size = 0;
            while !frontier.is_empty() && table.len() < PARITY_TABLE_LIMIT {
                size += 1;
                let mut next = Vec::new();
                for &x in &frontier {
                    for &v in &vectors {
                        let y = x ^ v;
                        if let Entry::Vacant(e) = table.entry(y) {
                            e.insert(size);
                            next.push(y);
                        }
                    }
                }
                frontier = next;
            }
        }
        let mut conclusions: Vec<u32> = chains.iter().filter_map(|(_, c)| *c).collect();
        conclusions.sort_unstable();
        conclusions.dedup();
        Some(Parity {
            fewest,
            basis,
            conclusions,
        })
    }

    /// Whether adding at most `budget` store chains can turn the open
    /// parity `open` into `want`.
    fn reachable(&self, open: u128, want: u128, budget: usize) -> bool {
        let need = open ^ want;
        match &self.fewest {
            Some(table) => table.get(&need).is_some_and(|&k| k <= budget),
            None => reduce(&self.basis, need) == 0,
        }
    }
}

fn reduce(basis: &[u128], mut v: u128) -> u128 {
    for &b in basis {
        let top = 127 - b.leading_zeros();
        if v >> top & 1 == 1 {
            v ^= b;
        }
    }
    v
}

impl<'a> Compiled<'a> {
    pub fn new(fresh: &'a Chain, store: &'a ChainStore, target: Option<&Token>) -> Compiled<'a> {
        let mut ids: HashMap<&'a Token, u32> = HashMap::new();
        let mut intern = |t: &'a Token| -> u32 {
            let next = ids.len() as u32;
            *ids.entry(t).or_insert(next)
        };
        let chains: Vec<(Vec<u32>, Option<u32>)> = store
            .chains()
            .iter()
            .map(|c| {
                (
                    c.body.iter().map(&mut intern).collect(),
                    c.conclusion.as_ref().map(&mut intern),
                )
            })
            .collect();
        let fresh_body = fresh.body.iter().map(&mut intern).collect();
        let mut by_token = vec![Vec::new(); ids.len()];
        for (ci, (body, concl)) in chains.iter().enumerate() {
            for (s, &t) in body.iter().chain(concl.iter()).enumerate() {
                by_token[t as usize].push((ci, s));
            }
        }
        let target = target.map(|t| ids.get(t).copied());
        let parity = Parity::new(&chains, ids.len());
        Compiled {
            fresh,
            store,
            fresh_body,
            chains,
            by_token,
            target,
            parity,
        }
    }

    fn dangle_allowed(&self, tok: u32) -> bool {
        match self.target {
            None => true,
            Some(t) => t == Some(tok),
        }
    }
}

struct Inst {
    chain: Option<usize>,
    first: usize,
    body_len: usize,
}

struct Occ {
    tok: u32,
    inst: usize,
    conclusion: bool,
    node: usize,
    partner: usize,
}

struct Search<'c, 'a> {
    c: &'c Compiled<'a>,
    cfg: &'c SearchConfig,
    limit: usize,
    n: i64,
    insts: Vec<Inst>,
    occs: Vec<Occ>,
    copies: Vec<usize>,
    dangling: Option<usize>,
    sys: IncrementalSystem,
    found: Vec<Complex>,
    scratch: HashMap<u32, (usize, bool)>,
}

impl<'c, 'a> Search<'c, 'a> {
    fn new(c: &'c Compiled<'a>, cfg: &'c SearchConfig, limit: usize) -> Search<'c, 'a> {
        let mut s = Search {
            c,
            cfg,
            limit,
            n: c.fresh_body.len() as i64,
            insts: Vec::new(),
            occs: Vec::new(),
            copies: vec![0; c.chains.len()],
            dangling: None,
            sys: IncrementalSystem::new(),
            found: Vec::new(),
            scratch: HashMap::new(),
        };
        let ok = s.push_instance(None);
        debug_assert!(ok, "fresh chain is always placeable");
        s
    }

    fn lower_bound(&self) -> i64 {
        if self.cfg.enforce_span {
            1
        } else {
            0
        }
    }

    /// Adds an instance with its body constraints. The conclusion node stays
    /// unconstrained until it is bonded.
    fn push_instance(&mut self, chain: Option<usize>) -> bool {
        let (body, concl): (Vec<u32>, Option<u32>) = match chain {
            None => (self.c.fresh_body.clone(), None),
            Some(ci) => self.c.chains[ci].clone(),
        };
        let inst = self.insts.len();
        let first = self.occs.len();
        self.insts.push(Inst {
            chain,
            first,
            body_len: body.len(),
        });
        if let Some(ci) = chain {
            self.copies[ci] += 1;
        }
        let mut ok = true;
        let mut prev = None;
        for (k, &tok) in body.iter().enumerate() {
            let node = self.sys.add_node();
            self.occs.push(Occ {
                tok,
                inst,
                conclusion: false,
                node,
                partner: NONE,
            });
            if chain.is_none() {
                let k = k as i64 + 1;
                ok &= self.sys.add_edge(ORIGIN, node, (k, 0));
                ok &= self.sys.add_edge(node, ORIGIN, (-k, 0));
            } else {
                ok &= self.sys.add_edge(ORIGIN, node, (self.lower_bound(), 0));
                if self.cfg.enforce_span {
                    ok &= self.sys.add_edge(node, ORIGIN, (-self.n, 0));
                }
            }
            if let Some(p) = prev {
                ok &= self.sys.add_edge(p, node, STRICT);
            }
            prev = Some(node);
            if !ok {
                return false;
            }
        }
        if let Some(tok) = concl {
            let node = self.sys.add_node();
            self.occs.push(Occ {
                tok,
                inst,
                conclusion: true,
                node,
                partner: NONE,
            });
        }
        ok
    }

    fn pop_instance(&mut self) {
        let inst = self.insts.pop().expect("instance to pop");
        self.occs.truncate(inst.first);
        if let Some(ci) = inst.chain {
            self.copies[ci] -= 1;
        }
    }

    /// Constrains a conclusion that is about to be bonded.
    fn activate_conclusion(&mut self, o: usize) -> bool {
        let node = self.occs[o].node;
        let inst = &self.insts[self.occs[o].inst];
        let first = self.occs[inst.first].node;
        let last = self.occs[inst.first + inst.body_len - 1].node;
        if !self.sys.add_edge(ORIGIN, node, (self.lower_bound(), 0)) {
            return false;
        }
        if self.cfg.enforce_span && !self.sys.add_edge(node, ORIGIN, (-self.n, 0)) {
            return false;
        }
        if self.cfg.enforce_conclusion_interval {
            self.sys.add_edge(first, node, WEAK) && self.sys.add_edge(node, last, WEAK)
        } else {
            true
        }
    }

    fn bond(&mut self, o: usize, p: usize) -> bool {
        for q in [o, p] {
            if self.occs[q].conclusion && !self.activate_conclusion(q) {
                return false;
            }
        }
        let (a, b) = (self.occs[o].node, self.occs[p].node);
        if !(self.sys.add_edge(a, b, WEAK) && self.sys.add_edge(b, a, WEAK)) {
            return false;
        }
        self.occs[o].partner = p;
        self.occs[p].partner = o;
        true
    }

    fn unbond(&mut self, o: usize, p: usize) {
        self.occs[o].partner = NONE;
        if p < self.occs.len() {
            self.occs[p].partner = NONE;
        }
    }

    fn is_open(&self, q: usize) -> bool {
        self.occs[q].partner == NONE && self.dangling != Some(q)
    }

    /// Cheap look-ahead: every open occurrence from `from` on must still
    /// have some way to close.
    fn viable(&mut self, from: usize) -> bool {
        let can_grow = self.insts.len() < self.limit;
        self.scratch.clear();
        for q in from..self.occs.len() {
            if !self.is_open(q) {
                continue;
            }
            let o = &self.occs[q];
            self.scratch
                .entry(o.tok)
                .and_modify(|(inst, multi)| *multi |= *inst != o.inst)
                .or_insert((o.inst, false));
        }
        for q in from..self.occs.len() {
            if !self.is_open(q) {
                continue;
            }
            let o = &self.occs[q];
            if self.scratch[&o.tok].1 {
                continue;
            }
            if o.conclusion && self.dangling.is_none() && self.c.dangle_allowed(o.tok) {
                continue;
            }
            let growable = can_grow
                && self.c.by_token[o.tok as usize]
                    .iter()
                    .any(|&(ci, _)| self.copies[ci] < self.cfg.max_copies_per_chain);
            if !growable {
                return false;
            }
        }
        true
    }

    fn parity_ok(&self, from: usize) -> bool {
        let Some(parity) = &self.c.parity else {
            return true;
        };
        let open = (from..self.occs.len())
            .filter(|&q| self.is_open(q))
            .fold(0u128, |v, q| v ^ (1u128 << self.occs[q].tok));
        let budget = self.limit - self.insts.len();
        if self.dangling.is_some() {
            return parity.reachable(open, 0, budget);
        }
        match self.c.target {
            Some(Some(t)) => parity.reachable(open, 1u128 << t, budget),
            Some(None) => false,
            None => parity
                .conclusions
                .iter()
                .any(|&t| parity.reachable(open, 1u128 << t, budget)),
        }
    }

    fn dfs(&mut self, from: usize) {
        let mut o = from;
        while o < self.occs.len() && !self.is_open(o) {
            o += 1;
        }
        if o == self.occs.len() {
            if self.dangling.is_some() {
                let x = self.snapshot();
                self.found.push(x);
            }
            return;
        }
        if !self.viable(o) || !self.parity_ok(o) {
            return;
        }
        let tok = self.occs[o].tok;
        let inst_o = self.occs[o].inst;

        if self.occs[o].conclusion && self.dangling.is_none() && self.c.dangle_allowed(tok) {
            self.dangling = Some(o);
            self.dfs(o + 1);
            self.dangling = None;
        }

        for p in o + 1..self.occs.len() {
            if !self.is_open(p) || self.occs[p].tok != tok || self.occs[p].inst == inst_o {
                continue;
            }
            let mark = self.sys.mark();
            if self.bond(o, p) {
                self.dfs(o + 1);
                self.unbond(o, p);
            }
            self.sys.undo(mark);
        }

        if self.insts.len() < self.limit {
            let c = self.c;
            for &(ci, slot) in &c.by_token[tok as usize] {
                if self.copies[ci] >= self.cfg.max_copies_per_chain {
                    continue;
                }
                let mark = self.sys.mark();
                if self.push_instance(Some(ci)) {
                    let p = self.insts.last().expect("just pushed").first + slot;
                    if self.bond(o, p) {
                        self.dfs(o + 1);
                        self.unbond(o, p);
                    }
                }
                self.pop_instance();
                self.sys.undo(mark);
            }
        }
    }

    fn slot_of(&self, q: usize) -> Occurrence {
        let o = &self.occs[q];
        let first = self.insts[o.inst].first;
        let slot = if o.conclusion {
            Slot::Conclusion
        } else {
            Slot::Body(q - first + 1)
        };
        Occurrence::new(o.inst, slot)
    }

    fn snapshot(&self) -> Complex {
        let mut copies = vec![0usize; self.c.chains.len()];
        let instances = self
            .insts
            .iter()
            .enumerate()
            .map(|(id, inst)| match inst.chain {
                None => instance_of(id, Source::Fresh, 1, self.c.fresh),
                Some(ci) => {
                    copies[ci] += 1;
                    let chain = &self.c.store.chains()[ci];
                    instance_of(id, Source::Store(chain.id.clone()), copies[ci], chain)
                }
            })
            .collect();
        let mut bonds: Vec<Bond> = (0..self.occs.len())
            .filter(|&q| self.occs[q].partner != NONE && q < self.occs[q].partner)
            .map(|q| Bond::new(self.slot_of(q), self.slot_of(self.occs[q].partner)))
            .collect();
        bonds.sort();
        Complex { instances, bonds }
    }
}

/// All complexes with at most `limit` instances (fresh included), in
/// canonical form and in search order.
pub(crate) fn search_all(c: &Compiled<'_>, cfg: &SearchConfig, limit: usize) -> Vec<Complex> {
    if c.target == Some(None) || limit == 0 {
        return Vec::new();
    }
    let mut s = Search::new(c, cfg, limit);
    s.dfs(0);
    s.found
}

fn witness(x: Complex, cfg: &SearchConfig) -> Witness {
    let positions = solve_positions(&x, cfg).expect("search only emits feasible complexes");
    Witness {
        complex: x,
        positions,
    }
}

/// Smallest complexes leaving `target` (or anything, if `None`) dangling.
fn first_level(
    fresh: &Chain,
    store: &ChainStore,
    cfg: &SearchConfig,
    target: Option<&Token>,
) -> Vec<Complex> {
    let c = Compiled::new(fresh, store, target);
    for limit in 2..=cfg.max_instances {
        let mut level = search_all(&c, cfg, limit);
        if !level.is_empty() {
            level.sort_by_cached_key(|x| x.order_key(store));
            return level;
        }
    }
    Vec::new()
}

/// Decides whether `fresh` closes into a complete complex over `store`.
///
/// In `First` mode the search deepens one instance at a time, separately for
/// every category that could be left dangling (or only for `cfg.target`).
/// The result holds the smallest witness per reachable conclusion, ties
/// broken by store order of the chains used, and the overall smallest comes
/// first. In `All` mode every complex within the bounds is returned.
pub fn recognize(fresh: &Chain, store: &ChainStore, cfg: &SearchConfig) -> RecognitionResult {
    let rejected = RecognitionResult {
        accepted: false,
        conclusions: BTreeSet::new(),
        witnesses: Vec::new(),
    };
    if fresh.body.is_empty() || fresh.conclusion.is_some() {
        return rejected;
    }
    let found = match cfg.mode {
        SearchMode::All => {
            let c = Compiled::new(fresh, store, cfg.target.as_ref());
            let mut all = search_all(&c, cfg, cfg.max_instances);
            all.sort_by_cached_key(|x| x.order_key(store));
            all.dedup();
            all
        }
        SearchMode::First => {
            let targets: BTreeSet<&Token> = match &cfg.target {
                Some(t) => BTreeSet::from([t]),
                None => store
                    .chains()
                    .iter()
                    .filter_map(|c| c.conclusion.as_ref())
                    .collect(),
            };
            let mut best: Vec<Complex> = targets
                .into_iter()
                .filter_map(|t| first_level(fresh, store, cfg, Some(t)).into_iter().next())
                .collect();
            best.sort_by_cached_key(|x| x.order_key(store));
            best
        }
    };
    if found.is_empty() {
        return rejected;
    }
    let conclusions: BTreeSet<Token> = found
        .iter()
        .filter_map(|x| x.dangling_token().cloned())
        .collect();
    RecognitionResult {
        accepted: true,
        conclusions,
        witnesses: found.into_iter().map(|x| witness(x, cfg)).collect(),
    }
}
