//! Exhaustive enumeration by candidate multiset.
//!
//! Independent of the occurrence-driven search in [`super::search`]: this
//! walks every multiset of store chains within the bounds (smallest first,
//! then in store order), discards multisets that fail the parity filter, and
//! enumerates all bond matchings over the chosen instances. Copies of one
//! chain are interchangeable, so a bond into an untouched copy is only tried
//! on the first untouched copy other than the one being bonded from. Results are deduplicated by canonical form.

use std::collections::{BTreeMap, HashMap};

use crate::chain::{Chain, ChainStore, Token};

use super::positions::{IncrementalSystem, ORIGIN, STRICT, WEAK};
use super::{
    instance_of, parity_filter, solve_positions, Bond, Complex, Occurrence, SearchConfig, Slot,
    Source, Witness,
};

/// Nondecreasing index sequences of length `k` over `0..m`, each index used
/// at most `max_copies` times, in lexicographic order.
fn multisets(m: usize, k: usize, max_copies: usize) -> Vec<Vec<usize>> {
    fn rec(
        m: usize,
        k: usize,
        max_copies: usize,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            let used = cur.iter().rev().take_while(|&&x| x == i).count();
            if used >= max_copies {
                continue;
            }
            cur.push(i);
            rec(m, k, max_copies, i, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, k, max_copies, 0, &mut Vec::new(), &mut out);
    out
}

struct Occ<'a> {
    tok: &'a Token,
    inst: usize,
    slot: Slot,
    node: usize,
    partner: Option<usize>,
}

struct Matcher<'a, 'c> {
    cfg: &'c SearchConfig,
    fresh: &'a Chain,
    store: &'a ChainStore,
    multiset: &'c [usize],
    occs: Vec<Occ<'a>>,
    /// (first occurrence, body length) per instance
    spans: Vec<(usize, usize)>,
    touched: Vec<usize>,
    dangling: Option<usize>,
    sys: IncrementalSystem,
    n: i64,
    /// Canonical forms found so far, keyed by instance sources and bonds.
    found: BTreeMap<(Vec<Source>, Vec<Bond>), Complex>,
}

impl<'a, 'c> Matcher<'a, 'c> {
    fn new(
        fresh: &'a Chain,
        store: &'a ChainStore,
        multiset: &'c [usize],
        cfg: &'c SearchConfig,
    ) -> Option<Self> {
        let mut m = Matcher {
            cfg,
            fresh,
            store,
            multiset,
            occs: Vec::new(),
            spans: Vec::new(),
            touched: vec![0; multiset.len() + 1],
            dangling: None,
            sys: IncrementalSystem::new(),
            n: fresh.body.len() as i64,
            found: BTreeMap::new(),
        };
        let lo = if cfg.enforce_span { 1 } else { 0 };
        let chains = std::iter::once(fresh).chain(multiset.iter().map(|&ci| &store.chains()[ci]));
        for (inst, chain) in chains.enumerate() {
            let fresh_inst = inst == 0;
            m.spans.push((m.occs.len(), chain.body.len()));
            let mut prev = None;
            for (k, tok) in chain.body.iter().enumerate() {
                let node = m.sys.add_node();
                let mut ok = if fresh_inst {
                    let k = k as i64 + 1;
                    m.sys.add_edge(ORIGIN, node, (k, 0)) && m.sys.add_edge(node, ORIGIN, (-k, 0))
                } else {
                    m.sys.add_edge(ORIGIN, node, (lo, 0))
                        && (!cfg.enforce_span || m.sys.add_edge(node, ORIGIN, (-m.n, 0)))
                };
                if let Some(p) = prev {
                    ok = ok && m.sys.add_edge(p, node, STRICT);
                }
                if !ok {
                    return None;
                }
                prev = Some(node);
                m.occs.push(Occ {
                    tok,
                    inst,
                    slot: Slot::Body(k + 1),
                    node,
                    partner: None,
                });
            }
            if let Some(tok) = &chain.conclusion {
                let node = m.sys.add_node();
                m.occs.push(Occ {
                    tok,
                    inst,
                    slot: Slot::Conclusion,
                    node,
                    partner: None,
                });
            }
        }
        Some(m)
    }

    fn chain_of(&self, inst: usize) -> Option<usize> {
        (inst > 0).then(|| self.multiset[inst - 1])
    }

    fn constrain(&mut self, q: usize) -> bool {
        if self.occs[q].slot != Slot::Conclusion {
            return true;
        }
        let lo = if self.cfg.enforce_span { 1 } else { 0 };
        let node = self.occs[q].node;
        let (first, len) = self.spans[self.occs[q].inst];
        let (f, l) = (self.occs[first].node, self.occs[first + len - 1].node);
        self.sys.add_edge(ORIGIN, node, (lo, 0))
            && (!self.cfg.enforce_span || self.sys.add_edge(node, ORIGIN, (-self.n, 0)))
            && (!self.cfg.enforce_conclusion_interval
                || (self.sys.add_edge(f, node, WEAK) && self.sys.add_edge(node, l, WEAK)))
    }

    fn may_dangle(&self, q: usize) -> bool {
        self.occs[q].slot == Slot::Conclusion
            && self.dangling.is_none()
            && self
                .cfg
                .target
                .as_ref()
                .is_none_or(|t| t == self.occs[q].tok)
    }

    fn run(&mut self, from: usize) {
        let mut o = from;
        while o < self.occs.len() && (self.occs[o].partner.is_some() || self.dangling == Some(o)) {
            o += 1;
        }
        if o == self.occs.len() {
            if self.dangling.is_some() {
                self.record();
            }
            return;
        }
        if self.may_dangle(o) {
            self.dangling = Some(o);
            self.run(o + 1);
            self.dangling = None;
        }
        for p in o + 1..self.occs.len() {
            let (po, oo) = (&self.occs[p], &self.occs[o]);
            if po.partner.is_some()
                || self.dangling == Some(p)
                || po.tok != oo.tok
                || po.inst == oo.inst
            {
                continue;
            }
            let pi = po.inst;
            // an untouched copy is interchangeable with the untouched copy
            // before it, unless that one holds `o` itself
            if self.touched[pi] == 0
                && pi > 1
                && self.touched[pi - 1] == 0
                && oo.inst != pi - 1
                && self.chain_of(pi) == self.chain_of(pi - 1)
            {
                continue;
            }
            let mark = self.sys.mark();
            let ok = self.constrain(o) && self.constrain(p) && {
                let (a, b) = (self.occs[o].node, self.occs[p].node);
                self.sys.add_edge(a, b, WEAK) && self.sys.add_edge(b, a, WEAK)
            };
            if ok {
                self.occs[o].partner = Some(p);
                self.occs[p].partner = Some(o);
                self.touched[self.occs[o].inst] += 1;
                self.touched[pi] += 1;
                self.run(o + 1);
                self.touched[self.occs[o].inst] -= 1;
                self.touched[pi] -= 1;
                self.occs[o].partner = None;
                self.occs[p].partner = None;
            }
            self.sys.undo(mark);
        }
    }

    fn connected(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.spans.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for o in &self.occs {
            if let Some(q) = o.partner {
                let (a, b) = (
                    find(&mut parent, o.inst),
                    find(&mut parent, self.occs[q].inst),
                );
                parent[a] = b;
            }
        }
        let root = find(&mut parent, 0);
        (0..self.spans.len()).all(|i| find(&mut parent, i) == root)
    }

    fn record(&mut self) {
        if !self.connected() {
            return;
        }
        let mut copies: HashMap<usize, usize> = HashMap::new();
        let mut instances = vec![instance_of(0, Source::Fresh, 1, self.fresh)];
        for (i, &ci) in self.multiset.iter().enumerate() {
            let copy = copies.entry(ci).or_insert(0);
            *copy += 1;
            let chain = &self.store.chains()[ci];
            instances.push(instance_of(
                i + 1,
                Source::Store(chain.id.clone()),
                *copy,
                chain,
            ));
        }
        let bonds = self
            .occs
            .iter()
            .enumerate()
            .filter_map(|(q, o)| {
                let p = o.partner?;
                (q < p).then(|| {
                    Bond::new(
                        Occurrence::new(o.inst, o.slot),
                        Occurrence::new(self.occs[p].inst, self.occs[p].slot),
                    )
                })
            })
            .collect();
        let canonical = Complex { instances, bonds }.canonical();
        let sources = canonical
            .instances
            .iter()
            .map(|i| i.source.clone())
            .collect();
        self.found
            .entry((sources, canonical.bonds.clone()))
            .or_insert(canonical);
    }
}

fn witnesses_for(
    fresh: &Chain,
    store: &ChainStore,
    multiset: &[usize],
    cfg: &SearchConfig,
) -> Vec<Witness> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for &ci in multiset {
        *counts.entry(store.chains()[ci].id.clone()).or_insert(0) += 1;
    }
    if !parity_filter(fresh, store, &counts) {
        return Vec::new();
    }
    let Some(mut m) = Matcher::new(fresh, store, multiset, cfg) else {
        return Vec::new();
    };
    m.run(0);
    let mut found: Vec<Complex> = m.found.into_values().collect();
    found.sort_by_cached_key(|x| x.order_key(store));
    found
        .into_iter()
        .map(|x| {
            let positions =
                solve_positions(&x, cfg).expect("matcher only records feasible complexes");
            Witness {
                complex: x,
                positions,
            }
        })
        .collect()
}

/// Every complete complex within the bounds, ordered by instance count,
/// chain multiset (store order), bonds, then instance order; see
/// [`Complex::order_key`]. Serves as the brute-force
/// reference for [`super::recognize`].
pub fn enumerate_complexes<'a>(
    fresh: &'a Chain,
    store: &'a ChainStore,
    cfg: &'a SearchConfig,
) -> impl Iterator<Item = Witness> + 'a {
    let valid_fresh = !fresh.body.is_empty() && fresh.conclusion.is_none();
    let max_store = if valid_fresh {
        cfg.max_instances.saturating_sub(1)
    } else {
        0
    };
    (1..=max_store)
        .flat_map(move |k| multisets(store.len(), k, cfg.max_copies_per_chain))
        .flat_map(move |ms| witnesses_for(fresh, store, &ms, cfg))
}
