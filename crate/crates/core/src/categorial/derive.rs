//! Bounded chart search for derivations.
//!
//! Each span cell holds the types derivable for that span. Unary rules are
//! closed per cell, at most `max_unary_chain` in a row, and no type may grow
//! past `max_type_atoms` atoms. A cell node is identified by its type, the
//! number of unary steps on top and the last such step, so every derivation
//! tree corresponds to exactly one path through the chart.
//!
//! Three spurious variants are never built: undoing an associativity step
//! with its converse, and applying a freshly lifted type as a function to
//! the argument it was lifted over (that reproduces plain application).

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::Error;

use super::lexicon::Lexicon;
use super::rules::{apply_rule, RuleKind, Step};
use super::types::{format_type, CatType};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeriveBounds {
    pub max_type_atoms: usize,
    pub max_unary_chain: usize,
    /// Cap on the number of derivations returned.
    pub max_derivations: usize,
}

impl Default for DeriveBounds {
    fn default() -> Self {
        DeriveBounds {
            max_type_atoms: 7,
            max_unary_chain: 2,
            max_derivations: 10_000,
        }
    }
}

/// A derivation tree. Spans are 1-based and inclusive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Derivation {
    Leaf {
        word: String,
        position: usize,
        ty: CatType,
    },
    Node {
        step: Step,
        span: (usize, usize),
        ty: CatType,
        children: Vec<Derivation>,
    },
}

impl Derivation {
    pub fn ty(&self) -> &CatType {
        match self {
            Derivation::Leaf { ty, .. } | Derivation::Node { ty, .. } => ty,
        }
    }

    pub fn span(&self) -> (usize, usize) {
        match self {
            Derivation::Leaf { position, .. } => (*position, *position),
            Derivation::Node { span, .. } => *span,
        }
    }

    /// Rule steps in pre-order.
    pub fn steps(&self) -> Vec<Step> {
        let mut out = Vec::new();
        self.walk(&mut |d| {
            if let Derivation::Node { step, .. } = d {
                out.push(*step);
            }
        });
        out
    }

    fn walk(&self, f: &mut impl FnMut(&Derivation)) {
        f(self);
        if let Derivation::Node { children, .. } = self {
            for c in children {
                c.walk(f);
            }
        }
    }
}

/// One line per node, children indented under their parent:
/// `[1,2] R1L : S` for rule nodes and `[1,1] "birds" : NP` for words.
pub fn render_derivation(d: &Derivation) -> String {
    fn go(d: &Derivation, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        match d {
            Derivation::Leaf { word, position, ty } => {
                let _ = writeln!(
                    out,
                    "{pad}[{position},{position}] \"{word}\" : {}",
                    format_type(ty)
                );
            }
            Derivation::Node {
                step,
                span,
                ty,
                children,
            } => {
                let _ = writeln!(
                    out,
                    "{pad}[{},{}] {step} : {}",
                    span.0,
                    span.1,
                    format_type(ty)
                );
                for c in children {
                    go(c, depth + 1, out);
                }
            }
        }
    }
    let mut out = String::new();
    go(d, 0, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Way {
    Leaf,
    Unary(Step, usize),
    /// step, split point, left node, right node
    Binary(Step, usize, usize, usize),
}

#[derive(Debug)]
struct Node {
    ty: CatType,
    run: usize,
    top: Option<Step>,
    ways: Vec<Way>,
}

#[derive(Debug, Default)]
struct Cell {
    nodes: Vec<Node>,
    index: HashMap<(CatType, usize, Option<Step>), usize>,
}

impl Cell {
    fn add(&mut self, ty: CatType, run: usize, top: Option<Step>, way: Way) {
        let key = (ty, run, top);
        match self.index.get(&key) {
            Some(&k) => {
                if !self.nodes[k].ways.contains(&way) {
                    self.nodes[k].ways.push(way);
                }
            }
            None => {
                self.index.insert(key.clone(), self.nodes.len());
                self.nodes.push(Node {
                    ty: key.0,
                    run,
                    top,
                    ways: vec![way],
                });
            }
        }
    }
}

struct Chart<'a> {
    words: &'a [&'a str],
    /// cells[(i, j)] for the half-open span i..j
    cells: HashMap<(usize, usize), Cell>,
}

fn lifted(step: Option<Step>, side: Step) -> bool {
    step == Some(side)
}

fn build<'a>(
    lexicon: &Lexicon,
    words: &'a [&'a str],
    target: &CatType,
    bounds: &DeriveBounds,
) -> Result<Chart<'a>, Error> {
    let n = words.len();
    let mut lifts: BTreeSet<CatType> = target.atoms().into_iter().map(CatType::atom).collect();
    for w in words {
        let types = lexicon.types_of(w);
        if types.is_empty() {
            return Err(Error::UnknownWord(w.to_string()));
        }
        lifts.extend(types.into_iter().cloned());
    }
    let mut chart = Chart {
        words,
        cells: HashMap::new(),
    };
    for len in 1..=n {
        for i in 0..=n - len {
            let j = i + len;
            let mut cell = Cell::default();
            if len == 1 {
                for ty in lexicon.types_of(words[i]) {
                    cell.add(ty.clone(), 0, None, Way::Leaf);
                }
            }
            for k in i + 1..j {
                let (left, right) = (&chart.cells[&(i, k)], &chart.cells[&(k, j)]);
                for (li, l) in left.nodes.iter().enumerate() {
                    for (ri, r) in right.nodes.iter().enumerate() {
                        for step in Step::BINARY {
                            if (step == Step::R1R && lifted(l.top, Step::R4R))
                                || (step == Step::R1L && lifted(r.top, Step::R4L))
                            {
                                continue;
                            }
                            if let Some(ty) = apply_rule(step, &[&l.ty, &r.ty], None) {
                                if ty.size() <= bounds.max_type_atoms {
                                    cell.add(ty, 0, None, Way::Binary(step, k, li, ri));
                                }
                            }
                        }
                    }
                }
            }
            let mut idx = 0;
            while idx < cell.nodes.len() {
                let (ty, run, top) = {
                    let node = &cell.nodes[idx];
                    (node.ty.clone(), node.run, node.top)
                };
                if run < bounds.max_unary_chain {
                    let mut out: Vec<(Step, CatType)> = Vec::new();
                    for (step, undo) in [(Step::R3R, Step::R3L), (Step::R3L, Step::R3R)] {
                        if top != Some(undo) {
                            out.extend(apply_rule(step, &[&ty], None).map(|t| (step, t)));
                        }
                    }
                    for b in &lifts {
                        for step in [Step::R4R, Step::R4L] {
                            out.extend(apply_rule(step, &[&ty], Some(b)).map(|t| (step, t)));
                        }
                    }
                    for (step, t) in out {
                        if t.size() <= bounds.max_type_atoms {
                            cell.add(t, run + 1, Some(step), Way::Unary(step, idx));
                        }
                    }
                }
                idx += 1;
            }
            chart.cells.insert((i, j), cell);
        }
    }
    Ok(chart)
}

impl Chart<'_> {
    fn trees(&self, i: usize, j: usize, node: usize, cap: usize) -> Vec<Derivation> {
        let cell = &self.cells[&(i, j)];
        let nd = &cell.nodes[node];
        let mut out = Vec::new();
        for way in &nd.ways {
            if out.len() >= cap {
                break;
            }
            match *way {
                Way::Leaf => out.push(Derivation::Leaf {
                    word: self.words[i].to_string(),
                    position: i + 1,
                    ty: nd.ty.clone(),
                }),
                Way::Unary(step, child) => {
                    for c in self.trees(i, j, child, cap - out.len()) {
                        out.push(Derivation::Node {
                            step,
                            span: (i + 1, j),
                            ty: nd.ty.clone(),
                            children: vec![c],
                        });
                    }
                }
                Way::Binary(step, k, l, r) => {
                    let lefts = self.trees(i, k, l, cap - out.len());
                    let rights = self.trees(k, j, r, cap - out.len());
                    'outer: for a in &lefts {
                        for b in &rights {
                            if out.len() >= cap {
                                break 'outer;
                            }
                            out.push(Derivation::Node {
                                step,
                                span: (i + 1, j),
                                ty: nd.ty.clone(),
                                children: vec![a.clone(), b.clone()],
                            });
                        }
                    }
                }
            }
        }
        out
    }

    fn count(
        &self,
        i: usize,
        j: usize,
        node: usize,
        memo: &mut HashMap<(usize, usize, usize), u128>,
    ) -> u128 {
        if let Some(&c) = memo.get(&(i, j, node)) {
            return c;
        }
        let nd = &self.cells[&(i, j)].nodes[node];
        let total = nd
            .ways
            .iter()
            .map(|w| match *w {
                Way::Leaf => 1,
                Way::Unary(_, c) => self.count(i, j, c, memo),
                Way::Binary(_, k, l, r) => self
                    .count(i, k, l, memo)
                    .saturating_mul(self.count(k, j, r, memo)),
            })
            .fold(0u128, u128::saturating_add);
        memo.insert((i, j, node), total);
        total
    }

    fn roots<'s>(&'s self, target: &'s CatType) -> impl Iterator<Item = usize> + 's {
        let n = self.words.len();
        self.cells[&(0, n)]
            .nodes
            .iter()
            .enumerate()
            .filter(move |(_, nd)| nd.ty == *target)
            .map(|(k, _)| k)
    }
}

/// All derivations of `target` for the whole word sequence within `bounds`,
/// up to `bounds.max_derivations`.
pub fn derive(
    lexicon: &Lexicon,
    words: &[&str],
    target: &CatType,
    bounds: &DeriveBounds,
) -> Result<Vec<Derivation>, Error> {
    if words.is_empty() {
        return Err(Error::EmptySentence);
    }
    let chart = build(lexicon, words, target, bounds)?;
    let n = words.len();
    let mut out = Vec::new();
    for k in chart.roots(target) {
        let room = bounds.max_derivations.saturating_sub(out.len());
        if room == 0 {
            break;
        }
        out.extend(chart.trees(0, n, k, room));
    }
    Ok(out)
}

/// Number of derivations of `target`, without materializing them.
pub fn count_derivations(
    lexicon: &Lexicon,
    words: &[&str],
    target: &CatType,
    bounds: &DeriveBounds,
) -> Result<u128, Error> {
    if words.is_empty() {
        return Err(Error::EmptySentence);
    }
    let chart = build(lexicon, words, target, bounds)?;
    let n = words.len();
    let mut memo = HashMap::new();
    Ok(chart
        .roots(target)
        .map(|k| chart.count(0, n, k, &mut memo))
        .fold(0, u128::saturating_add))
}

/// Recomputes every node's type from its children; true when the tree is a
/// correct derivation over `lexicon`.
pub fn check_derivation(d: &Derivation, lexicon: &Lexicon) -> bool {
    match d {
        Derivation::Leaf { word, ty, .. } => lexicon.types_of(word).contains(&ty),
        Derivation::Node {
            step,
            span,
            ty,
            children,
        } => {
            if !children.iter().all(|c| check_derivation(c, lexicon)) {
                return false;
            }
            let inputs: Vec<&CatType> = children.iter().map(Derivation::ty).collect();
            let spans_ok = match children.as_slice() {
                [c] => c.span() == *span,
                [a, b] => {
                    a.span().0 == span.0 && a.span().1 + 1 == b.span().0 && b.span().1 == span.1
                }
                _ => false,
            };
            let lift = match (step.rule, ty) {
                (RuleKind::R4, CatType::Right(b, _) | CatType::Left(_, b)) => Some(&**b),
                _ => None,
            };
            spans_ok && apply_rule(*step, &inputs, lift).as_ref() == Some(ty)
        }
    }
}
