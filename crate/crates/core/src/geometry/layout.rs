//! Spring embedding of a complex in three dimensions.
//!
//! Bonded occurrences collapse into one node. Body neighbours are joined by
//! springs of rest length 1.0, and a conclusion by springs of length 0.6 to
//! each body token of its chain. Nodes that share no spring repel. The x axis
//! starts from the solved time-line positions and is weakly held there, so
//! chains keep reading left to right; y and z start from a seeded random
//! offset.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::Token;
use crate::engine::{Complex, Occurrence, PositionAssignment, Slot};

pub const BODY_LENGTH: f64 = 1.0;
pub const CONCLUSION_LENGTH: f64 = 0.6;
pub const SPLIT_DISTANCE: f64 = 0.3;
pub const DEFAULT_ITERATIONS: usize = 500;

const SPRING: f64 = 0.5;
const ANCHOR: f64 = 0.05;
const REPULSION: f64 = 0.2;
const MAX_STEP: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutNode {
    /// One occurrence, or the two occurrences of a bond.
    pub occurrences: Vec<Occurrence>,
    pub token: Token,
    pub coord: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub nodes: Vec<LayoutNode>,
    pub seed: u64,
    pub iterations: usize,
}

impl Layout {
    pub fn coord(&self, occ: Occurrence) -> Option<[f64; 3]> {
        self.nodes
            .iter()
            .find(|n| n.occurrences.contains(&occ))
            .map(|n| n.coord)
    }

    /// One node per occurrence: the two sides of each bond are moved apart
    /// along z, `SPLIT_DISTANCE` from each other.
    pub fn split_bonds(&self) -> Layout {
        let mut nodes = Vec::new();
        for n in &self.nodes {
            if n.occurrences.len() < 2 {
                nodes.push(n.clone());
                continue;
            }
            let half = SPLIT_DISTANCE / 2.0;
            for (k, occ) in n.occurrences.iter().enumerate() {
                let [x, y, z] = n.coord;
                let dz = if k == 0 { -half } else { half };
                nodes.push(LayoutNode {
                    occurrences: vec![*occ],
                    token: n.token.clone(),
                    coord: [x, y, z + dz],
                });
            }
        }
        Layout {
            nodes,
            seed: self.seed,
            iterations: self.iterations,
        }
    }
}

fn to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Merged classes ordered by their smallest occurrence, plus a lookup table.
pub(crate) fn classes(x: &Complex) -> (Vec<Vec<Occurrence>>, BTreeMap<Occurrence, usize>) {
    let partners = x.partner_map();
    let mut out: Vec<Vec<Occurrence>> = Vec::new();
    let mut index = BTreeMap::new();
    for occ in x.occurrences() {
        if index.contains_key(&occ) {
            continue;
        }
        let mut class = vec![occ];
        if let Some(p) = partners.get(&occ) {
            class.push(*p);
        }
        class.sort();
        for o in &class {
            index.insert(*o, out.len());
        }
        out.push(class);
    }
    (out, index)
}

/// Springs between classes: (a, b, rest length), a < b, no self-loops.
pub(crate) fn springs(
    x: &Complex,
    index: &BTreeMap<Occurrence, usize>,
) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    let mut push = |a: Occurrence, b: Occurrence, len: f64| {
        let (u, v) = (index[&a], index[&b]);
        if u != v {
            out.push((u.min(v), u.max(v), len));
        }
    };
    for inst in &x.instances {
        let n = inst.body.len();
        for k in 1..n {
            push(
                Occurrence::new(inst.id, Slot::Body(k)),
                Occurrence::new(inst.id, Slot::Body(k + 1)),
                BODY_LENGTH,
            );
        }
        if inst.conclusion.is_some() {
            for k in 1..=n {
                push(
                    Occurrence::new(inst.id, Slot::Conclusion),
                    Occurrence::new(inst.id, Slot::Body(k)),
                    CONCLUSION_LENGTH,
                );
            }
        }
    }
    out
}

/// Deterministic force-directed placement. The same complex, positions,
/// seed and iteration count always give bit-identical coordinates.
pub fn embed(x: &Complex, pa: &PositionAssignment, seed: u64, iterations: usize) -> Layout {
    let (classes, index) = classes(x);
    let springs = springs(x, &index);
    let linked: BTreeSet<(usize, usize)> = springs.iter().map(|&(a, b, _)| (a, b)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let anchor: Vec<f64> = classes
        .iter()
        .map(|c| pa.position(c[0]).map(to_f64).unwrap_or(0.0))
        .collect();
    let mut pos: Vec<[f64; 3]> = anchor
        .iter()
        .map(|&ax| [ax, rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)])
        .collect();
    let m = classes.len();
    for it in 0..iterations {
        let cool = 1.0 - it as f64 / iterations.max(1) as f64;
        let mut force = vec![[0.0f64; 3]; m];
        for &(a, b, rest) in &springs {
            let d = sub(pos[b], pos[a]);
            let len = norm(d).max(1e-9);
            let f = SPRING * (len - rest) / len;
            for k in 0..3 {
                force[a][k] += f * d[k];
                force[b][k] -= f * d[k];
            }
        }
        for a in 0..m {
            for b in a + 1..m {
                if linked.contains(&(a, b)) {
                    continue;
                }
                let mut d = sub(pos[b], pos[a]);
                let mut len = norm(d);
                if len < 1e-6 {
                    // coincident nodes: separate along a fixed axis
                    d = [0.0, 1e-3 * (1 + a) as f64, 1e-3 * (1 + b) as f64];
                    len = norm(d);
                }
                let f = REPULSION / (len * len * len).max(1e-3);
                for k in 0..3 {
                    force[a][k] -= f * d[k];
                    force[b][k] += f * d[k];
                }
            }
        }
        for (i, p) in pos.iter_mut().enumerate() {
            force[i][0] += ANCHOR * (anchor[i] - p[0]);
            let step = norm(force[i]);
            let scale = if step > MAX_STEP {
                MAX_STEP / step
            } else {
                1.0
            } * (0.1 + 0.9 * cool);
            for k in 0..3 {
                p[k] += scale * force[i][k];
            }
        }
    }
    let nodes = classes
        .into_iter()
        .zip(pos)
        .map(|(occurrences, coord)| LayoutNode {
            token: x
                .token(occurrences[0])
                .cloned()
                .expect("occurrence of the complex"),
            occurrences,
            coord,
        })
        .collect();
    Layout {
        nodes,
        seed,
        iterations,
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}
