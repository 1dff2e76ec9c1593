use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::chain::Token;
use crate::engine::{Bond, ChainInstance, Complex, Occurrence, PositionAssignment, Slot};
use crate::error::Error;

use super::layout::{Layout, LayoutNode};
use super::style::StyleMap;

fn headline(x: &Complex) -> String {
    let sentence = x
        .fresh()
        .map(|f| {
            f.body
                .iter()
                .map(|t| t.label.as_str())
                .collect::<Vec<_>>()
                .join(" ")
        })
        .unwrap_or_default();
    let conclusion = x
        .dangling_token()
        .map_or("?".to_string(), |t| t.label.clone());
    format!("{sentence} -> {conclusion}")
}

/// XYZ text: atom count, a comment line `sentence -> conclusion`, then one
/// `SYMBOL x y z` line per layout node.
pub fn export_xyz(layout: &Layout, x: &Complex, style: &StyleMap) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", layout.nodes.len());
    let _ = writeln!(out, "{}", headline(x));
    for n in &layout.nodes {
        let [a, b, c] = n.coord;
        let _ = writeln!(out, "{} {a:.6} {b:.6} {c:.6}", style.symbol(&n.token));
    }
    out
}

fn dot_label(t: &Token) -> String {
    t.to_string().replace('\\', "\\\\").replace('"', "\\\"")
}

/// Undirected Graphviz graph with one node per occurrence. Body neighbours
/// are joined by solid edges, conclusions by dashed edges to each body token,
/// and bonds by bold edges of weight 0.
pub fn export_dot(x: &Complex) -> String {
    let mut out = String::from("graph complex {\n");
    for inst in &x.instances {
        for slot in inst.slots() {
            let occ = Occurrence::new(inst.id, slot);
            let t = inst.token(slot).expect("slot of the instance");
            let _ = writeln!(out, "  {occ} [label=\"{}\"];", dot_label(t));
        }
    }
    for inst in &x.instances {
        let n = inst.body.len();
        for k in 1..n {
            let _ = writeln!(
                out,
                "  {} -- {};",
                Occurrence::new(inst.id, Slot::Body(k)),
                Occurrence::new(inst.id, Slot::Body(k + 1))
            );
        }
        if inst.conclusion.is_some() {
            for k in 1..=n {
                let _ = writeln!(
                    out,
                    "  {} -- {} [style=dashed];",
                    Occurrence::new(inst.id, Slot::Body(k)),
                    Occurrence::new(inst.id, Slot::Conclusion)
                );
            }
        }
    }
    for b in &x.bonds {
        let _ = writeln!(out, "  {} -- {} [style=bold, weight=0];", b.a, b.b);
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coordinate {
    pub occurrences: Vec<Occurrence>,
    pub token: Token,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// The JSON form of a complex; fields are written in declaration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDocument {
    pub instances: Vec<ChainInstance>,
    pub bonds: Vec<Bond>,
    pub dangling: Option<Token>,
    pub positions: PositionAssignment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinates: Option<Vec<Coordinate>>,
}

impl ComplexDocument {
    pub fn complex(&self) -> Complex {
        Complex {
            instances: self.instances.clone(),
            bonds: self.bonds.clone(),
        }
    }

    pub fn layout(&self) -> Option<Layout> {
        self.coordinates.as_ref().map(|cs| Layout {
            nodes: cs
                .iter()
                .map(|c| LayoutNode {
                    occurrences: c.occurrences.clone(),
                    token: c.token.clone(),
                    coord: [c.x, c.y, c.z],
                })
                .collect(),
            seed: 0,
            iterations: 0,
        })
    }
}

pub fn export_json(x: &Complex, layout: Option<&Layout>, pa: &PositionAssignment) -> String {
    let doc = ComplexDocument {
        instances: x.instances.clone(),
        bonds: x.bonds.clone(),
        dangling: x.dangling_token().cloned(),
        positions: pa.clone(),
        coordinates: layout.map(|l| {
            l.nodes
                .iter()
                .map(|n| Coordinate {
                    occurrences: n.occurrences.clone(),
                    token: n.token.clone(),
                    x: n.coord[0],
                    y: n.coord[1],
                    z: n.coord[2],
                })
                .collect()
        }),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("documents serialize");
    s.push('\n');
    s
}

pub fn import_json(text: &str) -> Result<ComplexDocument, Error> {
    Ok(serde_json::from_str(text)?)
}
