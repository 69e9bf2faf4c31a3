//! DOT and JSON serialization of graphs. Edge lists are emitted in sorted
//! order so identical graphs always serialize to identical bytes.

use serde::{Deserialize, Serialize};

use super::{EdgeMark, Pdag, SummaryGraph, Vertex};
use crate::error::GraphError;

fn quote(name: &str) -> String {
    format!("\"{}\"", name.replace('"', "\\\""))
}

/// DOT rendering: directed edges as `->`, undirected edges as `->` with
/// `dir=none` so the file stays valid digraph syntax.
pub fn pdag_to_dot(g: &Pdag) -> String {
    let mut out = String::from("digraph cpdag {\n");
    for v in g.vertices() {
        out.push_str(&format!("  {} [tier={}];\n", quote(&v.name), v.tier));
    }
    for (a, b, mark) in g.edges() {
        let (an, bn) = (quote(&g.vertex(a).name), quote(&g.vertex(b).name));
        match mark {
            EdgeMark::DirectedAB => out.push_str(&format!("  {an} -> {bn};\n")),
            EdgeMark::DirectedBA => out.push_str(&format!("  {bn} -> {an};\n")),
            EdgeMark::Undirected => out.push_str(&format!("  {an} -> {bn} [dir=none];\n")),
        }
    }
    out.push_str("}\n");
    out
}

/// DOT rendering of a summary graph: `penwidth` proportional to the edge
/// frequency, frequency printed to two decimals as the label.
pub fn summary_to_dot(s: &SummaryGraph) -> String {
    let mut out = String::from("digraph summary {\n");
    for v in &s.vertices {
        out.push_str(&format!("  {} [tier={}];\n", quote(&v.name), v.tier));
    }
    for e in &s.edges {
        let freq = e.frequency(s.n_graphs);
        let (an, bn) = (
            quote(&s.vertices[e.a].name),
            quote(&s.vertices[e.b].name),
        );
        let attrs = format!("label=\"{:.2}\", penwidth={:.2}", freq, 0.5 + 4.0 * freq);
        match e.display_mark() {
            EdgeMark::DirectedAB => out.push_str(&format!("  {an} -> {bn} [{attrs}];\n")),
            EdgeMark::DirectedBA => out.push_str(&format!("  {bn} -> {an} [{attrs}];\n")),
            EdgeMark::Undirected => {
                out.push_str(&format!("  {an} -> {bn} [dir=none, {attrs}];\n"))
            }
        }
    }
    out.push_str("}\n");
    out
}

#[derive(Serialize, Deserialize)]
struct EdgeRepr {
    a: usize,
    b: usize,
    mark: EdgeMark,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    vertices: Vec<Vertex>,
    edges: Vec<EdgeRepr>,
}

/// JSON encoding of a graph: vertex list plus a sorted edge list.
pub fn pdag_to_json(g: &Pdag) -> String {
    let repr = GraphRepr {
        vertices: g.vertices().to_vec(),
        edges: g
            .edges()
            .into_iter()
            .map(|(a, b, mark)| EdgeRepr { a, b, mark })
            .collect(),
    };
    serde_json::to_string_pretty(&repr).expect("graph serialization cannot fail")
}

pub fn pdag_from_json(text: &str) -> Result<Pdag, GraphError> {
    let repr: GraphRepr =
        serde_json::from_str(text).map_err(|e| GraphError::BadGraphFile(e.to_string()))?;
    let mut g = Pdag::new(repr.vertices)?;
    for e in repr.edges {
        match e.mark {
            EdgeMark::Undirected => g.set_undirected(e.a, e.b),
            EdgeMark::DirectedAB => g.set_directed(e.a, e.b),
            EdgeMark::DirectedBA => g.set_directed(e.b, e.a),
        }
    }
    Ok(g)
}
