//! Aggregation of CPDAGs across runs and per-kind edge counting.

use serde::{Deserialize, Serialize};

use super::{EdgeMark, Pdag, Vertex};
use crate::error::GraphError;

/// Occurrence counts of one unordered pair across a list of graphs.
/// Frequencies are the exact ratios count / n_graphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryEdge {
    pub a: usize,
    pub b: usize,
    /// Runs where the edge appeared as `a -> b`.
    pub n_ab: usize,
    /// Runs where the edge appeared as `b -> a`.
    pub n_ba: usize,
    /// Runs where the edge appeared undirected.
    pub n_undirected: usize,
}

impl SummaryEdge {
    pub fn total(&self) -> usize {
        self.n_ab + self.n_ba + self.n_undirected
    }

    pub fn frequency(&self, n_graphs: usize) -> f64 {
        self.total() as f64 / n_graphs as f64
    }

    /// Mark used when drawing the summary: a single orientation survives
    /// only when every occurrence agrees on it; mixed orientations are
    /// rendered as an undirected (bidirected) edge with the summed
    /// frequency.
    pub fn display_mark(&self) -> EdgeMark {
        if self.n_ab == self.total() {
            EdgeMark::DirectedAB
        } else if self.n_ba == self.total() {
            EdgeMark::DirectedBA
        } else {
            EdgeMark::Undirected
        }
    }
}

/// Edge frequencies over a collection of graphs, thresholded.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SummaryGraph {
    pub vertices: Vec<Vertex>,
    pub threshold: f64,
    pub n_graphs: usize,
    pub edges: Vec<SummaryEdge>,
}

/// Tally per-pair (and per-orientation) occurrence frequencies over
/// `graphs` and keep pairs whose frequency reaches `threshold`.
pub fn aggregate_cpdags(graphs: &[Pdag], threshold: f64) -> Result<SummaryGraph, GraphError> {
    let first = graphs.first().ok_or(GraphError::EmptyAggregate)?;
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(GraphError::BadThreshold(threshold));
    }
    for g in &graphs[1..] {
        if !first.same_vertex_set(g) {
            return Err(GraphError::VertexSetMismatch);
        }
    }
    let n = first.n();
    let n_graphs = graphs.len();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            let mut e = SummaryEdge {
                a,
                b,
                n_ab: 0,
                n_ba: 0,
                n_undirected: 0,
            };
            for g in graphs {
                match g.edge_mark(a, b) {
                    Some(EdgeMark::DirectedAB) => e.n_ab += 1,
                    Some(EdgeMark::DirectedBA) => e.n_ba += 1,
                    Some(EdgeMark::Undirected) => e.n_undirected += 1,
                    None => {}
                }
            }
            if e.total() > 0 && e.frequency(n_graphs) >= threshold {
                edges.push(e);
            }
        }
    }
    Ok(SummaryGraph {
        vertices: first.vertices().to_vec(),
        threshold,
        n_graphs,
        edges,
    })
}

/// Per-kind edge counts used for run reporting. Non-chronological covers
/// directed edges from a strictly later tier into an earlier one plus
/// undirected edges spanning tiers (which still admit an anti-chronological
/// orientation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeKindCounts {
    pub directed: usize,
    pub undirected: usize,
    pub non_chronological: usize,
    pub total: usize,
}

pub fn count_edge_kinds(g: &Pdag) -> EdgeKindCounts {
    let mut counts = EdgeKindCounts {
        directed: 0,
        undirected: 0,
        non_chronological: 0,
        total: 0,
    };
    for (a, b, mark) in g.edges() {
        counts.total += 1;
        let (ta, tb) = (g.vertex(a).tier, g.vertex(b).tier);
        match mark {
            EdgeMark::Undirected => {
                counts.undirected += 1;
                if ta != tb {
                    counts.non_chronological += 1;
                }
            }
            EdgeMark::DirectedAB => {
                counts.directed += 1;
                if ta > tb {
                    counts.non_chronological += 1;
                }
            }
            EdgeMark::DirectedBA => {
                counts.directed += 1;
                if tb > ta {
                    counts.non_chronological += 1;
                }
            }
        }
    }
    counts
}
