//! Structural Hamming distance between two graphs over the same vertices.

use super::Pdag;
use crate::error::GraphError;

/// How edge-mark disagreements on a shared adjacency are scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShdMode {
    /// One point per pair whose edge status differs in any way: extra
    /// adjacency, missing adjacency, or differing mark.
    #[default]
    Full,
    /// Only adjacency differences count; marks are ignored.
    AdjacencyOnly,
}

/// Structural Hamming distance with mark disagreements counted.
pub fn shd(g1: &Pdag, g2: &Pdag) -> Result<usize, GraphError> {
    shd_with_mode(g1, g2, ShdMode::Full)
}

pub fn shd_with_mode(g1: &Pdag, g2: &Pdag, mode: ShdMode) -> Result<usize, GraphError> {
    if !g1.same_vertex_set(g2) {
        return Err(GraphError::VertexSetMismatch);
    }
    let n = g1.n();
    let mut dist = 0;
    for a in 0..n {
        for b in (a + 1)..n {
            let m1 = g1.edge_mark(a, b);
            let m2 = g2.edge_mark(a, b);
            let differs = match mode {
                ShdMode::Full => m1 != m2,
                ShdMode::AdjacencyOnly => m1.is_some() != m2.is_some(),
            };
            if differs {
                dist += 1;
            }
        }
    }
    Ok(dist)
}
