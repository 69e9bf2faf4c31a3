//! Mixed-graph types and structural algorithms: skeletons, d-separation,
//! v-structures, Meek orientation rules, structural Hamming distance,
//! equivalence-class enumeration, and aggregation of graphs across runs.

mod dsep;
mod enumerate;
mod export;
mod meek;
mod shd;
mod summary;

pub use enumerate::enumerate_dag_extensions;
pub use export::{pdag_from_json, pdag_to_dot, pdag_to_json, summary_to_dot};
pub use meek::{
    apply_meek_rules, apply_v_structures, cpdag_of_dag, find_v_structures, tiered_cpdag_of_dag,
    v_structures_of_dag, MeekConfig, OrientStats, VStructure,
};
pub use shd::{shd, shd_with_mode, ShdMode};
pub use summary::{aggregate_cpdags, count_edge_kinds, EdgeKindCounts, SummaryEdge, SummaryGraph};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// A measured variable: a dense id, a display name, the visit (tier) it was
/// measured at, and whether it is the binary endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: usize,
    pub name: String,
    pub tier: usize,
    pub is_outcome: bool,
}

impl Vertex {
    pub fn new(id: usize, name: impl Into<String>, tier: usize) -> Self {
        Vertex {
            id,
            name: name.into(),
            tier,
            is_outcome: false,
        }
    }

    pub fn outcome(id: usize, name: impl Into<String>, tier: usize) -> Self {
        Vertex {
            id,
            name: name.into(),
            tier,
            is_outcome: true,
        }
    }
}

/// Mark held by an unordered vertex pair `(a, b)` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeMark {
    Undirected,
    /// Directed from the smaller id to the larger (`a -> b`).
    DirectedAB,
    /// Directed from the larger id to the smaller (`b -> a`).
    DirectedBA,
}

/// A partially directed graph over a fixed vertex set. Each unordered pair
/// holds at most one mark; self-loops are rejected. Directed and undirected
/// marks may coexist in the same graph (PDAG / CPDAG / DAG views).
#[derive(Clone, PartialEq)]
pub struct Pdag {
    vertices: Vec<Vertex>,
    // Row-major n*n; matrix[i*n + j] means "an edge mark points from i
    // toward j": i -> j when the transpose cell is unset, i - j when both
    // cells are set.
    matrix: Vec<bool>,
}

impl Pdag {
    /// Empty graph over `vertices`. Validates the vertex invariants: ids
    /// contiguous from 0, unique names, at most one outcome whose tier
    /// strictly exceeds every covariate tier.
    pub fn new(vertices: Vec<Vertex>) -> Result<Self, GraphError> {
        let mut outcome_tier: Option<usize> = None;
        for (pos, v) in vertices.iter().enumerate() {
            if v.id != pos {
                return Err(GraphError::BadVertexIds {
                    position: pos,
                    id: v.id,
                });
            }
            if v.is_outcome {
                if outcome_tier.is_some() {
                    return Err(GraphError::MultipleOutcomes);
                }
                outcome_tier = Some(v.tier);
            }
        }
        let mut names: Vec<&str> = vertices.iter().map(|v| v.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateVertexName(w[0].to_string()));
        }
        if let Some(ot) = outcome_tier {
            for v in vertices.iter().filter(|v| !v.is_outcome) {
                if v.tier >= ot {
                    return Err(GraphError::OutcomeTierNotMaximal {
                        outcome_tier: ot,
                        covariate_tier: v.tier,
                    });
                }
            }
        }
        let n = vertices.len();
        Ok(Pdag {
            vertices,
            matrix: vec![false; n * n],
        })
    }

    /// Complete undirected graph over `vertices`.
    pub fn complete_undirected(vertices: Vec<Vertex>) -> Result<Self, GraphError> {
        let mut g = Pdag::new(vertices)?;
        for i in 0..g.n() {
            for j in (i + 1)..g.n() {
                g.set_undirected(i, j);
            }
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, id: usize) -> &Vertex {
        &self.vertices[id]
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.name == name)
    }

    /// Id of the outcome vertex, when one is present.
    pub fn outcome(&self) -> Option<usize> {
        self.vertices.iter().find(|v| v.is_outcome).map(|v| v.id)
    }

    /// All non-outcome vertex ids.
    pub fn covariates(&self) -> Vec<usize> {
        self.vertices
            .iter()
            .filter(|v| !v.is_outcome)
            .map(|v| v.id)
            .collect()
    }

    #[inline]
    fn cell(&self, i: usize, j: usize) -> bool {
        self.matrix[i * self.n() + j]
    }

    #[inline]
    fn set_cell(&mut self, i: usize, j: usize, value: bool) {
        let n = self.n();
        self.matrix[i * n + j] = value;
    }

    #[inline]
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        i != j && (self.cell(i, j) || self.cell(j, i))
    }

    /// `true` when the edge `from -> to` is present and directed.
    #[inline]
    pub fn has_directed(&self, from: usize, to: usize) -> bool {
        from != to && self.cell(from, to) && !self.cell(to, from)
    }

    #[inline]
    pub fn has_undirected(&self, i: usize, j: usize) -> bool {
        i != j && self.cell(i, j) && self.cell(j, i)
    }

    /// Mark of the unordered pair, reported relative to `(a, b)` as given:
    /// `DirectedAB` means `a -> b`.
    pub fn edge_mark(&self, a: usize, b: usize) -> Option<EdgeMark> {
        match (self.cell(a, b), self.cell(b, a)) {
            (false, false) => None,
            (true, true) => Some(EdgeMark::Undirected),
            (true, false) => Some(EdgeMark::DirectedAB),
            (false, true) => Some(EdgeMark::DirectedBA),
        }
    }

    pub fn set_undirected(&mut self, i: usize, j: usize) {
        assert_ne!(i, j, "self-loops are not allowed");
        self.set_cell(i, j, true);
        self.set_cell(j, i, true);
    }

    pub fn set_directed(&mut self, from: usize, to: usize) {
        assert_ne!(from, to, "self-loops are not allowed");
        self.set_cell(from, to, true);
        self.set_cell(to, from, false);
    }

    pub fn remove_edge(&mut self, i: usize, j: usize) {
        self.set_cell(i, j, false);
        self.set_cell(j, i, false);
    }

    /// Turn the existing undirected edge `from - to` into `from -> to`.
    /// Refuses to touch missing or already-directed edges.
    pub fn orient(&mut self, from: usize, to: usize) -> Result<(), GraphError> {
        if !self.has_undirected(from, to) {
            return Err(GraphError::CannotOrient {
                from: self.vertices[from].name.clone(),
                to: self.vertices[to].name.clone(),
                reason: "edge is not undirected".into(),
            });
        }
        self.set_directed(from, to);
        Ok(())
    }

    pub fn parents(&self, v: usize) -> Vec<usize> {
        (0..self.n()).filter(|&u| self.has_directed(u, v)).collect()
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        (0..self.n()).filter(|&u| self.has_directed(v, u)).collect()
    }

    pub fn undirected_neighbors(&self, v: usize) -> Vec<usize> {
        (0..self.n())
            .filter(|&u| self.has_undirected(v, u))
            .collect()
    }

    pub fn adjacencies(&self, v: usize) -> Vec<usize> {
        (0..self.n()).filter(|&u| self.adjacent(v, u)).collect()
    }

    /// All edges as `(a, b, mark)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize, EdgeMark)> {
        let mut out = Vec::new();
        for a in 0..self.n() {
            for b in (a + 1)..self.n() {
                if let Some(mark) = self.edge_mark(a, b) {
                    out.push((a, b, mark));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// Same adjacencies with every mark erased to undirected.
    pub fn skeleton(&self) -> Pdag {
        let mut g = Pdag {
            vertices: self.vertices.clone(),
            matrix: vec![false; self.matrix.len()],
        };
        for a in 0..self.n() {
            for b in (a + 1)..self.n() {
                if self.adjacent(a, b) {
                    g.set_undirected(a, b);
                }
            }
        }
        g
    }

    pub fn fully_directed(&self) -> bool {
        self.edges()
            .iter()
            .all(|(_, _, m)| *m != EdgeMark::Undirected)
    }

    /// Acyclicity of a fully directed graph. Errors when an undirected mark
    /// is present, since cyclicity is only defined on the directed view.
    pub fn is_acyclic(&self) -> Result<bool, GraphError> {
        if let Some((a, b, _)) = self
            .edges()
            .into_iter()
            .find(|(_, _, m)| *m == EdgeMark::Undirected)
        {
            return Err(GraphError::NotFullyDirected {
                a: self.vertices[a].name.clone(),
                b: self.vertices[b].name.clone(),
            });
        }
        Ok(self.directed_part_acyclic())
    }

    /// Kahn's algorithm over the directed subgraph, ignoring undirected marks.
    pub fn directed_part_acyclic(&self) -> bool {
        let n = self.n();
        let mut indeg = vec![0usize; n];
        for v in 0..n {
            indeg[v] = self.parents(v).len();
        }
        let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = queue.pop() {
            seen += 1;
            for c in self.children(v) {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    queue.push(c);
                }
            }
        }
        seen == n
    }

    /// Is there a directed path `from -> ... -> to` using directed marks only?
    pub fn directed_path_exists(&self, from: usize, to: usize) -> bool {
        if from == to {
            return true;
        }
        let mut seen = vec![false; self.n()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            for c in self.children(v) {
                if c == to {
                    return true;
                }
                if !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        false
    }

    pub fn same_vertex_set(&self, other: &Pdag) -> bool {
        self.vertices.len() == other.vertices.len()
            && self
                .vertices
                .iter()
                .zip(other.vertices.iter())
                .all(|(a, b)| a.name == b.name)
    }
}

impl fmt::Debug for Pdag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pdag({} vertices; ", self.n())?;
        let parts: Vec<String> = self
            .edges()
            .into_iter()
            .map(|(a, b, m)| {
                let (an, bn) = (&self.vertices[a].name, &self.vertices[b].name);
                match m {
                    EdgeMark::Undirected => format!("{an} - {bn}"),
                    EdgeMark::DirectedAB => format!("{an} -> {bn}"),
                    EdgeMark::DirectedBA => format!("{bn} -> {an}"),
                }
            })
            .collect();
        write!(f, "{})", parts.join(", "))
    }
}

/// Fully directed acyclic graph with a real weight per edge; weight is zero
/// for absent edges.
#[derive(Debug, Clone)]
pub struct WeightedDag {
    graph: Pdag,
    weights: BTreeMap<(usize, usize), f64>,
}

impl WeightedDag {
    pub fn new(graph: Pdag, weights: BTreeMap<(usize, usize), f64>) -> Result<Self, GraphError> {
        if !graph.is_acyclic()? {
            return Err(GraphError::NoExtension);
        }
        for (&(u, v), _) in &weights {
            debug_assert!(graph.has_directed(u, v), "weight on a non-edge {u}->{v}");
        }
        Ok(WeightedDag { graph, weights })
    }

    pub fn graph(&self) -> &Pdag {
        &self.graph
    }

    pub fn weight(&self, from: usize, to: usize) -> f64 {
        self.weights.get(&(from, to)).copied().unwrap_or(0.0)
    }

    pub fn weights(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.weights
    }
}

/// Separation sets recorded while learning a skeleton: for each removed pair,
/// the conditioning set that rendered it independent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SepsetTable {
    map: BTreeMap<(usize, usize), Vec<usize>>,
}

impl SepsetTable {
    pub fn new() -> Self {
        Self::default()
    }

    fn key(i: usize, j: usize) -> (usize, usize) {
        if i < j {
            (i, j)
        } else {
            (j, i)
        }
    }

    pub fn insert(&mut self, i: usize, j: usize, mut s: Vec<usize>) {
        debug_assert!(!s.contains(&i) && !s.contains(&j));
        s.sort_unstable();
        self.map.insert(Self::key(i, j), s);
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&[usize]> {
        self.map.get(&Self::key(i, j)).map(|v| v.as_slice())
    }

    pub fn contains(&self, i: usize, j: usize, v: usize) -> Option<bool> {
        self.get(i, j).map(|s| s.binary_search(&v).is_ok())
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &Vec<usize>)> {
        self.map.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verts(n: usize) -> Vec<Vertex> {
        (0..n).map(|i| Vertex::new(i, format!("X{i}"), 1)).collect()
    }

    #[test]
    fn vertex_invariants_enforced() {
        let bad = vec![Vertex::new(1, "A", 1)];
        assert!(matches!(
            Pdag::new(bad),
            Err(GraphError::BadVertexIds { .. })
        ));

        let two_outcomes = vec![Vertex::outcome(0, "A", 2), Vertex::outcome(1, "B", 2)];
        assert!(matches!(
            Pdag::new(two_outcomes),
            Err(GraphError::MultipleOutcomes)
        ));

        let late_covariate = vec![Vertex::outcome(0, "Y", 2), Vertex::new(1, "A", 2)];
        assert!(matches!(
            Pdag::new(late_covariate),
            Err(GraphError::OutcomeTierNotMaximal { .. })
        ));

        let dup = vec![Vertex::new(0, "A", 1), Vertex::new(1, "A", 1)];
        assert!(matches!(
            Pdag::new(dup),
            Err(GraphError::DuplicateVertexName(_))
        ));
    }

    #[test]
    fn edge_marks_round_trip() {
        let mut g = Pdag::new(verts(3)).unwrap();
        g.set_directed(0, 1);
        g.set_undirected(1, 2);
        assert_eq!(g.edge_mark(0, 1), Some(EdgeMark::DirectedAB));
        assert_eq!(g.edge_mark(1, 0), Some(EdgeMark::DirectedBA));
        assert_eq!(g.edge_mark(1, 2), Some(EdgeMark::Undirected));
        assert_eq!(g.edge_mark(0, 2), None);
        assert!(g.has_directed(0, 1));
        assert!(!g.has_directed(1, 0));
        assert_eq!(g.parents(1), vec![0]);
        assert_eq!(g.undirected_neighbors(1), vec![2]);
        g.remove_edge(0, 1);
        assert!(!g.adjacent(0, 1));
    }

    #[test]
    fn skeleton_erases_marks() {
        // A -> B, B - C becomes A - B, B - C.
        let mut g = Pdag::new(verts(3)).unwrap();
        g.set_directed(0, 1);
        g.set_undirected(1, 2);
        let s = g.skeleton();
        assert_eq!(s.edge_mark(0, 1), Some(EdgeMark::Undirected));
        assert_eq!(s.edge_mark(1, 2), Some(EdgeMark::Undirected));
        assert_eq!(s.edge_count(), 2);

        // Empty graph stays empty; a chain keeps its adjacencies.
        let empty = Pdag::new(verts(2)).unwrap();
        assert_eq!(empty.skeleton().edge_count(), 0);

        let mut chain = Pdag::new(verts(3)).unwrap();
        chain.set_directed(0, 1);
        chain.set_directed(1, 2);
        let cs = chain.skeleton();
        assert!(cs.has_undirected(0, 1) && cs.has_undirected(1, 2) && !cs.adjacent(0, 2));
    }

    #[test]
    fn acyclicity() {
        let mut g = Pdag::new(verts(3)).unwrap();
        g.set_directed(0, 1);
        g.set_directed(1, 2);
        assert!(g.is_acyclic().unwrap());
        g.set_directed(2, 0);
        assert!(!g.is_acyclic().unwrap());

        let mut h = Pdag::new(verts(2)).unwrap();
        h.set_undirected(0, 1);
        assert!(matches!(
            h.is_acyclic(),
            Err(GraphError::NotFullyDirected { .. })
        ));
    }

    #[test]
    fn orient_requires_undirected() {
        let mut g = Pdag::new(verts(2)).unwrap();
        assert!(g.orient(0, 1).is_err());
        g.set_undirected(0, 1);
        g.orient(0, 1).unwrap();
        assert!(g.has_directed(0, 1));
        assert!(g.orient(0, 1).is_err());
    }

    #[test]
    fn sepset_table_canonicalizes() {
        let mut t = SepsetTable::new();
        t.insert(3, 1, vec![5, 2]);
        assert_eq!(t.get(1, 3), Some(&[2, 5][..]));
        assert_eq!(t.get(3, 1), Some(&[2, 5][..]));
        assert_eq!(t.contains(1, 3, 5), Some(true));
        assert_eq!(t.contains(1, 3, 4), Some(false));
        assert_eq!(t.get(0, 1), None);
    }
}
