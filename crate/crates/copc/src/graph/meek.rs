//! v-structure detection and the Meek orientation rules.
//!
//! Rules 1-3 complete a pattern to its CPDAG; rule 4 only fires in the
//! presence of background knowledge (here: chronological pre-orientation)
//! and can be switched off for parity with the three-rule completion.

use super::{Pdag, SepsetTable};
use crate::error::GraphError;

/// An unshielded collider `a -> collider <- b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct VStructure {
    pub a: usize,
    pub collider: usize,
    pub b: usize,
}

impl VStructure {
    fn canonical(a: usize, collider: usize, b: usize) -> Self {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        VStructure { a, collider, b }
    }
}

/// Orientation rule configuration.
#[derive(Debug, Clone, Copy)]
pub struct MeekConfig {
    /// Apply rule 4 in addition to rules 1-3.
    pub rule4: bool,
}

impl Default for MeekConfig {
    fn default() -> Self {
        MeekConfig { rule4: true }
    }
}

/// Counters for applied orientations and refused (conflicting) ones.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OrientStats {
    pub oriented: usize,
    pub conflicts: usize,
}

/// Scan for unshielded triples `a ~ j ~ b` with `a`, `b` non-adjacent and
/// `j` outside the recorded separation set of `(a, b)`. Adjacency marks are
/// ignored during detection; orientation decisions happen at application
/// time. Errors when a needed separation set is missing.
pub fn find_v_structures(
    g: &Pdag,
    sepsets: &SepsetTable,
) -> Result<Vec<VStructure>, GraphError> {
    let mut out = Vec::new();
    for j in 0..g.n() {
        let adj = g.adjacencies(j);
        for (ia, &a) in adj.iter().enumerate() {
            for &b in adj.iter().skip(ia + 1) {
                if g.adjacent(a, b) {
                    continue;
                }
                match sepsets.contains(a, b, j) {
                    Some(true) => {}
                    Some(false) => out.push(VStructure::canonical(a, j, b)),
                    None => {
                        return Err(GraphError::MissingSepset {
                            a: g.vertex(a).name.clone(),
                            b: g.vertex(b).name.clone(),
                        })
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// The v-structures actually present in a fully (or partially) directed
/// graph: both prongs directed into the collider, endpoints non-adjacent.
pub fn v_structures_of_dag(g: &Pdag) -> Vec<VStructure> {
    let mut out = Vec::new();
    for j in 0..g.n() {
        let pa = g.parents(j);
        for (ia, &a) in pa.iter().enumerate() {
            for &b in pa.iter().skip(ia + 1) {
                if !g.adjacent(a, b) {
                    out.push(VStructure::canonical(a, j, b));
                }
            }
        }
    }
    out.sort_unstable();
    out
}

#[derive(PartialEq, Eq)]
enum OrientOutcome {
    Oriented,
    AlreadyDirected,
    Conflict,
    Missing,
}

/// Try to orient `from -> to`, refusing when the edge is already directed
/// the other way or when the orientation would close a directed cycle.
/// Existing directed marks always win.
fn try_orient(g: &mut Pdag, from: usize, to: usize) -> OrientOutcome {
    if g.has_directed(from, to) {
        return OrientOutcome::AlreadyDirected;
    }
    if g.has_directed(to, from) {
        return OrientOutcome::Conflict;
    }
    if !g.has_undirected(from, to) {
        return OrientOutcome::Missing;
    }
    if g.directed_path_exists(to, from) {
        return OrientOutcome::Conflict;
    }
    g.set_directed(from, to);
    OrientOutcome::Oriented
}

/// Orient the prongs of each detected v-structure into its collider.
/// Conflicting marks (a prong already directed out of the collider, or an
/// orientation that would create a cycle) are left untouched and counted.
pub fn apply_v_structures(g: &mut Pdag, vs: &[VStructure], stats: &mut OrientStats) {
    for v in vs {
        for prong in [v.a, v.b] {
            match try_orient(g, prong, v.collider) {
                OrientOutcome::Oriented => stats.oriented += 1,
                OrientOutcome::Conflict => stats.conflicts += 1,
                _ => {}
            }
        }
    }
}

/// Run the orientation rules to a fixed point. Never reverses an existing
/// directed mark; each refused application is counted once as a conflict.
pub fn apply_meek_rules(g: &mut Pdag, cfg: MeekConfig) -> OrientStats {
    let mut stats = OrientStats::default();
    // Additional directed edges never unblock a refused orientation, so a
    // refusal is permanent within this call.
    let mut refused: std::collections::BTreeSet<(usize, usize)> = Default::default();
    loop {
        let oriented_before = stats.oriented;
        let undirected: Vec<(usize, usize)> = g
            .edges()
            .into_iter()
            .filter(|(_, _, m)| *m == super::EdgeMark::Undirected)
            .map(|(a, b, _)| (a, b))
            .collect();
        for (a, b) in undirected {
            // Both directions of the undirected pair are candidates.
            for (x, y) in [(a, b), (b, a)] {
                if !g.has_undirected(x, y) || refused.contains(&(x, y)) {
                    continue;
                }
                if rule1_applies(g, x, y)
                    || rule2_applies(g, x, y)
                    || rule3_applies(g, x, y)
                    || (cfg.rule4 && rule4_applies(g, x, y))
                {
                    match try_orient(g, x, y) {
                        OrientOutcome::Oriented => stats.oriented += 1,
                        OrientOutcome::Conflict => {
                            refused.insert((x, y));
                            stats.conflicts += 1;
                        }
                        _ => {}
                    }
                }
            }
        }
        if stats.oriented == oriented_before {
            break;
        }
    }
    stats
}

/// Rule 1: some `w -> x` with `w`, `y` non-adjacent forces `x -> y`
/// (otherwise a new v-structure at `x` would appear).
fn rule1_applies(g: &Pdag, x: usize, y: usize) -> bool {
    g.parents(x)
        .into_iter()
        .any(|w| w != y && !g.adjacent(w, y))
}

/// Rule 2: a directed chain `x -> w -> y` forces `x -> y` (acyclicity).
fn rule2_applies(g: &Pdag, x: usize, y: usize) -> bool {
    g.children(x)
        .into_iter()
        .any(|w| w != y && g.has_directed(w, y))
}

/// Rule 3: two chains `x - w -> y` and `x - z -> y` with `w`, `z`
/// non-adjacent force `x -> y`.
fn rule3_applies(g: &Pdag, x: usize, y: usize) -> bool {
    let ws: Vec<usize> = g
        .undirected_neighbors(x)
        .into_iter()
        .filter(|&w| w != y && g.has_directed(w, y))
        .collect();
    for (i, &w) in ws.iter().enumerate() {
        for &z in ws.iter().skip(i + 1) {
            if !g.adjacent(w, z) {
                return true;
            }
        }
    }
    false
}

/// Rule 4: a chain `w -> z -> y` with `w`, `y` non-adjacent and `x`
/// adjacent to both `w` and `z` forces `x -> y`. Sound only together with
/// background knowledge; see Meek's completion result.
fn rule4_applies(g: &Pdag, x: usize, y: usize) -> bool {
    for z in g.parents(y) {
        if z == x || !g.adjacent(x, z) {
            continue;
        }
        for w in g.parents(z) {
            if w != x && w != y && g.adjacent(x, w) && !g.adjacent(w, y) {
                return true;
            }
        }
    }
    false
}

/// The completed pattern of a fully directed acyclic graph: skeleton plus
/// the graph's own v-structures, closed under rules 1-3.
pub fn cpdag_of_dag(dag: &Pdag) -> Result<Pdag, GraphError> {
    if !dag.is_acyclic()? {
        return Err(GraphError::NoExtension);
    }
    let vs = v_structures_of_dag(dag);
    let mut g = dag.skeleton();
    let mut stats = OrientStats::default();
    apply_v_structures(&mut g, &vs, &mut stats);
    apply_meek_rules(&mut g, MeekConfig { rule4: false });
    debug_assert_eq!(stats.conflicts, 0);
    Ok(g)
}

/// The maximally oriented graph reachable from a DAG's pattern once
/// chronological background knowledge is added: every cross-tier undirected
/// edge is directed earlier-to-later and the rules (including rule 4) are
/// run to closure.
pub fn tiered_cpdag_of_dag(dag: &Pdag, cfg: MeekConfig) -> Result<Pdag, GraphError> {
    let mut g = cpdag_of_dag(dag)?;
    let undirected: Vec<(usize, usize)> = g
        .edges()
        .into_iter()
        .filter(|(_, _, m)| *m == super::EdgeMark::Undirected)
        .map(|(a, b, _)| (a, b))
        .collect();
    for (a, b) in undirected {
        let (ta, tb) = (g.vertex(a).tier, g.vertex(b).tier);
        if ta < tb {
            g.set_directed(a, b);
        } else if tb < ta {
            g.set_directed(b, a);
        }
    }
    apply_meek_rules(&mut g, cfg);
    Ok(g)
}
