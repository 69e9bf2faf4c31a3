//! Enumeration of the DAGs represented by a CPDAG: recursive orientation of
//! the undirected edges with acyclicity and new-collider pruning.

use std::collections::BTreeSet;

use super::meek::v_structures_of_dag;
use super::{EdgeMark, Pdag};
use crate::error::GraphError;

/// Hard cap on the number of undirected edges the search will expand.
pub const EXTENSION_GUARD: usize = 20;

/// All DAGs sharing the skeleton and v-structures of `c`. Errors when the
/// undirected part exceeds [`EXTENSION_GUARD`] edges or when no consistent
/// extension exists.
pub fn enumerate_dag_extensions(c: &Pdag) -> Result<Vec<Pdag>, GraphError> {
    let undirected: Vec<(usize, usize)> = c
        .edges()
        .into_iter()
        .filter(|(_, _, m)| *m == EdgeMark::Undirected)
        .map(|(a, b, _)| (a, b))
        .collect();
    if undirected.len() > EXTENSION_GUARD {
        return Err(GraphError::ExtensionGuardExceeded {
            undirected: undirected.len(),
            guard: EXTENSION_GUARD,
        });
    }
    if !c.directed_part_acyclic() {
        return Err(GraphError::NoExtension);
    }

    let base: BTreeSet<(usize, usize, usize)> = v_structures_of_dag(c)
        .into_iter()
        .map(|v| (v.a, v.collider, v.b))
        .collect();

    let mut out = Vec::new();
    let mut work = c.clone();
    extend(&mut work, &undirected, 0, &base, &mut out);
    if out.is_empty() {
        return Err(GraphError::NoExtension);
    }
    Ok(out)
}

fn extend(
    g: &mut Pdag,
    undirected: &[(usize, usize)],
    idx: usize,
    base: &BTreeSet<(usize, usize, usize)>,
    out: &mut Vec<Pdag>,
) {
    if idx == undirected.len() {
        out.push(g.clone());
        return;
    }
    let (a, b) = undirected[idx];
    for (from, to) in [(a, b), (b, a)] {
        if orientation_ok(g, from, to, base) {
            g.set_directed(from, to);
            extend(g, undirected, idx + 1, base, out);
            g.set_undirected(a, b);
        }
    }
}

/// Orienting `from -> to` must not close a directed cycle and must not
/// create a collider at `to` that is absent from the base graph. Colliders
/// can only appear at the head of the new arrow, so the check is local.
fn orientation_ok(
    g: &Pdag,
    from: usize,
    to: usize,
    base: &BTreeSet<(usize, usize, usize)>,
) -> bool {
    if g.directed_path_exists(to, from) {
        return false;
    }
    for w in g.parents(to) {
        if w == from || g.adjacent(w, from) {
            continue;
        }
        let key = if from < w {
            (from, to, w)
        } else {
            (w, to, from)
        };
        if !base.contains(&key) {
            return false;
        }
    }
    true
}
