//! Local IDA: enumerate the locally valid parent sets of a covariate in a
//! CPDAG, estimate the adjusted effect on the binary outcome once per
//! parent set, and summarize the resulting multiset.
//!
//! The multiset keeps duplicates: two parent sets yielding the same value
//! still contribute two entries, and its cardinality is the ambiguity of
//! the covariate. The minimum absolute value is the lower bound of the
//! covariate's causal effect.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::data::TieredDataset;
use crate::error::{FirthError, IdaError};
use crate::firth::{fit_firth_standardized, FitOptions};
use crate::graph::{Pdag, Vertex};

/// The adjusted-effect multiset of one covariate.
#[derive(Debug, Clone)]
pub struct EffectMultiset {
    pub covariate: usize,
    /// One effect estimate per locally valid parent set, in parent-set
    /// order.
    pub values: Vec<f64>,
    /// The parent sets actually used, sorted (by size, then lexically).
    pub parent_sets: Vec<Vec<usize>>,
    /// Parent sets whose regression failed and was skipped.
    pub skipped: usize,
}

/// Summary of a multiset: its min-|value| lower bound, cardinality
/// (ambiguity) and median absolute effect.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EffectSummary {
    pub covariate: usize,
    pub lower_bound: f64,
    pub ambiguity: usize,
    pub median_effect: f64,
}

/// All parent sets of `x` that are locally valid in the CPDAG `c`: the
/// directed parents plus any subset `U` of the undirected neighbors such
/// that orienting `U -> x` creates no new collider at `x`, i.e. every
/// `u` in `U` is adjacent to every other member of `U` and to every
/// directed parent. The empty augmentation is always valid, so the list is
/// never empty.
pub fn locally_valid_parent_sets(c: &Pdag, x: usize) -> Vec<Vec<usize>> {
    let pa = c.parents(x);
    let siblings = c.undirected_neighbors(x);
    let m = siblings.len();
    let mut out = Vec::new();
    'subset: for mask in 0u32..(1 << m) {
        let chosen: Vec<usize> = (0..m)
            .filter(|&b| mask & (1 << b) != 0)
            .map(|b| siblings[b])
            .collect();
        for (i, &u) in chosen.iter().enumerate() {
            for &w in chosen.iter().skip(i + 1) {
                if !c.adjacent(u, w) {
                    continue 'subset;
                }
            }
            for &w in &pa {
                if !c.adjacent(u, w) {
                    continue 'subset;
                }
            }
        }
        let mut set = pa.clone();
        set.extend(chosen);
        set.sort_unstable();
        out.push(set);
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out.dedup();
    out
}

/// Number of locally valid parent sets of `x` (its ambiguity), without
/// running any regression.
pub fn ambiguity(c: &Pdag, x: usize) -> usize {
    locally_valid_parent_sets(c, x).len()
}

/// Effect of `x` on the outcome adjusted for the parent set: the
/// standardized Firth log-odds coefficient of `x` in the regression of the
/// outcome on `{x} + parents`. A parent set containing the outcome itself
/// encodes "the outcome causes x" and contributes an exact zero.
pub fn adjusted_effect(
    data: &TieredDataset,
    x: usize,
    outcome: usize,
    parents: &[usize],
    opts: &FitOptions,
) -> Result<f64, FirthError> {
    if parents.contains(&outcome) {
        return Ok(0.0);
    }
    let n = data.n_rows();
    let mut columns = Vec::with_capacity(1 + parents.len());
    columns.push(x);
    columns.extend_from_slice(parents);
    let design = DMatrix::from_fn(n, columns.len(), |i, j| data.values()[(i, columns[j])]);
    let y = DVector::from_fn(n, |i, _| data.values()[(i, outcome)]);
    let fit = fit_firth_standardized(&design, &y, opts)?;
    Ok(fit.fit.coefficients[1])
}

/// Assemble the effect multiset of covariate `x` on `outcome` over all of
/// its locally valid parent sets, in deterministic parent-set order. A
/// failed regression skips that parent set (counted); if every fit fails
/// the whole call errors.
pub fn ida_multiset(
    data: &TieredDataset,
    c: &Pdag,
    x: usize,
    outcome: usize,
    opts: &FitOptions,
) -> Result<EffectMultiset, IdaError> {
    if c.vertex(x).is_outcome {
        return Err(IdaError::NotACovariate(x));
    }
    let sets = locally_valid_parent_sets(c, x);
    let mut values = Vec::with_capacity(sets.len());
    let mut used = Vec::with_capacity(sets.len());
    let mut skipped = 0;
    for set in sets {
        match adjusted_effect(data, x, outcome, &set, opts) {
            Ok(theta) => {
                values.push(theta);
                used.push(set);
            }
            Err(_) => skipped += 1,
        }
    }
    if values.is_empty() {
        return Err(IdaError::AllFitsFailed(c.vertex(x).name.clone()));
    }
    Ok(EffectMultiset {
        covariate: x,
        values,
        parent_sets: used,
        skipped,
    })
}

/// Lower bound, ambiguity, and median absolute effect of a multiset.
pub fn lower_bound(m: &EffectMultiset) -> EffectSummary {
    let mut abs: Vec<f64> = m.values.iter().map(|v| v.abs()).collect();
    abs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = abs.len();
    let median = if k % 2 == 1 {
        abs[k / 2]
    } else {
        0.5 * (abs[k / 2 - 1] + abs[k / 2])
    };
    EffectSummary {
        covariate: m.covariate,
        lower_bound: abs[0],
        ambiguity: k,
        median_effect: median,
    }
}

/// Rank covariates by descending lower bound; ties break on the covariate
/// name so the ordering is deterministic.
pub fn rank_covariates(mut summaries: Vec<EffectSummary>, vertices: &[Vertex]) -> Vec<EffectSummary> {
    summaries.sort_by(|a, b| {
        b.lower_bound
            .partial_cmp(&a.lower_bound)
            .unwrap()
            .then_with(|| vertices[a.covariate].name.cmp(&vertices[b.covariate].name))
    });
    summaries
}
