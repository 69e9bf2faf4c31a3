//! Skeleton learning and CPDAG completion: order-dependent PC, the
//! order-independent PC-stable, and the chronologically ordered COPC
//! variants that treat visit times as background knowledge.
//!
//! COPC changes two things. While learning the skeleton, a pair measured
//! at times (t, t*) is never tested against conditioning sets containing
//! variables measured after max(t, t*). After the skeleton is found, every
//! surviving cross-tier edge is oriented from the earlier tier to the
//! later one before v-structures are determined.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

pub use crate::graph::SepsetTable;

use crate::citest::{CondIndepTest, FisherZTest};
use crate::data::TieredDataset;
use crate::error::LearnError;
use crate::graph::{
    apply_meek_rules, apply_v_structures, find_v_structures, MeekConfig, OrientStats, Pdag,
    Vertex,
};

/// The four learner variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    Pc,
    PcStable,
    Copc,
    CopcStable,
}

impl Variant {
    pub fn stable(self) -> bool {
        matches!(self, Variant::PcStable | Variant::CopcStable)
    }

    pub fn chronological(self) -> bool {
        matches!(self, Variant::Copc | Variant::CopcStable)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Pc => "pc",
            Variant::PcStable => "pc-stable",
            Variant::Copc => "copc",
            Variant::CopcStable => "copc-stable",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pc" => Ok(Variant::Pc),
            "pc-stable" | "pcstable" => Ok(Variant::PcStable),
            "copc" => Ok(Variant::Copc),
            "copc-stable" | "copcstable" => Ok(Variant::CopcStable),
            other => Err(format!(
                "unknown variant `{other}` (expected pc, pc-stable, copc, copc-stable)"
            )),
        }
    }
}

/// Learner configuration.
#[derive(Debug, Clone)]
pub struct LearnConfig {
    /// Significance cut-off for the conditional-independence tests.
    pub alpha: f64,
    pub variant: Variant,
    /// Cap on the conditioning-set size; `None` leaves it unlimited.
    pub max_cond_size: Option<usize>,
    /// Iteration order over vertices for the order-dependent variants;
    /// defaults to dataset column order.
    pub vertex_order: Option<Vec<usize>>,
    pub meek: MeekConfig,
    /// Restrict v-structure orientation to triples whose prongs are both
    /// still undirected (COPC only; by default a chronologically fixed
    /// arrow may serve as one prong of a collider).
    pub vstruct_within_tier_only: bool,
}

impl LearnConfig {
    pub fn new(alpha: f64, variant: Variant) -> Self {
        LearnConfig {
            alpha,
            variant,
            max_cond_size: None,
            vertex_order: None,
            meek: MeekConfig::default(),
            vstruct_within_tier_only: false,
        }
    }
}

/// Per-run diagnostics, serialized as the JSON run record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunDiagnostics {
    pub variant: String,
    pub alpha: f64,
    pub ci_tests: usize,
    pub max_level_reached: usize,
    pub v_structure_count: usize,
    pub conflicts: usize,
    pub singular_tests: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u128>,
}

/// A learned CPDAG with its separation sets and diagnostics.
#[derive(Debug)]
pub struct LearnResult {
    pub graph: Pdag,
    pub sepsets: SepsetTable,
    pub diagnostics: RunDiagnostics,
}

/// The graph both algorithm families start from: complete undirected for
/// the PC variants; for COPC, cross-tier edges are pre-directed from the
/// earlier to the later tier and only same-tier edges stay undirected.
pub fn initial_graph(vertices: Vec<Vertex>, variant: Variant) -> Result<Pdag, LearnError> {
    let mut g = Pdag::complete_undirected(vertices)?;
    if variant.chronological() {
        orient_chronological(&mut g);
    }
    Ok(g)
}

/// Direct every surviving cross-tier edge from the earlier tier to the
/// later one; within-tier edges are untouched. Returns how many edges were
/// oriented.
pub fn orient_chronological(g: &mut Pdag) -> usize {
    let mut oriented = 0;
    for (a, b, mark) in g.edges() {
        if mark != crate::graph::EdgeMark::Undirected {
            continue;
        }
        let (ta, tb) = (g.vertex(a).tier, g.vertex(b).tier);
        if ta < tb {
            g.set_directed(a, b);
            oriented += 1;
        } else if tb < ta {
            g.set_directed(b, a);
            oriented += 1;
        }
    }
    oriented
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SkeletonDiagnostics {
    pub ci_tests: usize,
    pub max_level_reached: usize,
}

fn validate_order(order: &Option<Vec<usize>>, n: usize) -> Result<Vec<usize>, LearnError> {
    match order {
        None => Ok((0..n).collect()),
        Some(o) => {
            let mut seen = vec![false; n];
            if o.len() != n {
                return Err(LearnError::BadVertexOrder { expected: n });
            }
            for &v in o {
                if v >= n || seen[v] {
                    return Err(LearnError::BadVertexOrder { expected: n });
                }
                seen[v] = true;
            }
            Ok(o.clone())
        }
    }
}

/// Level-wise PC edge removal over a complete initial graph.
///
/// At level l, each ordered adjacent pair (i, j) is tested against all
/// size-l subsets of i's candidate adjacencies; an independent verdict
/// removes the edge and records the separating set. The stable variants
/// freeze the candidate adjacency sets at the start of each level, which
/// makes the output independent of the iteration order.
fn skeleton_search(
    vertices: Vec<Vertex>,
    test: &dyn CondIndepTest,
    config: &LearnConfig,
    tier_filter: bool,
    level_cap: Option<usize>,
) -> Result<(Pdag, SepsetTable, SkeletonDiagnostics), LearnError> {
    let n = vertices.len();
    let order = validate_order(&config.vertex_order, n)?;
    let tiers: Vec<usize> = vertices.iter().map(|v| v.tier).collect();
    let mut g = Pdag::complete_undirected(vertices)?;
    let mut sepsets = SepsetTable::new();
    let mut diag = SkeletonDiagnostics::default();

    let cap = match (config.max_cond_size, level_cap) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (Some(a), None) => Some(a),
        (None, b) => b,
    };

    let pool_of = |g: &Pdag, frozen: Option<&Vec<Vec<usize>>>, i: usize, j: usize| -> Vec<usize> {
        let base = match frozen {
            Some(f) => f[i].clone(),
            None => g.adjacencies(i),
        };
        let tier_max = tiers[i].max(tiers[j]);
        base.into_iter()
            .filter(|&v| v != j && (!tier_filter || tiers[v] <= tier_max))
            .collect()
    };

    let mut level = 0usize;
    loop {
        let frozen: Option<Vec<Vec<usize>>> = config
            .variant
            .stable()
            .then(|| (0..n).map(|i| g.adjacencies(i)).collect());

        for &i in &order {
            for &j in &order {
                if i == j || !g.adjacent(i, j) {
                    continue;
                }
                let pool = pool_of(&g, frozen.as_ref(), i, j);
                if pool.len() < level {
                    continue;
                }
                for s in pool.iter().copied().combinations(level) {
                    diag.ci_tests += 1;
                    diag.max_level_reached = diag.max_level_reached.max(level);
                    if test.independent(i, j, &s)? {
                        g.remove_edge(i, j);
                        sepsets.insert(i, j, s);
                        break;
                    }
                }
            }
        }

        if cap == Some(level) {
            break;
        }
        // Continue only while some pair can still supply a larger set.
        let next = level + 1;
        let mut any = false;
        'outer: for &i in &order {
            for &j in &order {
                if i != j && g.adjacent(i, j) && pool_of(&g, None, i, j).len() >= next {
                    any = true;
                    break 'outer;
                }
            }
        }
        if !any {
            break;
        }
        level = next;
    }

    Ok((g, sepsets, diag))
}

/// Standard level-wise skeleton search (no tier constraint).
pub fn learn_skeleton(
    vertices: Vec<Vertex>,
    test: &dyn CondIndepTest,
    config: &LearnConfig,
    level_cap: Option<usize>,
) -> Result<(Pdag, SepsetTable, SkeletonDiagnostics), LearnError> {
    skeleton_search(vertices, test, config, false, level_cap)
}

/// Skeleton search with the chronological conditioning constraint: for a
/// pair measured at tiers (t, t*), candidate conditioning sets exclude all
/// vertices measured after max(t, t*). The outcome sits in the maximal
/// tier, so it is never conditioned on in covariate-covariate tests.
pub fn learn_skeleton_chrono(
    vertices: Vec<Vertex>,
    test: &dyn CondIndepTest,
    config: &LearnConfig,
    level_cap: Option<usize>,
) -> Result<(Pdag, SepsetTable, SkeletonDiagnostics), LearnError> {
    skeleton_search(vertices, test, config, true, level_cap)
}

/// Full pipeline against an arbitrary independence backend:
/// skeleton, chronological orientation (COPC), v-structures, Meek closure.
pub fn run_with_test(
    vertices: Vec<Vertex>,
    test: &dyn CondIndepTest,
    config: &LearnConfig,
    level_cap: Option<usize>,
) -> Result<LearnResult, LearnError> {
    let chrono = config.variant.chronological();
    let (mut g, sepsets, skel_diag) = skeleton_search(vertices, test, config, chrono, level_cap)?;

    if chrono {
        orient_chronological(&mut g);
    }

    let mut v_structures = find_v_structures(&g, &sepsets)?;
    if config.vstruct_within_tier_only {
        v_structures.retain(|v| {
            g.has_undirected(v.a, v.collider) && g.has_undirected(v.b, v.collider)
        });
    }
    let mut stats = OrientStats::default();
    apply_v_structures(&mut g, &v_structures, &mut stats);
    let meek_stats = apply_meek_rules(&mut g, config.meek);

    Ok(LearnResult {
        graph: g,
        sepsets,
        diagnostics: RunDiagnostics {
            variant: config.variant.as_str().to_string(),
            alpha: config.alpha,
            ci_tests: skel_diag.ci_tests,
            max_level_reached: skel_diag.max_level_reached,
            v_structure_count: v_structures.len(),
            conflicts: stats.conflicts + meek_stats.conflicts,
            singular_tests: 0,
            wall_time_ms: None,
        },
    })
}

/// Learn a CPDAG from data with the Fisher z test at `config.alpha`.
/// The conditioning-set size is silently capped so the test always has
/// positive degrees of freedom.
pub fn run(data: &TieredDataset, config: &LearnConfig) -> Result<LearnResult, LearnError> {
    let test = FisherZTest::new(data, config.alpha)?;
    let df_cap = data.n_rows().saturating_sub(4);
    let mut result = run_with_test(data.vertices(), &test, config, Some(df_cap))?;
    result.diagnostics.singular_tests = test.singular_events();
    Ok(result)
}
