//! Ground-truth generation for the simulation studies: random tiered
//! weighted DAGs, Gaussian data with autoregressive residual correlation
//! across visits, and Monte Carlo evaluation of true adjusted effects.

mod compare;

pub use compare::{
    evaluate, paired_t_greater, run_comparison, ComparisonOptions, ComparisonResult, Metrics,
    ReplicatePair, VariantSummary,
};

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::TieredDataset;
use crate::error::{DataError, SimError};
use crate::firth::FitOptions;
use crate::graph::{cpdag_of_dag, tiered_cpdag_of_dag, MeekConfig, Pdag, Vertex, WeightedDag};
use crate::ida::adjusted_effect;

/// Parameters of one simulation scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimScenario {
    pub p_per_visit: usize,
    pub n_visits: usize,
    pub n_obs: usize,
    /// Autoregressive residual correlation between visits of a biomarker.
    pub rho: f64,
    pub sigma2: f64,
    /// Probability of keeping a candidate edge; defaults to
    /// `2 / (p_per_visit * n_visits)` (sparse graphs).
    pub edge_prob: Option<f64>,
    /// Edge weights are drawn uniformly from
    /// `[-weight_max, -weight_min] + [weight_min, weight_max]`.
    pub weight_min: f64,
    pub weight_max: f64,
    pub alpha: f64,
    pub n_replicates: usize,
    pub master_seed: u64,
}

impl Default for SimScenario {
    fn default() -> Self {
        SimScenario {
            p_per_visit: 3,
            n_visits: 4,
            n_obs: 1000,
            rho: 0.5,
            sigma2: 1.0,
            edge_prob: None,
            weight_min: 0.1,
            weight_max: 1.0,
            alpha: 0.02,
            n_replicates: 100,
            master_seed: 1,
        }
    }
}

impl SimScenario {
    pub fn n_covariates(&self) -> usize {
        self.p_per_visit * self.n_visits
    }

    pub fn resolved_edge_prob(&self) -> f64 {
        self.edge_prob
            .unwrap_or(2.0 / self.n_covariates() as f64)
            .clamp(0.0, 1.0)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.p_per_visit == 0 {
            return Err(SimError::BadScenario {
                field: "p_per_visit",
                value: 0.0,
            });
        }
        if self.n_visits == 0 {
            return Err(SimError::BadScenario {
                field: "n_visits",
                value: 0.0,
            });
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(SimError::BadScenario {
                field: "rho",
                value: self.rho,
            });
        }
        if self.sigma2 <= 0.0 {
            return Err(SimError::BadScenario {
                field: "sigma2",
                value: self.sigma2,
            });
        }
        if !(self.weight_min > 0.0 && self.weight_max >= self.weight_min) {
            return Err(SimError::BadScenario {
                field: "weight_min",
                value: self.weight_min,
            });
        }
        Ok(())
    }

    /// Parse a flat `key = value` scenario file; unset keys keep their
    /// defaults.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, DataError> {
        let text = std::fs::read_to_string(path)?;
        let mut scenario = SimScenario::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || DataError::BadTierMapLine {
                line: lineno + 1,
                text: line.to_string(),
            };
            let (key, value) = line.split_once('=').ok_or_else(bad)?;
            let (key, value) = (key.trim(), value.trim());
            let mut err = Ok(());
            match key {
                "p_per_visit" => scenario.p_per_visit = value.parse().unwrap_or_else(|_| {
                    err = Err(bad());
                    scenario.p_per_visit
                }),
                "n_visits" => scenario.n_visits = value.parse().unwrap_or_else(|_| {
                    err = Err(bad());
                    scenario.n_visits
                }),
                "n_obs" => scenario.n_obs = value.parse().unwrap_or_else(|_| {
                    err = Err(bad());
                    scenario.n_obs
                }),
                "rho" => scenario.rho = value.parse().unwrap_or_else(|_| {
                    err = Err(bad());
                    scenario.rho
                }),
                "sigma2" => scenario.sigma2 = value.parse().unwrap_or_else(|_| {
                    err = Err(bad());
                    scenario.sigma2
                }),
                "edge_prob" => {
                    scenario.edge_prob = Some(value.parse().map_err(|_| bad())?);
                }
                "weight_min" => scenario.weight_min = value.parse().unwrap_or_else(|_| {
                    err = Err(bad());
                    scenario.weight_min
                }),
                "weight_max" => scenario.weight_max = value.parse().unwrap_or_else(|_| {
                    err = Err(bad());
                    scenario.weight_max
                }),
                "alpha" => scenario.alpha = value.parse().unwrap_or_else(|_| {
                    err = Err(bad());
                    scenario.alpha
                }),
                "n_replicates" => scenario.n_replicates = value.parse().unwrap_or_else(|_| {
                    err = Err(bad());
                    scenario.n_replicates
                }),
                "master_seed" => scenario.master_seed = value.parse().unwrap_or_else(|_| {
                    err = Err(bad());
                    scenario.master_seed
                }),
                _ => return Err(bad()),
            }
            err?;
        }
        Ok(scenario)
    }
}

/// A generated ground truth: the weighted DAG, its plain pattern, and its
/// chronologically closed pattern.
#[derive(Debug, Clone)]
pub struct TrueModel {
    pub dag: WeightedDag,
    /// Pattern of the DAG (skeleton + v-structures + rules 1-3).
    pub cpdag: Pdag,
    /// Pattern once tier knowledge is added (cross-tier edges directed,
    /// rules 1-4 to closure): the identifiable target of COPC.
    pub tiered_cpdag: Pdag,
    pub outcome: usize,
}

fn scenario_vertices(scenario: &SimScenario) -> Vec<Vertex> {
    let mut vertices = Vec::with_capacity(scenario.n_covariates() + 1);
    for t in 1..=scenario.n_visits {
        for b in 1..=scenario.p_per_visit {
            vertices.push(Vertex::new(vertices.len(), format!("X{b}.v{t}"), t));
        }
    }
    vertices.push(Vertex::outcome(
        vertices.len(),
        "Y",
        scenario.n_visits + 1,
    ));
    vertices
}

/// Draw a random tiered weighted DAG plus a binary outcome whose parents
/// sit in the last two visits. Candidate covariate edges run from earlier
/// (or equal, ordered by index) tiers to later ones, so the result is
/// acyclic by construction; weights avoid the (-weight_min, weight_min)
/// band around zero.
pub fn generate_random_time_dag(scenario: &SimScenario, seed: u64) -> Result<TrueModel, SimError> {
    scenario.validate()?;
    let vertices = scenario_vertices(scenario);
    let p = scenario.n_covariates();
    let outcome = p;
    let edge_prob = scenario.resolved_edge_prob();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut graph = Pdag::new(vertices)?;
    let mut weights = BTreeMap::new();

    let draw_weight = |rng: &mut ChaCha8Rng| -> f64 {
        let magnitude = rng.gen_range(scenario.weight_min..=scenario.weight_max);
        if rng.gen_bool(0.5) {
            magnitude
        } else {
            -magnitude
        }
    };

    for u in 0..p {
        for v in (u + 1)..p {
            if edge_prob > 0.0 && rng.gen_bool(edge_prob) {
                graph.set_directed(u, v);
                weights.insert((u, v), draw_weight(&mut rng));
            }
        }
    }
    let last_two = scenario.n_visits.saturating_sub(1).max(1);
    for u in 0..p {
        if graph.vertex(u).tier >= last_two && edge_prob > 0.0 && rng.gen_bool(edge_prob) {
            graph.set_directed(u, outcome);
            weights.insert((u, outcome), draw_weight(&mut rng));
        }
    }

    let cpdag = cpdag_of_dag(&graph)?;
    let tiered_cpdag = tiered_cpdag_of_dag(&graph, MeekConfig::default())?;
    Ok(TrueModel {
        dag: WeightedDag::new(graph, weights)?,
        cpdag,
        tiered_cpdag,
        outcome,
    })
}

/// Lower-triangular Cholesky factor of the AR(1) residual covariance over
/// one biomarker's visits.
fn ar_cholesky(scenario: &SimScenario) -> Result<DMatrix<f64>, SimError> {
    let t = scenario.n_visits;
    let cov = DMatrix::from_fn(t, t, |a, b| {
        scenario.rho.powi((a as i32 - b as i32).abs()) * scenario.sigma2
    });
    let chol = Cholesky::new(cov).ok_or(SimError::NotPositiveDefinite { rho: scenario.rho })?;
    Ok(chol.l())
}

/// Simulate a dataset from the model: a structural-equation pass over the
/// weighted DAG with residuals that are AR(1)-correlated across visits of
/// the same biomarker and independent across biomarkers, then a Bernoulli
/// outcome through the logistic link.
pub fn generate_ar_data(
    model: &TrueModel,
    scenario: &SimScenario,
    seed: u64,
) -> Result<TieredDataset, SimError> {
    generate_ar_data_sized(model, scenario, scenario.n_obs, seed)
}

/// Same as [`generate_ar_data`] with an explicit row count (used for the
/// large Monte Carlo samples behind true-effect evaluation).
pub fn generate_ar_data_sized(
    model: &TrueModel,
    scenario: &SimScenario,
    n_obs: usize,
    seed: u64,
) -> Result<TieredDataset, SimError> {
    scenario.validate()?;
    let p = scenario.n_covariates();
    let t = scenario.n_visits;
    let graph = model.dag.graph();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chol = ar_cholesky(scenario)?;

    // Residual matrix, biomarker by biomarker.
    let mut residuals = DMatrix::zeros(n_obs, p);
    let mut z = DVector::zeros(t);
    for b in 0..scenario.p_per_visit {
        for i in 0..n_obs {
            for s in 0..t {
                z[s] = rng.sample(StandardNormal);
            }
            let eps = &chol * &z;
            for (s, value) in eps.iter().enumerate() {
                residuals[(i, s * scenario.p_per_visit + b)] = *value;
            }
        }
    }

    // Structural pass in id order, which is topological for the generator.
    let mut values = DMatrix::zeros(n_obs, p + 1);
    for v in 0..p {
        let parents = graph.parents(v);
        for i in 0..n_obs {
            let mut acc = residuals[(i, v)];
            for &u in &parents {
                acc += model.dag.weight(u, v) * values[(i, u)];
            }
            values[(i, v)] = acc;
        }
    }
    let outcome_parents = graph.parents(model.outcome);
    for i in 0..n_obs {
        let mut eta = 0.0;
        for &u in &outcome_parents {
            eta += model.dag.weight(u, model.outcome) * values[(i, u)];
        }
        let prob = 1.0 / (1.0 + (-eta).exp());
        values[(i, p)] = if rng.gen_bool(prob) { 1.0 } else { 0.0 };
    }

    let vertices = graph.vertices();
    Ok(TieredDataset::new(
        values,
        vertices.iter().map(|v| v.name.clone()).collect(),
        vertices.iter().map(|v| v.tier).collect(),
        Some(p),
    )
    .expect("generated data is structurally valid"))
}

/// Population covariance of the covariates implied by the structural
/// weights and the AR residual covariance: `A V A^T` with
/// `A = (I - B^T)^{-1}`.
pub fn population_covariance(model: &TrueModel, scenario: &SimScenario) -> DMatrix<f64> {
    let p = scenario.n_covariates();
    let graph = model.dag.graph();
    let mut b_t = DMatrix::zeros(p, p);
    for v in 0..p {
        for u in graph.parents(v) {
            if u < p {
                b_t[(v, u)] = model.dag.weight(u, v);
            }
        }
    }
    let mut v_res = DMatrix::zeros(p, p);
    for bm in 0..scenario.p_per_visit {
        for s in 0..scenario.n_visits {
            for t2 in 0..scenario.n_visits {
                let a = s * scenario.p_per_visit + bm;
                let b = t2 * scenario.p_per_visit + bm;
                v_res[(a, b)] = scenario.rho.powi((s as i32 - t2 as i32).abs()) * scenario.sigma2;
            }
        }
    }
    let a = (DMatrix::identity(p, p) - b_t)
        .try_inverse()
        .expect("I - B is unit lower-triangular and always invertible");
    &a * v_res * a.transpose()
}

/// True adjusted effect of covariate `x` on the outcome: the same effect
/// functional the estimator uses (standardized Firth log-odds coefficient
/// of `x` given its true parents), evaluated by regression on a large
/// fresh Monte Carlo sample from the model.
pub fn true_effect(
    model: &TrueModel,
    scenario: &SimScenario,
    x: usize,
    mc_seed: u64,
    n_mc: usize,
) -> Result<f64, SimError> {
    let data = generate_ar_data_sized(model, scenario, n_mc, mc_seed)?;
    let parents = model.dag.graph().parents(x);
    Ok(adjusted_effect(
        &data,
        x,
        model.outcome,
        &parents,
        &FitOptions::default(),
    )?)
}
