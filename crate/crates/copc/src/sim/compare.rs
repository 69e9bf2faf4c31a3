//! PC-vs-COPC comparison protocol: per-replicate metrics (adjacency
//! sensitivity and specificity, structural Hamming distance, effect-
//! estimation mean squared error) and their aggregation across replicates.
//!
//! Each variant is scored against its identifiable target: the plain
//! pattern for PC-stable, the chronologically closed pattern for
//! COPC-stable. Adjacency-level sensitivity and specificity are identical
//! under both targets; the distinction only matters for the SHD.

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{generate_ar_data, generate_random_time_dag, true_effect, SimScenario};
use crate::error::SimError;
use crate::firth::FitOptions;
use crate::graph::{shd_with_mode, MeekConfig, Pdag, ShdMode};
use crate::ida::{ida_multiset, lower_bound};
use crate::pc::{run, LearnConfig, Variant};
use crate::seeds::derive_seed;

/// Scores of one estimated graph against the truth.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Metrics {
    /// Share of true adjacencies recovered.
    pub sensitivity: f64,
    /// Share of true non-adjacencies kept absent.
    pub specificity: f64,
    pub shd: usize,
    /// Mean squared error of the effect lower bounds against the absolute
    /// true effects; absent when effects were not evaluated.
    pub mse: Option<f64>,
}

/// Adjacency-level confusion counts plus SHD of the estimate against the
/// chosen truth graph. Optional effect vectors (aligned, one entry per
/// covariate) turn on the MSE.
pub fn evaluate(
    est: &Pdag,
    truth: &Pdag,
    est_effects: Option<&[f64]>,
    true_effects: Option<&[f64]>,
    shd_mode: ShdMode,
) -> Result<Metrics, crate::error::GraphError> {
    let n = truth.n();
    if !est.same_vertex_set(truth) {
        return Err(crate::error::GraphError::VertexSetMismatch);
    }
    let (mut tp, mut fn_, mut fp, mut tn) = (0usize, 0usize, 0usize, 0usize);
    for a in 0..n {
        for b in (a + 1)..n {
            match (truth.adjacent(a, b), est.adjacent(a, b)) {
                (true, true) => tp += 1,
                (true, false) => fn_ += 1,
                (false, true) => fp += 1,
                (false, false) => tn += 1,
            }
        }
    }
    let sensitivity = if tp + fn_ == 0 {
        1.0
    } else {
        tp as f64 / (tp + fn_) as f64
    };
    let specificity = if tn + fp == 0 {
        1.0
    } else {
        tn as f64 / (tn + fp) as f64
    };
    let shd = shd_with_mode(est, truth, shd_mode)?;
    let mse = match (est_effects, true_effects) {
        (Some(e), Some(t)) => {
            assert_eq!(e.len(), t.len());
            let k = e.len().max(1);
            Some(
                e.iter()
                    .zip(t.iter())
                    .map(|(b, theta)| (b - theta.abs()).powi(2))
                    .sum::<f64>()
                    / k as f64,
            )
        }
        _ => None,
    };
    Ok(Metrics {
        sensitivity,
        specificity,
        shd,
        mse,
    })
}

/// Knobs of the comparison loop.
#[derive(Debug, Clone, Copy)]
pub struct ComparisonOptions {
    /// Evaluate true effects by Monte Carlo and report MSE (slower).
    pub with_mse: bool,
    /// Monte Carlo sample size behind each true-effect evaluation.
    pub mc_size: usize,
    pub shd_mode: ShdMode,
    pub meek: MeekConfig,
}

impl Default for ComparisonOptions {
    fn default() -> Self {
        ComparisonOptions {
            with_mse: false,
            mc_size: 200_000,
            shd_mode: ShdMode::Full,
            meek: MeekConfig::default(),
        }
    }
}

/// Metrics of both variants on one replicate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReplicatePair {
    pub pc: Metrics,
    pub copc: Metrics,
}

/// Mean / sd / standard error of one variant over the replicates.
#[derive(Debug, Clone, Serialize)]
pub struct VariantSummary {
    pub variant: String,
    pub sensitivity_mean: f64,
    pub sensitivity_sd: f64,
    pub specificity_mean: f64,
    pub specificity_sd: f64,
    pub shd_mean: f64,
    pub shd_sd: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mse_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mse_sd: Option<f64>,
}

#[derive(Debug)]
pub struct ComparisonResult {
    pub scenario: SimScenario,
    pub replicates: Vec<ReplicatePair>,
    pub summaries: Vec<VariantSummary>,
    pub failed_replicates: usize,
}

fn mean_sd(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    (mean, var.sqrt())
}

/// One-sided paired t test of `mean(xs - ys) > 0`; returns `(t, p)`.
/// Degenerate zero-variance differences give p = 0 or 1 by sign.
pub fn paired_t_greater(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let diffs: Vec<f64> = xs.iter().zip(ys.iter()).map(|(a, b)| a - b).collect();
    let (mean, sd) = mean_sd(diffs.iter().copied());
    let n = diffs.len() as f64;
    if sd == 0.0 {
        return if mean > 0.0 {
            (f64::INFINITY, 0.0)
        } else {
            (f64::NEG_INFINITY, 1.0)
        };
    }
    let t = mean / (sd / n.sqrt());
    let dist = StudentsT::new(0.0, 1.0, n - 1.0).expect("valid dof");
    (t, 1.0 - dist.cdf(t))
}

fn effect_bounds(
    data: &crate::data::TieredDataset,
    graph: &Pdag,
    outcome: usize,
) -> Vec<f64> {
    let opts = FitOptions::default();
    data.covariate_indices()
        .into_iter()
        .map(|x| match ida_multiset(data, graph, x, outcome, &opts) {
            Ok(m) => lower_bound(&m).lower_bound,
            Err(_) => 0.0,
        })
        .collect()
}

struct ReplicateOutcome {
    pair: Option<ReplicatePair>,
}

fn one_replicate(
    scenario: &SimScenario,
    options: &ComparisonOptions,
    k: usize,
) -> Result<ReplicateOutcome, SimError> {
    let model_seed = derive_seed(scenario.master_seed, k as u64, 101);
    let data_seed = derive_seed(scenario.master_seed, k as u64, 202);
    let model = generate_random_time_dag(scenario, model_seed)?;
    let data = match generate_ar_data(&model, scenario, data_seed) {
        Ok(d) => d,
        Err(_) => return Ok(ReplicateOutcome { pair: None }),
    };

    let true_abs_effects: Option<Vec<f64>> = if options.with_mse {
        let mc_seed = derive_seed(scenario.master_seed, k as u64, 303);
        let mut effects = Vec::with_capacity(scenario.n_covariates());
        for x in 0..scenario.n_covariates() {
            effects.push(true_effect(&model, scenario, x, mc_seed, options.mc_size)?);
        }
        Some(effects)
    } else {
        None
    };

    let metric_of = |variant: Variant, truth: &Pdag| -> Result<Option<Metrics>, SimError> {
        let mut config = LearnConfig::new(scenario.alpha, variant);
        config.meek = options.meek;
        let learned = match run(&data, &config) {
            Ok(l) => l,
            Err(_) => return Ok(None),
        };
        let est_effects = options
            .with_mse
            .then(|| effect_bounds(&data, &learned.graph, model.outcome));
        let metrics = evaluate(
            &learned.graph,
            truth,
            est_effects.as_deref(),
            true_abs_effects.as_deref(),
            options.shd_mode,
        )?;
        Ok(Some(metrics))
    };

    let pc = metric_of(Variant::PcStable, &model.cpdag)?;
    let copc = metric_of(Variant::CopcStable, &model.tiered_cpdag)?;
    Ok(ReplicateOutcome {
        pair: match (pc, copc) {
            (Some(pc), Some(copc)) => Some(ReplicatePair { pc, copc }),
            _ => None,
        },
    })
}

fn summarize(variant: &str, metrics: impl Iterator<Item = Metrics> + Clone) -> VariantSummary {
    let (se_m, se_s) = mean_sd(metrics.clone().map(|m| m.sensitivity));
    let (sp_m, sp_s) = mean_sd(metrics.clone().map(|m| m.specificity));
    let (shd_m, shd_s) = mean_sd(metrics.clone().map(|m| m.shd as f64));
    let mses: Vec<f64> = metrics.filter_map(|m| m.mse).collect();
    let (mse_m, mse_s) = if mses.is_empty() {
        (None, None)
    } else {
        let (m, s) = mean_sd(mses.iter().copied());
        (Some(m), Some(s))
    };
    VariantSummary {
        variant: variant.to_string(),
        sensitivity_mean: se_m,
        sensitivity_sd: se_s,
        specificity_mean: sp_m,
        specificity_sd: sp_s,
        shd_mean: shd_m,
        shd_sd: shd_s,
        mse_mean: mse_m,
        mse_sd: mse_s,
    }
}

/// Run `scenario.n_replicates` independent draws in parallel, score both
/// variants on each, and aggregate. Deterministic for a fixed master seed.
pub fn run_comparison(
    scenario: &SimScenario,
    options: &ComparisonOptions,
) -> Result<ComparisonResult, SimError> {
    scenario.validate()?;
    let outcomes: Vec<Result<ReplicateOutcome, SimError>> = (0..scenario.n_replicates)
        .into_par_iter()
        .map(|k| one_replicate(scenario, options, k))
        .collect();

    let mut replicates = Vec::new();
    let mut failed = 0;
    for outcome in outcomes {
        match outcome?.pair {
            Some(pair) => replicates.push(pair),
            None => failed += 1,
        }
    }
    let summaries = vec![
        summarize("pc-stable", replicates.iter().map(|r| r.pc)),
        summarize("copc-stable", replicates.iter().map(|r| r.copc)),
    ];
    Ok(ComparisonResult {
        scenario: scenario.clone(),
        replicates,
        summaries,
        failed_replicates: failed,
    })
}

impl ComparisonResult {
    /// CSV table with one row per variant, mirroring the usual comparison
    /// layout (means with sds and standard errors).
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from(
            "variant,n_visits,n_obs,alpha,replicates,sensitivity_mean,sensitivity_sd,sensitivity_se,specificity_mean,specificity_sd,specificity_se,shd_mean,shd_sd,shd_se,mse_mean,mse_sd\n",
        );
        let n = self.replicates.len().max(1) as f64;
        for s in &self.summaries {
            let fmt_opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                s.variant,
                self.scenario.n_visits,
                self.scenario.n_obs,
                self.scenario.alpha,
                self.replicates.len(),
                s.sensitivity_mean,
                s.sensitivity_sd,
                s.sensitivity_sd / n.sqrt(),
                s.specificity_mean,
                s.specificity_sd,
                s.specificity_sd / n.sqrt(),
                s.shd_mean,
                s.shd_sd,
                s.shd_sd / n.sqrt(),
                fmt_opt(s.mse_mean),
                fmt_opt(s.mse_sd),
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Vertex;
    use approx::assert_abs_diff_eq;

    fn verts(n: usize) -> Vec<Vertex> {
        (0..n).map(|i| Vertex::new(i, format!("X{i}"), 1)).collect()
    }

    #[test]
    fn perfect_estimate_scores_perfectly() {
        let mut truth = Pdag::new(verts(4)).unwrap();
        truth.set_directed(0, 1);
        truth.set_undirected(1, 2);
        let m = evaluate(&truth.clone(), &truth, None, None, ShdMode::Full).unwrap();
        assert_eq!(m.sensitivity, 1.0);
        assert_eq!(m.specificity, 1.0);
        assert_eq!(m.shd, 0);
        assert!(m.mse.is_none());
    }

    #[test]
    fn empty_estimate_has_zero_sensitivity_full_specificity() {
        let mut truth = Pdag::new(verts(4)).unwrap();
        truth.set_directed(0, 1);
        truth.set_directed(2, 3);
        let empty = Pdag::new(verts(4)).unwrap();
        let m = evaluate(&empty, &truth, None, None, ShdMode::Full).unwrap();
        assert_eq!(m.sensitivity, 0.0);
        assert_eq!(m.specificity, 1.0);
        assert_eq!(m.shd, 2);
    }

    #[test]
    fn hand_built_confusion_table() {
        // Truth: 0-1, 1-2; estimate: 0-1, 0-3. TP=1, FN=1, FP=1, TN=3.
        let mut truth = Pdag::new(verts(4)).unwrap();
        truth.set_undirected(0, 1);
        truth.set_undirected(1, 2);
        let mut est = Pdag::new(verts(4)).unwrap();
        est.set_undirected(0, 1);
        est.set_undirected(0, 3);
        let m = evaluate(&est, &truth, None, None, ShdMode::Full).unwrap();
        assert_abs_diff_eq!(m.sensitivity, 0.5);
        assert_abs_diff_eq!(m.specificity, 0.75);
        assert_eq!(m.shd, 2);
    }

    #[test]
    fn mse_uses_absolute_true_effects() {
        let truth = Pdag::new(verts(2)).unwrap();
        let est = truth.clone();
        let m = evaluate(
            &est,
            &truth,
            Some(&[0.5, 0.1]),
            Some(&[-0.5, 0.3]),
            ShdMode::Full,
        )
        .unwrap();
        // (0.5 - 0.5)^2 and (0.1 - 0.3)^2 averaged.
        assert_abs_diff_eq!(m.mse.unwrap(), 0.02, epsilon = 1e-12);
    }

    #[test]
    fn paired_t_detects_a_consistent_difference() {
        let xs: Vec<f64> = (0..100).map(|i| 0.6 + 0.001 * (i % 7) as f64).collect();
        let ys: Vec<f64> = (0..100).map(|i| 0.5 + 0.001 * (i % 5) as f64).collect();
        let (t, p) = paired_t_greater(&xs, &ys);
        assert!(t > 10.0);
        assert!(p < 1e-10);
        let (_, p_rev) = paired_t_greater(&ys, &xs);
        assert!(p_rev > 0.999);
    }

    /// Effect estimates based on the chronologically learned graphs are,
    /// on average, at least as accurate as those from the plain learner.
    #[test]
    fn mse_trend_favors_copc() {
        let scenario = SimScenario {
            p_per_visit: 2,
            n_visits: 3,
            n_obs: 300,
            rho: 0.6,
            edge_prob: Some(0.25),
            n_replicates: 100,
            master_seed: 12,
            ..Default::default()
        };
        let options = ComparisonOptions {
            with_mse: true,
            mc_size: 20_000,
            ..Default::default()
        };
        let result = run_comparison(&scenario, &options).unwrap();
        let mse_pc = result.summaries[0].mse_mean.unwrap();
        let mse_copc = result.summaries[1].mse_mean.unwrap();
        assert!(
            mse_copc <= mse_pc,
            "mean mse copc {mse_copc} vs pc {mse_pc}"
        );
    }

    #[test]
    fn comparison_is_deterministic_and_complete() {
        let scenario = SimScenario {
            p_per_visit: 2,
            n_visits: 3,
            n_obs: 150,
            n_replicates: 8,
            master_seed: 5,
            ..Default::default()
        };
        let options = ComparisonOptions::default();
        let a = run_comparison(&scenario, &options).unwrap();
        let b = run_comparison(&scenario, &options).unwrap();
        assert_eq!(a.replicates.len() + a.failed_replicates, 8);
        for (x, y) in a.replicates.iter().zip(&b.replicates) {
            assert_eq!(x.pc.shd, y.pc.shd);
            assert_eq!(x.copc.shd, y.copc.shd);
            assert_eq!(x.pc.sensitivity, y.pc.sensitivity);
        }
        assert_eq!(a.to_csv_string(), b.to_csv_string());
    }
}
