//! Causal stability ranking (CStaR): run the learner plus IDA over many
//! subsamples, track how often each covariate lands in the top q of the
//! lower-bound ranking, and bound the per-comparison error rate of the
//! selection.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::data::TieredDataset;
use crate::error::StabilityError;
use crate::firth::FitOptions;
use crate::ida::{ida_multiset, lower_bound, rank_covariates, EffectSummary};
use crate::pc::{run, LearnConfig};
use crate::seeds::derive_seed;

/// Configuration of a stability-selection experiment.
#[derive(Debug, Clone)]
pub struct StabilityConfig {
    pub learn: LearnConfig,
    /// Number of subsample runs.
    pub n_runs: usize,
    /// Rows drawn (without replacement) per run.
    pub subsample_size: usize,
    /// Top-list size; defaults to ceil(p / 10) when unset.
    pub q: Option<usize>,
    /// PCER selection threshold.
    pub pcer_threshold: f64,
    pub master_seed: u64,
}

impl StabilityConfig {
    pub fn new(learn: LearnConfig, master_seed: u64) -> Self {
        StabilityConfig {
            learn,
            n_runs: 300,
            subsample_size: 30,
            q: None,
            pcer_threshold: 0.005,
            master_seed,
        }
    }
}

/// Stability record of one covariate.
#[derive(Debug, Clone, Serialize)]
pub struct CovariateStability {
    pub covariate: usize,
    pub name: String,
    pub tier: usize,
    /// Share of runs in which the covariate ranked in the top q.
    pub pi: f64,
    /// PCER bound; infinite for pi <= 0.5.
    pub pcer: f64,
    pub selected: bool,
    /// Median over runs of the per-run lower bound.
    pub median_effect: f64,
}

/// Output of a stability run: per-covariate records plus the per-run
/// rankings kept for audit.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub per_covariate: Vec<CovariateStability>,
    /// Ranked covariate ids per successful run (best first).
    pub per_run_ranks: Vec<Vec<usize>>,
    pub q: usize,
    pub n_runs: usize,
    pub failed_runs: usize,
}

/// Per-comparison error rate bound for a covariate with top-q frequency
/// `pi` among `p` covariates: `(1 / (2 pi - 1)) * q^2 / p^2` when
/// `pi > 1/2`, infinite otherwise (the bound is vacuous below that).
pub fn pcer(pi: f64, q: usize, p: usize) -> f64 {
    if pi > 0.5 {
        (1.0 / (2.0 * pi - 1.0)) * (q * q) as f64 / (p * p) as f64
    } else {
        f64::INFINITY
    }
}

/// Covariates whose PCER bound meets `threshold`, ordered by PCER
/// ascending, then median effect descending, then name.
pub fn select(report: &StabilityReport, threshold: f64) -> Vec<usize> {
    let mut hits: Vec<&CovariateStability> = report
        .per_covariate
        .iter()
        .filter(|c| c.pcer <= threshold)
        .collect();
    hits.sort_by(|a, b| {
        a.pcer
            .partial_cmp(&b.pcer)
            .unwrap()
            .then_with(|| b.median_effect.partial_cmp(&a.median_effect).unwrap())
            .then_with(|| a.name.cmp(&b.name))
    });
    hits.into_iter().map(|c| c.covariate).collect()
}

enum RunOutcome {
    Ok {
        ranked: Vec<EffectSummary>,
    },
    Failed,
}

/// One subsample run: draw rows, learn the CPDAG, compute every
/// covariate's lower bound, rank. Degenerate subsamples (a constant
/// column, a single-class outcome, or a failed learn) are retried with a
/// fresh derived seed up to five times.
fn one_run(
    data: &TieredDataset,
    config: &StabilityConfig,
    outcome: usize,
    k: usize,
    fit_opts: &FitOptions,
) -> RunOutcome {
    'attempt: for attempt in 0..5u64 {
        let seed = derive_seed(config.master_seed, k as u64, attempt);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = rand::seq::index::sample(
            &mut rng,
            data.n_rows(),
            config.subsample_size.min(data.n_rows()),
        )
        .into_vec();
        rows.sort_unstable();
        let sub = data.subsample(&rows);

        // Degenerate draw: outcome single-class or any constant column.
        let ycol = sub.column(outcome);
        if ycol.iter().all(|&v| v == 0.0) || ycol.iter().all(|&v| v == 1.0) {
            continue 'attempt;
        }
        let learned = match run(&sub, &config.learn) {
            Ok(r) => r,
            Err(_) => continue 'attempt,
        };
        let mut summaries = Vec::new();
        for x in sub.covariate_indices() {
            match ida_multiset(&sub, &learned.graph, x, outcome, fit_opts) {
                Ok(m) => summaries.push(lower_bound(&m)),
                Err(_) => continue 'attempt,
            }
        }
        let ranked = rank_covariates(summaries, learned.graph.vertices());
        return RunOutcome::Ok { ranked };
    }
    RunOutcome::Failed
}

/// Run the full stability-selection loop. Deterministic for a fixed
/// master seed: per-run seeds are derived, and runs merge in index order
/// whatever the parallel schedule was.
pub fn cstar(data: &TieredDataset, config: &StabilityConfig) -> Result<StabilityReport, StabilityError> {
    let outcome = data.outcome().ok_or(StabilityError::NoOutcome)?;
    let covariates = data.covariate_indices();
    let p = covariates.len();
    let q = config.q.unwrap_or_else(|| p.div_ceil(10)).min(p);
    if q == 0 {
        return Err(StabilityError::BadTopListSize { q, p });
    }
    if config.subsample_size == 0 || config.subsample_size > data.n_rows() {
        return Err(StabilityError::BadSubsampleSize {
            size: config.subsample_size,
            n: data.n_rows(),
        });
    }
    let fit_opts = FitOptions::default();

    let outcomes: Vec<RunOutcome> = (0..config.n_runs)
        .into_par_iter()
        .map(|k| one_run(data, config, outcome, k, &fit_opts))
        .collect();

    let mut per_run_ranks = Vec::new();
    let mut top_counts = vec![0usize; data.n_cols()];
    let mut per_cov_bounds: Vec<Vec<f64>> = vec![Vec::new(); data.n_cols()];
    let mut failed_runs = 0;
    for outcome_k in &outcomes {
        match outcome_k {
            RunOutcome::Ok { ranked } => {
                for s in ranked.iter().take(q) {
                    top_counts[s.covariate] += 1;
                }
                for s in ranked {
                    per_cov_bounds[s.covariate].push(s.lower_bound);
                }
                per_run_ranks.push(ranked.iter().map(|s| s.covariate).collect());
            }
            RunOutcome::Failed => failed_runs += 1,
        }
    }
    if failed_runs * 10 > config.n_runs {
        return Err(StabilityError::TooManyFailedRuns {
            failed: failed_runs,
            total: config.n_runs,
        });
    }

    let per_covariate = covariates
        .iter()
        .map(|&x| {
            let pi = top_counts[x] as f64 / config.n_runs as f64;
            let bound = pcer(pi, q, p);
            let mut effects = per_cov_bounds[x].clone();
            effects.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let median_effect = if effects.is_empty() {
                0.0
            } else if effects.len() % 2 == 1 {
                effects[effects.len() / 2]
            } else {
                0.5 * (effects[effects.len() / 2 - 1] + effects[effects.len() / 2])
            };
            CovariateStability {
                covariate: x,
                name: data.names()[x].clone(),
                tier: data.tiers()[x],
                pi,
                pcer: bound,
                selected: bound <= config.pcer_threshold,
                median_effect,
            }
        })
        .collect();

    Ok(StabilityReport {
        per_covariate,
        per_run_ranks,
        q,
        n_runs: config.n_runs,
        failed_runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pc::Variant;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use rand::Rng as _;
    use rand::SeedableRng as _;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    proptest! {
        #[test]
        fn pcer_is_total_and_monotone(
            pi in 0.0f64..=1.0,
            q in 1usize..=50,
            extra in 0usize..=200,
        ) {
            let p = q + extra;
            let v = pcer(pi, q, p);
            prop_assert!(v > 0.0 || v.is_infinite());
            if pi <= 0.5 {
                prop_assert!(v.is_infinite());
            } else {
                // Decreasing in pi, increasing in q.
                prop_assert!(pcer(pi + 0.01, q, p) <= v + 1e-15);
                if q + 1 <= p {
                    prop_assert!(pcer(pi, q + 1, p) >= v);
                }
            }
        }
    }

    #[test]
    fn pcer_matches_direct_formula() {
        assert_abs_diff_eq!(pcer(1.0, 10, 100), 0.01, epsilon = 1e-15);
        assert_abs_diff_eq!(pcer(0.75, 5, 50), 0.02, epsilon = 1e-15);
        assert_eq!(pcer(0.5, 5, 50), f64::INFINITY);
        assert_eq!(pcer(0.0, 5, 50), f64::INFINITY);
        // Strictly decreasing in pi above 1/2, increasing in q.
        let mut last = f64::INFINITY;
        for pi in [0.51, 0.6, 0.7, 0.9, 1.0] {
            let v = pcer(pi, 3, 30);
            assert!(v < last);
            last = v;
        }
        assert!(pcer(0.8, 4, 30) > pcer(0.8, 3, 30));
    }

    fn selection_fixture() -> StabilityReport {
        let mk = |cov: usize, name: &str, pcer: f64, med: f64| CovariateStability {
            covariate: cov,
            name: name.into(),
            tier: 1,
            pi: 0.9,
            pcer,
            selected: pcer <= 0.005,
            median_effect: med,
        };
        StabilityReport {
            per_covariate: vec![
                mk(0, "a", 0.0049, 0.5),
                mk(1, "b", 0.0035, 0.7),
                mk(2, "c", 0.006, 0.9),
            ],
            per_run_ranks: vec![],
            q: 1,
            n_runs: 10,
            failed_runs: 0,
        }
    }

    #[test]
    fn select_filters_and_orders_by_pcer() {
        let report = selection_fixture();
        assert_eq!(select(&report, 0.005), vec![1, 0]);
        assert_eq!(select(&report, 1.0), vec![1, 0, 2]);
        // All-infinite PCERs select nothing.
        let mut none = report.clone();
        for c in &mut none.per_covariate {
            c.pcer = f64::INFINITY;
        }
        assert!(select(&none, 0.005).is_empty());
    }

    /// One strong cause of the outcome among noise covariates: its top-q
    /// frequency approaches one.
    fn strong_cause_dataset(n: usize, seed: u64) -> TieredDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = 5;
        let mut cols = vec![vec![0.0; n]; p + 1];
        for i in 0..n {
            for j in 0..p {
                cols[j][i] = rng.sample::<f64, _>(StandardNormal);
            }
            let eta = 2.5 * cols[0][i];
            cols[p][i] = if rng.gen_bool(1.0 / (1.0 + (-eta).exp())) {
                1.0
            } else {
                0.0
            };
        }
        let values = DMatrix::from_fn(n, p + 1, |i, j| cols[j][i]);
        TieredDataset::new(
            values,
            (0..p)
                .map(|j| format!("X{j}.v1"))
                .chain(std::iter::once("Y".into()))
                .collect(),
            vec![1, 1, 1, 1, 1, 0],
            Some(p),
        )
        .unwrap()
    }

    #[test]
    fn dominant_cause_reaches_high_frequency() {
        // COPC-stable: the outcome sits in the last tier, so covariate-
        // outcome edges are oriented into the outcome and the cause's
        // lower bound stays away from zero.
        let data = strong_cause_dataset(500, 8);
        let mut config = StabilityConfig::new(LearnConfig::new(0.05, Variant::CopcStable), 99);
        config.n_runs = 60;
        config.subsample_size = 60;
        config.q = Some(1);
        let report = cstar(&data, &config).unwrap();
        let x0 = &report.per_covariate[0];
        assert!(x0.pi > 0.8, "pi = {}", x0.pi);
        assert!(x0.pcer < 0.1);
        // Top-slot bookkeeping: sum of pi cannot exceed q.
        let total: f64 = report.per_covariate.iter().map(|c| c.pi).sum();
        assert!(total <= report.q as f64 + 1e-12);
    }

    #[test]
    fn pure_noise_covariates_spread_the_top_slot() {
        // No covariate has an effect: with q = 1 the top slot is shared,
        // so no frequency can approach the selectable regime.
        let n = 400;
        let p = 10;
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let mut cols = vec![vec![0.0; n]; p + 1];
        for i in 0..n {
            for j in 0..p {
                cols[j][i] = rng.sample::<f64, _>(StandardNormal);
            }
            cols[p][i] = if rng.gen_bool(0.5) { 1.0 } else { 0.0 };
        }
        let values = DMatrix::from_fn(n, p + 1, |i, j| cols[j][i]);
        let data = TieredDataset::new(
            values,
            (0..p)
                .map(|j| format!("X{j}.v1"))
                .chain(std::iter::once("Y".into()))
            .collect(),
            vec![1; p + 1],
            Some(p),
        )
        .unwrap();
        let mut config = StabilityConfig::new(LearnConfig::new(0.05, Variant::CopcStable), 17);
        config.n_runs = 100;
        config.subsample_size = 80;
        config.q = Some(1);
        let report = cstar(&data, &config).unwrap();
        let max_pi = report
            .per_covariate
            .iter()
            .map(|c| c.pi)
            .fold(0.0f64, f64::max);
        assert!(max_pi <= 3.0 / p as f64, "max pi = {max_pi}");
        assert!(select(&report, 0.005).is_empty());
    }

    #[test]
    fn single_run_frequencies_are_zero_or_one() {
        let data = strong_cause_dataset(200, 9);
        let mut config = StabilityConfig::new(LearnConfig::new(0.05, Variant::PcStable), 1);
        config.n_runs = 1;
        config.subsample_size = 80;
        config.q = Some(2);
        let report = cstar(&data, &config).unwrap();
        for c in &report.per_covariate {
            assert!(c.pi == 0.0 || c.pi == 1.0);
        }
    }

    #[test]
    fn identical_master_seed_reproduces_report() {
        let data = strong_cause_dataset(300, 10);
        let mut config = StabilityConfig::new(LearnConfig::new(0.05, Variant::CopcStable), 7);
        config.n_runs = 20;
        config.subsample_size = 50;
        let a = cstar(&data, &config).unwrap();
        let b = cstar(&data, &config).unwrap();
        assert_eq!(a.per_run_ranks, b.per_run_ranks);
        for (x, y) in a.per_covariate.iter().zip(&b.per_covariate) {
            assert_eq!(x.pi, y.pi);
            assert_eq!(x.median_effect, y.median_effect);
        }
    }

    #[test]
    fn no_outcome_is_an_error() {
        let values = DMatrix::from_fn(50, 2, |i, j| (i * 2 + j) as f64);
        let data = TieredDataset::new(
            values,
            vec!["A.v1".into(), "B.v1".into()],
            vec![1, 1],
            None,
        )
        .unwrap();
        let config = StabilityConfig::new(LearnConfig::new(0.05, Variant::Pc), 3);
        assert!(matches!(
            cstar(&data, &config),
            Err(StabilityError::NoOutcome)
        ));
    }
}
