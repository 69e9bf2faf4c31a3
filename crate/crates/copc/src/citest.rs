//! Gaussian conditional-independence testing: sample correlations, partial
//! correlations by submatrix inversion, and the Fisher z transform. A
//! d-separation oracle backend implements the same interface for
//! consistency checks against a known graph.

use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::DMatrix;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::data::TieredDataset;
use crate::error::CiError;
use crate::graph::Pdag;

/// Outcome of one conditional-independence test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CiTestResult {
    /// Partial correlation of the pair given the conditioning set.
    pub r: f64,
    /// `sqrt(n - |S| - 3) * |z(r)|`.
    pub statistic: f64,
    pub p_value: f64,
    /// `p_value > alpha` for the alpha the test was run at.
    pub independent: bool,
}

/// Sample Pearson correlation matrix over all dataset columns.
/// Errors on a constant column, naming it.
pub fn correlation_matrix(data: &TieredDataset) -> Result<DMatrix<f64>, CiError> {
    let values = data.values();
    let (n, p) = (values.nrows(), values.ncols());
    let mut means = vec![0.0; p];
    for j in 0..p {
        means[j] = values.column(j).sum() / n as f64;
    }
    let mut centered = values.clone();
    for j in 0..p {
        for i in 0..n {
            centered[(i, j)] -= means[j];
        }
    }
    let mut norms = vec![0.0; p];
    for j in 0..p {
        let ss: f64 = centered.column(j).iter().map(|v| v * v).sum();
        if ss <= 0.0 {
            return Err(CiError::ConstantColumn(data.names()[j].clone()));
        }
        norms[j] = ss.sqrt();
    }
    let mut corr = DMatrix::zeros(p, p);
    for a in 0..p {
        corr[(a, a)] = 1.0;
        for b in (a + 1)..p {
            let dot: f64 = centered
                .column(a)
                .iter()
                .zip(centered.column(b).iter())
                .map(|(x, y)| x * y)
                .sum();
            let r = (dot / (norms[a] * norms[b])).clamp(-1.0, 1.0);
            corr[(a, b)] = r;
            corr[(b, a)] = r;
        }
    }
    Ok(corr)
}

/// Partial correlation of columns `i`, `j` given `s`, from the inverse of
/// the `(s + {i, j})` submatrix: `r = -o_ij / sqrt(o_ii * o_jj)`.
/// An empty conditioning set returns the plain correlation.
pub fn partial_correlation(
    corr: &DMatrix<f64>,
    i: usize,
    j: usize,
    s: &[usize],
) -> Result<f64, CiError> {
    if i == j || s.contains(&i) || s.contains(&j) {
        return Err(CiError::BadIndices {
            i,
            j,
            s: s.to_vec(),
        });
    }
    if s.is_empty() {
        return Ok(corr[(i, j)]);
    }
    let mut idx = Vec::with_capacity(s.len() + 2);
    idx.push(i);
    idx.push(j);
    idx.extend_from_slice(s);
    let m = idx.len();
    let sub = DMatrix::from_fn(m, m, |a, b| corr[(idx[a], idx[b])]);
    let inv = sub.try_inverse().ok_or_else(|| CiError::SingularSubmatrix {
        i,
        j,
        s: s.to_vec(),
    })?;
    let denom = inv[(0, 0)] * inv[(1, 1)];
    if !(denom > 0.0) {
        return Err(CiError::SingularSubmatrix {
            i,
            j,
            s: s.to_vec(),
        });
    }
    Ok((-inv[(0, 1)] / denom.sqrt()).clamp(-1.0, 1.0))
}

/// Fisher z test of a (partial) correlation `r` at sample size `n` with
/// conditioning size `s`. `|r| >= 1` short-circuits to dependence with a
/// zero p-value; non-positive degrees of freedom are an error.
pub fn fisher_z_test(r: f64, n: usize, s: usize, alpha: f64) -> Result<CiTestResult, CiError> {
    if n <= s + 3 {
        return Err(CiError::DegreesOfFreedom { n, s });
    }
    if r.abs() >= 1.0 {
        return Ok(CiTestResult {
            r,
            statistic: f64::INFINITY,
            p_value: 0.0,
            independent: false,
        });
    }
    let df = (n - s - 3) as f64;
    let z = 0.5 * ((1.0 + r) / (1.0 - r)).ln();
    let statistic = df.sqrt() * z.abs();
    let p_value = 2.0 * (1.0 - standard_normal_cdf(statistic));
    Ok(CiTestResult {
        r,
        statistic,
        p_value,
        independent: p_value > alpha,
    })
}

pub(crate) fn standard_normal_cdf(x: f64) -> f64 {
    // statrs evaluates the normal CDF through erf to double precision.
    Normal::standard().cdf(x)
}

/// The conditional-independence interface the skeleton learner runs on.
pub trait CondIndepTest: Sync {
    /// Is `i` independent of `j` given `s`?
    fn independent(&self, i: usize, j: usize, s: &[usize]) -> Result<bool, CiError>;
}

/// Fisher z test over a precomputed correlation matrix. A singular
/// conditioning submatrix (exact collinearity) is treated as dependence
/// rather than an error, and the event is counted.
pub struct FisherZTest {
    corr: DMatrix<f64>,
    n: usize,
    alpha: f64,
    singular_events: AtomicUsize,
}

impl FisherZTest {
    pub fn new(data: &TieredDataset, alpha: f64) -> Result<Self, CiError> {
        Ok(FisherZTest {
            corr: correlation_matrix(data)?,
            n: data.n_rows(),
            alpha,
            singular_events: AtomicUsize::new(0),
        })
    }

    pub fn from_correlation(corr: DMatrix<f64>, n: usize, alpha: f64) -> Self {
        FisherZTest {
            corr,
            n,
            alpha,
            singular_events: AtomicUsize::new(0),
        }
    }

    pub fn singular_events(&self) -> usize {
        self.singular_events.load(Ordering::Relaxed)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl CondIndepTest for FisherZTest {
    fn independent(&self, i: usize, j: usize, s: &[usize]) -> Result<bool, CiError> {
        match partial_correlation(&self.corr, i, j, s) {
            Ok(r) => Ok(fisher_z_test(r, self.n, s.len(), self.alpha)?.independent),
            Err(CiError::SingularSubmatrix { .. }) => {
                // Collinearity: keep the edge (conservative dependence).
                self.singular_events.fetch_add(1, Ordering::Relaxed);
                Ok(false)
            }
            Err(e) => Err(e),
        }
    }
}

/// Oracle backend: reads independence straight off a known DAG.
pub struct DsepOracle<'a> {
    dag: &'a Pdag,
}

impl<'a> DsepOracle<'a> {
    pub fn new(dag: &'a Pdag) -> Self {
        DsepOracle { dag }
    }
}

impl CondIndepTest for DsepOracle<'_> {
    fn independent(&self, i: usize, j: usize, s: &[usize]) -> Result<bool, CiError> {
        Ok(self.dag.d_separated(i, j, s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn fisher_statistic_grows_with_n_and_respects_alpha(
            r in -0.95f64..=0.95,
            n in 10usize..=5000,
            s in 0usize..=5,
        ) {
            prop_assume!(n > s + 3);
            let res = fisher_z_test(r, n, s, 0.05).unwrap();
            prop_assert!(res.p_value >= 0.0 && res.p_value <= 1.0);
            prop_assert_eq!(res.independent, res.p_value > 0.05);
            if r != 0.0 {
                let bigger = fisher_z_test(r, n + 100, s, 0.05).unwrap();
                prop_assert!(bigger.statistic > res.statistic);
            }
        }
    }

    /// Recursive-formula oracle for partial correlations, kept independent
    /// of the inversion route.
    fn partial_correlation_recursive(corr: &DMatrix<f64>, i: usize, j: usize, s: &[usize]) -> f64 {
        if s.is_empty() {
            return corr[(i, j)];
        }
        let k = s[s.len() - 1];
        let rest = &s[..s.len() - 1];
        let rij = partial_correlation_recursive(corr, i, j, rest);
        let rik = partial_correlation_recursive(corr, i, k, rest);
        let rjk = partial_correlation_recursive(corr, j, k, rest);
        (rij - rik * rjk) / ((1.0 - rik * rik) * (1.0 - rjk * rjk)).sqrt()
    }

    fn toy_dataset(values: Vec<Vec<f64>>, names: &[&str]) -> TieredDataset {
        let n = values.len();
        let p = values[0].len();
        let flat: Vec<f64> = (0..p)
            .flat_map(|j| values.iter().map(move |row| row[j]))
            .collect();
        let matrix = nalgebra::DMatrix::from_vec(n, p, flat);
        TieredDataset::new(
            matrix,
            names.iter().map(|s| s.to_string()).collect(),
            vec![1; p],
            None,
        )
        .unwrap()
    }

    #[test]
    fn correlation_of_column_with_itself_is_one() {
        let d = toy_dataset(
            vec![
                vec![1.0, 2.0],
                vec![2.0, 1.0],
                vec![3.0, 5.0],
                vec![4.0, 2.0],
                vec![5.0, 7.0],
            ],
            &["a", "b"],
        );
        let c = correlation_matrix(&d).unwrap();
        assert_abs_diff_eq!(c[(0, 0)], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c[(1, 1)], 1.0, epsilon = 1e-12);
        assert!(c[(0, 1)].abs() <= 1.0);
        assert_abs_diff_eq!(c[(0, 1)], c[(1, 0)], epsilon = 1e-15);
    }

    #[test]
    fn constant_column_errors_with_its_name() {
        let d = toy_dataset(
            vec![vec![1.0, 7.0], vec![2.0, 7.0], vec![3.0, 7.0], vec![4.0, 7.0]],
            &["ok", "flat"],
        );
        match correlation_matrix(&d) {
            Err(CiError::ConstantColumn(name)) => assert_eq!(name, "flat"),
            other => panic!("expected constant-column error, got {other:?}"),
        }
    }

    #[test]
    fn independent_columns_have_small_correlation() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        use rand_distr::StandardNormal;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 10_000;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.sample(StandardNormal), rng.sample(StandardNormal)])
            .collect();
        let d = toy_dataset(rows, &["x", "y"]);
        let c = correlation_matrix(&d).unwrap();
        assert!(c[(0, 1)].abs() < 0.05, "r = {}", c[(0, 1)]);
    }

    #[test]
    fn empty_conditioning_set_returns_plain_correlation() {
        let mut corr = DMatrix::identity(3, 3);
        corr[(0, 1)] = 0.3;
        corr[(1, 0)] = 0.3;
        assert_eq!(partial_correlation(&corr, 0, 1, &[]).unwrap(), 0.3);
    }

    #[test]
    fn chain_population_matrix_gives_zero_partial_correlation() {
        // X -> Z -> Y with unit residuals: corr(X,Z) etc. computed from the
        // structural weights; conditioning on Z must null the X-Y link.
        let (bxz, bzy) = (0.8, 0.7);
        let var_x: f64 = 1.0;
        let var_z = bxz * bxz * var_x + 1.0;
        let var_y = bzy * bzy * var_z + 1.0;
        let cov_xz = bxz * var_x;
        let cov_zy = bzy * var_z;
        let cov_xy = bxz * bzy * var_x;
        let sd = [var_x.sqrt(), var_z.sqrt(), var_y.sqrt()];
        let cov = [
            [var_x, cov_xz, cov_xy],
            [cov_xz, var_z, cov_zy],
            [cov_xy, cov_zy, var_y],
        ];
        let corr = DMatrix::from_fn(3, 3, |a, b| cov[a][b] / (sd[a] * sd[b]));
        let r = partial_correlation(&corr, 0, 2, &[1]).unwrap();
        assert_abs_diff_eq!(r, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn inversion_matches_recursive_oracle() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            // Random SPD correlation matrix from A A^T.
            let a = DMatrix::from_fn(4, 4, |_, _| rng.gen_range(-1.0..1.0));
            let cov = &a * a.transpose() + DMatrix::<f64>::identity(4, 4) * 0.5;
            let sd: Vec<f64> = (0..4).map(|k| cov[(k, k)].sqrt()).collect();
            let corr = DMatrix::from_fn(4, 4, |x, y| cov[(x, y)] / (sd[x] * sd[y]));
            for (i, j, s) in [
                (0usize, 1usize, vec![2usize]),
                (0, 2, vec![1, 3]),
                (1, 3, vec![0, 2]),
                (2, 3, vec![0]),
            ] {
                let fast = partial_correlation(&corr, i, j, &s).unwrap();
                let slow = partial_correlation_recursive(&corr, i, j, &s);
                assert_abs_diff_eq!(fast, slow, epsilon = 1e-10);
            }
        }
    }

    /// On population correlation matrices of linear-Gaussian models with
    /// independent residuals, zero partial correlation coincides exactly
    /// with d-separation in the generating DAG.
    #[test]
    fn zero_partial_correlation_iff_d_separated() {
        use crate::seeds::derive_seed;
        use crate::sim::{generate_random_time_dag, population_covariance, SimScenario};
        use itertools::Itertools;

        let scenario = SimScenario {
            p_per_visit: 3,
            n_visits: 2,
            rho: 0.0, // independent residuals keep the model faithful
            edge_prob: Some(0.4),
            ..Default::default()
        };
        let p = scenario.n_covariates();
        for trial in 0..20u64 {
            let model = generate_random_time_dag(&scenario, derive_seed(3, trial, 0)).unwrap();
            let cov = population_covariance(&model, &scenario);
            let sd: Vec<f64> = (0..p).map(|k| cov[(k, k)].sqrt()).collect();
            let corr = DMatrix::from_fn(p, p, |a, b| cov[(a, b)] / (sd[a] * sd[b]));
            let dag = model.dag.graph();
            for i in 0..p {
                for j in (i + 1)..p {
                    let rest: Vec<usize> = (0..p).filter(|&v| v != i && v != j).collect();
                    for k in 0..=rest.len() {
                        for set in rest.iter().copied().combinations(k) {
                            let r = partial_correlation(&corr, i, j, &set).unwrap();
                            let dsep = dag.d_separated(i, j, &set);
                            assert_eq!(
                                r.abs() < 1e-8,
                                dsep,
                                "trial {trial}: pair ({i}, {j}) given {set:?}: r = {r}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn singular_submatrix_is_reported() {
        // Column 2 duplicates column 1 at the correlation level.
        let mut corr = DMatrix::identity(4, 4);
        for (a, b, r) in [(0, 1, 0.5), (0, 2, 0.5), (1, 2, 1.0), (0, 3, 0.2)] {
            corr[(a, b)] = r;
            corr[(b, a)] = r;
        }
        assert!(matches!(
            partial_correlation(&corr, 0, 3, &[1, 2]),
            Err(CiError::SingularSubmatrix { .. })
        ));
    }

    #[test]
    fn fisher_z_matches_closed_form() {
        // r = 0.5, n = 103, s = 0: statistic = 10 * atanh(0.5) = 5.493.
        let res = fisher_z_test(0.5, 103, 0, 0.05).unwrap();
        assert_abs_diff_eq!(res.statistic, 10.0 * 0.5_f64.atanh(), epsilon = 1e-12);
        assert_abs_diff_eq!(res.statistic, 5.493, epsilon = 1e-3);
        assert!(res.p_value < 1e-7);
        assert!(!res.independent);
    }

    #[test]
    fn zero_correlation_is_independent() {
        let res = fisher_z_test(0.0, 100, 2, 0.05).unwrap();
        assert_eq!(res.statistic, 0.0);
        assert_eq!(res.p_value, 1.0);
        assert!(res.independent);
    }

    #[test]
    fn unit_correlation_is_always_dependent() {
        for alpha in [0.001, 0.05, 0.99] {
            let res = fisher_z_test(1.0, 50, 0, alpha).unwrap();
            assert_eq!(res.p_value, 0.0);
            assert!(!res.independent);
        }
    }

    #[test]
    fn degrees_of_freedom_guard() {
        assert!(matches!(
            fisher_z_test(0.1, 5, 2, 0.05),
            Err(CiError::DegreesOfFreedom { .. })
        ));
    }

    #[test]
    fn statistic_increases_with_sample_size() {
        let mut last = 0.0;
        for n in [20, 50, 100, 1000, 10_000] {
            let res = fisher_z_test(0.3, n, 1, 0.05).unwrap();
            assert!(res.statistic > last);
            last = res.statistic;
        }
    }

    #[test]
    fn verdict_is_symmetric_in_the_pair() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = DMatrix::from_fn(5, 5, |_, _| rng.gen_range(-1.0..1.0));
        let cov = &a * a.transpose() + DMatrix::<f64>::identity(5, 5);
        let sd: Vec<f64> = (0..5).map(|k| cov[(k, k)].sqrt()).collect();
        let corr = DMatrix::from_fn(5, 5, |x, y| cov[(x, y)] / (sd[x] * sd[y]));
        let test = FisherZTest::from_correlation(corr, 200, 0.05);
        for (i, j, s) in [(0usize, 1usize, vec![2usize, 3]), (2, 4, vec![0]), (1, 3, vec![])] {
            assert_eq!(
                test.independent(i, j, &s).unwrap(),
                test.independent(j, i, &s).unwrap()
            );
        }
    }
}
