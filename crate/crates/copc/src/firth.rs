//! Firth-penalized logistic regression.
//!
//! The penalty is the Jeffreys prior, `0.5 * ln det I(beta)`, which keeps
//! coefficients finite under separation and softens collinearity between
//! repeated measurements. Newton iterations use the modified score
//!
//! ```text
//! U*_r = sum_i x_ir * (y_i - pi_i + h_i * (1/2 - pi_i))
//! ```
//!
//! with `h` the diagonal of the hat matrix
//! `W^{1/2} X (X^T W X)^{-1} X^T W^{1/2}` and `W = diag(pi (1 - pi))`.
//! A plain maximum-likelihood Newton fitter is provided for comparison
//! runs; it diverges on separated data where the penalized fit does not.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::FirthError;

/// Stopping and stepping controls for the Newton loops.
#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    /// Convergence threshold on the largest score component.
    pub tol: f64,
    pub max_iter: usize,
    /// Step-halvings allowed per iteration before giving up on ascent.
    pub max_halvings: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            tol: 1e-8,
            max_iter: 50,
            max_halvings: 10,
        }
    }
}

/// A fitted logistic model (penalized or not).
#[derive(Debug, Clone)]
pub struct FirthFit {
    /// Intercept first, then one coefficient per design column.
    pub coefficients: DVector<f64>,
    pub std_errors: DVector<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub penalized_loglik: f64,
    /// Whether the ridge fallback was needed for a singular information.
    pub ridge_applied: bool,
    /// Objective value after each accepted step, starting at beta = 0.
    pub objective_trace: Vec<f64>,
}

fn logistic(eta: f64) -> f64 {
    1.0 / (1.0 + (-eta).exp())
}

fn validate(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<(), FirthError> {
    let (n, k) = (x.nrows(), x.ncols());
    if y.len() != n {
        return Err(FirthError::DimensionMismatch {
            rows: n,
            cols: k,
            y_len: y.len(),
        });
    }
    if n < k + 1 {
        return Err(FirthError::TooFewRows { needed: k + 1, got: n });
    }
    let mut any0 = false;
    let mut any1 = false;
    for &v in y.iter() {
        if v == 0.0 {
            any0 = true;
        } else if v == 1.0 {
            any1 = true;
        } else {
            return Err(FirthError::NotBinary(v));
        }
    }
    if !(any0 && any1) {
        return Err(FirthError::SingleClass);
    }
    Ok(())
}

struct IterationState {
    info_chol: Cholesky<f64, nalgebra::Dyn>,
    log_det_info: f64,
    pi: DVector<f64>,
    ridge_applied: bool,
}

/// Factor `X^T W X`, retrying once with a small ridge when singular.
fn information_state(
    x: &DMatrix<f64>,
    beta: &DVector<f64>,
    ridge_seen: &mut bool,
) -> Result<IterationState, FirthError> {
    let eta = x * beta;
    let pi = eta.map(logistic);
    let n = x.nrows();
    let k = x.ncols();
    let mut info = DMatrix::zeros(k, k);
    for i in 0..n {
        let w = pi[i] * (1.0 - pi[i]);
        let row = x.row(i);
        for a in 0..k {
            for b in a..k {
                info[(a, b)] += w * row[a] * row[b];
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            info[(a, b)] = info[(b, a)];
        }
    }
    let mut ridge_applied = false;
    let chol = match Cholesky::new(info.clone()) {
        Some(c) => c,
        None => {
            ridge_applied = true;
            *ridge_seen = true;
            let jittered = info + DMatrix::identity(k, k) * 1e-8;
            Cholesky::new(jittered).ok_or(FirthError::SingularInformation)?
        }
    };
    let log_det_info = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    Ok(IterationState {
        info_chol: chol,
        log_det_info,
        pi,
        ridge_applied,
    })
}

fn loglik(y: &DVector<f64>, pi: &DVector<f64>) -> f64 {
    let mut ll = 0.0;
    for i in 0..y.len() {
        // Clamp to dodge ln(0) when probabilities saturate.
        let p = pi[i].clamp(1e-300, 1.0 - 1e-16);
        ll += if y[i] == 1.0 { p.ln() } else { (1.0 - p).ln() };
    }
    ll
}

/// Penalized log-likelihood `l(beta) + 0.5 ln det I(beta)` at an arbitrary
/// point; `None` when the information is singular there.
pub fn penalized_loglik(x: &DMatrix<f64>, y: &DVector<f64>, beta: &DVector<f64>) -> Option<f64> {
    let mut ridge = false;
    let state = information_state(x, beta, &mut ridge).ok()?;
    if ridge {
        return None;
    }
    Some(loglik(y, &state.pi) + 0.5 * state.log_det_info)
}

/// Hat-matrix diagonal `h_i = w_i * x_i^T (X^T W X)^{-1} x_i`.
fn hat_diagonal(x: &DMatrix<f64>, pi: &DVector<f64>, chol: &Cholesky<f64, nalgebra::Dyn>) -> DVector<f64> {
    let n = x.nrows();
    let mut h = DVector::zeros(n);
    for i in 0..n {
        let xi = x.row(i).transpose();
        let solved = chol.solve(&xi);
        let w = pi[i] * (1.0 - pi[i]);
        h[i] = w * xi.dot(&solved);
    }
    h
}

/// Fit a Firth-penalized logistic regression of `y` on the design `x`
/// (which must already carry its intercept column).
pub fn fit_firth_logistic(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    opts: &FitOptions,
) -> Result<FirthFit, FirthError> {
    validate(x, y)?;
    let k = x.ncols();
    let mut beta = DVector::zeros(k);
    let mut ridge_seen = false;

    let mut state = information_state(x, &beta, &mut ridge_seen)?;
    let mut obj = loglik(y, &state.pi) + 0.5 * state.log_det_info;
    let mut trace = vec![obj];
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..opts.max_iter {
        let h = hat_diagonal(x, &state.pi, &state.info_chol);
        let mut residual = DVector::zeros(x.nrows());
        for i in 0..x.nrows() {
            residual[i] = y[i] - state.pi[i] + h[i] * (0.5 - state.pi[i]);
        }
        let score = x.transpose() * residual;
        if score.amax() < opts.tol {
            converged = true;
            break;
        }
        iterations += 1;
        let direction = state.info_chol.solve(&score);

        // Step-halve until the penalized objective does not decrease.
        // The slack scales with the objective so float noise on large
        // likelihood sums cannot stall the loop.
        let slack = 1e-10 * (1.0 + obj.abs());
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let candidate = &beta + &direction * step;
            match information_state(x, &candidate, &mut ridge_seen) {
                Ok(s) => {
                    let cand_obj = loglik(y, &s.pi) + 0.5 * s.log_det_info;
                    if cand_obj >= obj - slack {
                        accepted = Some((candidate, s, cand_obj));
                        break;
                    }
                }
                Err(_) => {}
            }
            step *= 0.5;
        }
        match accepted {
            Some((b, s, o)) => {
                beta = b;
                state = s;
                obj = o;
                trace.push(obj);
            }
            None => break, // no ascent direction left
        }
    }

    let cov = state.info_chol.inverse();
    let std_errors = DVector::from_fn(k, |r, _| cov[(r, r)].max(0.0).sqrt());
    Ok(FirthFit {
        coefficients: beta,
        std_errors,
        converged,
        iterations,
        penalized_loglik: obj,
        ridge_applied: ridge_seen || state.ridge_applied,
        objective_trace: trace,
    })
}

/// Plain Newton maximum-likelihood logistic fit. On separated data the
/// iterates drift to infinity; a tiny ridge keeps the loop alive so the
/// divergence is observable rather than a crash.
pub fn fit_logistic_mle(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    opts: &FitOptions,
) -> Result<FirthFit, FirthError> {
    validate(x, y)?;
    let k = x.ncols();
    let n = x.nrows();
    let mut beta: DVector<f64> = DVector::zeros(k);
    let mut converged = false;
    let mut iterations = 0;
    let mut ridge_seen = false;

    let mut obj = {
        let pi = (x * &beta).map(logistic);
        loglik(y, &pi)
    };
    for _ in 0..opts.max_iter {
        let pi = (x * &beta).map(logistic);
        let score = x.transpose() * (y - &pi);
        if score.amax() < opts.tol {
            converged = true;
            break;
        }
        iterations += 1;
        let mut info = DMatrix::zeros(k, k);
        for i in 0..n {
            let w = pi[i] * (1.0 - pi[i]);
            let row = x.row(i);
            for a in 0..k {
                for b in a..k {
                    info[(a, b)] += w * row[a] * row[b];
                }
            }
        }
        for a in 0..k {
            for b in 0..a {
                info[(a, b)] = info[(b, a)];
            }
        }
        let chol = match Cholesky::new(info.clone()) {
            Some(c) => c,
            None => {
                ridge_seen = true;
                match Cholesky::new(info + DMatrix::identity(k, k) * 1e-12) {
                    Some(c) => c,
                    None => break,
                }
            }
        };
        let direction = chol.solve(&score);
        let slack = 1e-10 * (1.0 + obj.abs());
        let mut step = 1.0;
        let mut took_step = false;
        for _ in 0..=opts.max_halvings {
            let candidate = &beta + &direction * step;
            let cand_obj = loglik(y, &(x * &candidate).map(logistic));
            if cand_obj >= obj - slack {
                beta = candidate;
                obj = cand_obj;
                took_step = true;
                break;
            }
            step *= 0.5;
        }
        if !took_step {
            break;
        }
    }

    let pi = (x * &beta).map(logistic);
    let mut info = DMatrix::<f64>::zeros(k, k);
    for i in 0..n {
        let w = pi[i] * (1.0 - pi[i]);
        let row = x.row(i);
        for a in 0..k {
            for b in a..k {
                info[(a, b)] += w * row[a] * row[b];
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            info[(a, b)] = info[(b, a)];
        }
    }
    let std_errors = match Cholesky::new(info) {
        Some(c) => {
            let cov = c.inverse();
            DVector::from_fn(k, |r, _| cov[(r, r)].max(0.0).sqrt())
        }
        None => DVector::from_element(k, f64::INFINITY),
    };
    Ok(FirthFit {
        coefficients: beta,
        std_errors,
        converged,
        iterations,
        penalized_loglik: obj,
        ridge_applied: ridge_seen,
        objective_trace: Vec::new(),
    })
}

/// A Firth fit on internally standardized covariates. Coefficients are
/// reported on the standardized scale so effect magnitudes are comparable
/// across biomarkers; `raw_coefficients` maps back to the input scale.
#[derive(Debug, Clone)]
pub struct StandardizedFit {
    pub fit: FirthFit,
    means: Vec<f64>,
    sds: Vec<f64>,
}

impl StandardizedFit {
    /// Coefficients on the original covariate scale (intercept first).
    pub fn raw_coefficients(&self) -> DVector<f64> {
        let std = &self.fit.coefficients;
        let k = self.means.len();
        let mut raw = DVector::zeros(k + 1);
        let mut intercept = std[0];
        for j in 0..k {
            let slope = std[j + 1] / self.sds[j];
            raw[j + 1] = slope;
            intercept -= slope * self.means[j];
        }
        raw[0] = intercept;
        raw
    }
}

/// Standardize each column of `covariates` to mean 0 / sd 1, prepend an
/// intercept, and fit the penalized model. Constant columns keep sd 1 so
/// the fit degrades to an intercept problem instead of dividing by zero.
pub fn fit_firth_standardized(
    covariates: &DMatrix<f64>,
    y: &DVector<f64>,
    opts: &FitOptions,
) -> Result<StandardizedFit, FirthError> {
    let (n, k) = (covariates.nrows(), covariates.ncols());
    let mut means = vec![0.0; k];
    let mut sds = vec![1.0; k];
    let mut x = DMatrix::from_element(n, k + 1, 1.0);
    for j in 0..k {
        let col = covariates.column(j);
        let mean = col.sum() / n as f64;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
        let sd = if var > 0.0 { var.sqrt() } else { 1.0 };
        means[j] = mean;
        sds[j] = sd;
        for i in 0..n {
            x[(i, j + 1)] = (covariates[(i, j)] - mean) / sd;
        }
    }
    let fit = fit_firth_logistic(&x, y, opts)?;
    Ok(StandardizedFit { fit, means, sds })
}
