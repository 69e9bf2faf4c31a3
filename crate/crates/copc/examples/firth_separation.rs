//! Complete separation: the plain maximum-likelihood logistic fit drifts
//! to infinity while the Firth-penalized fit converges to finite
//! coefficients. For a saturated binary design the penalized optimum
//! equals adding one half to each cell of the 2x2 table.
//!
//! ```bash
//! cargo run --example firth_separation
//! ```

use copc::firth::{fit_firth_logistic, fit_logistic_mle, FitOptions};
use nalgebra::{DMatrix, DVector};

fn main() {
    // Eight observations: y = 1 exactly when x = 1.
    let mut x = DMatrix::from_element(8, 2, 1.0);
    let mut y = DVector::zeros(8);
    for i in 0..4 {
        x[(i, 1)] = 1.0;
        y[i] = 1.0;
    }
    for i in 4..8 {
        x[(i, 1)] = 0.0;
    }

    let mle = fit_logistic_mle(
        &x,
        &y,
        &FitOptions {
            max_iter: 200,
            ..Default::default()
        },
    )
    .unwrap();
    println!(
        "maximum likelihood after {} iterations: intercept = {:.2}, slope = {:.2}",
        mle.iterations, mle.coefficients[0], mle.coefficients[1]
    );
    println!("  (the iterates escape toward infinity; the score only vanishes because the probabilities saturate)");

    let firth = fit_firth_logistic(&x, &y, &FitOptions::default()).unwrap();
    println!(
        "Firth-penalized after {} iterations:  intercept = {:.4}, slope = {:.4} (converged = {})",
        firth.iterations, firth.coefficients[0], firth.coefficients[1], firth.converged
    );
    println!(
        "half-cell reference values:            intercept = {:.4}, slope = {:.4}",
        (1.0f64 / 9.0).ln(),
        81.0f64.ln()
    );
    println!(
        "standard errors: intercept {:.3}, slope {:.3}",
        firth.std_errors[0], firth.std_errors[1]
    );
}
