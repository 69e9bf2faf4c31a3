//! Desk-scale simulated comparison of PC-stable and COPC-stable: mean
//! sensitivity, specificity, and structural Hamming distance over
//! replicated random tiered models, with a paired test on the differences.
//!
//! ```bash
//! cargo run --release --example simulate_benchmark
//! ```

use copc::sim::{paired_t_greater, run_comparison, ComparisonOptions, SimScenario};

fn main() {
    let scenario = SimScenario {
        p_per_visit: 5,
        n_visits: 4,
        n_obs: 1000,
        rho: 0.6,
        edge_prob: Some(0.15),
        weight_min: 0.1,
        weight_max: 0.6,
        alpha: 0.02,
        n_replicates: 100,
        master_seed: 2024,
        ..Default::default()
    };
    println!(
        "{} covariates over {} visits, n = {}, alpha = {}, {} replicates\n",
        scenario.n_covariates(),
        scenario.n_visits,
        scenario.n_obs,
        scenario.alpha,
        scenario.n_replicates
    );

    let result = run_comparison(&scenario, &ComparisonOptions::default()).unwrap();
    println!(
        "{:<12} {:>18} {:>18} {:>12}",
        "variant", "sensitivity (sd)", "specificity (sd)", "SHD (sd)"
    );
    for s in &result.summaries {
        println!(
            "{:<12} {:>12.1}% ({:.1}) {:>12.1}% ({:.1}) {:>6.0} ({:.0})",
            s.variant,
            100.0 * s.sensitivity_mean,
            100.0 * s.sensitivity_sd,
            100.0 * s.specificity_mean,
            100.0 * s.specificity_sd,
            s.shd_mean,
            s.shd_sd
        );
    }

    let copc_sens: Vec<f64> = result.replicates.iter().map(|r| r.copc.sensitivity).collect();
    let pc_sens: Vec<f64> = result.replicates.iter().map(|r| r.pc.sensitivity).collect();
    let (t, p) = paired_t_greater(&copc_sens, &pc_sens);
    println!("\npaired test of sensitivity(copc) > sensitivity(pc): t = {t:.2}, p = {p:.2e}");

    let pc_shd: Vec<f64> = result.replicates.iter().map(|r| r.pc.shd as f64).collect();
    let copc_shd: Vec<f64> = result.replicates.iter().map(|r| r.copc.shd as f64).collect();
    let (t, p) = paired_t_greater(&pc_shd, &copc_shd);
    println!("paired test of shd(pc) > shd(copc):                 t = {t:.2}, p = {p:.2e}");
}
