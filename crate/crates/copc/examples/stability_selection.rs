//! Stability selection (CStaR): rerun the learn + IDA pipeline over many
//! subsamples, rank covariates by their top-q frequency, and bound the
//! per-comparison error rate of each selection.
//!
//! ```bash
//! cargo run --example stability_selection
//! ```

use copc::pc::{LearnConfig, Variant};
use copc::sim::{generate_ar_data, generate_random_time_dag, SimScenario};
use copc::stability::{cstar, select, StabilityConfig};

fn main() {
    let scenario = SimScenario {
        p_per_visit: 3,
        n_visits: 3,
        n_obs: 400,
        rho: 0.5,
        edge_prob: Some(0.3),
        weight_min: 0.5,
        weight_max: 1.0,
        master_seed: 5,
        ..Default::default()
    };
    let model = generate_random_time_dag(&scenario, 5).unwrap();
    let data = generate_ar_data(&model, &scenario, 6).unwrap();

    let mut config = StabilityConfig::new(LearnConfig::new(0.05, Variant::CopcStable), 99);
    config.n_runs = 100;
    config.subsample_size = 60;
    config.q = Some(2);
    config.pcer_threshold = 0.08;

    let report = cstar(&data, &config).unwrap();
    println!(
        "{} runs of size {}, q = {}, {} failed\n",
        report.n_runs, config.subsample_size, report.q, report.failed_runs
    );
    println!(
        "{:<10} {:>6} {:>10} {:>9} {:>14}",
        "covariate", "pi", "pcer", "selected", "median effect"
    );
    let mut rows = report.per_covariate.clone();
    rows.sort_by(|a, b| b.pi.partial_cmp(&a.pi).unwrap().then_with(|| a.name.cmp(&b.name)));
    for c in &rows {
        println!(
            "{:<10} {:>6.2} {:>10.4} {:>9} {:>14.3}",
            c.name, c.pi, c.pcer, c.selected, c.median_effect
        );
    }

    let chosen = select(&report, config.pcer_threshold);
    println!(
        "\nselected at PCER <= {}: {}",
        config.pcer_threshold,
        chosen
            .iter()
            .map(|&x| data.names()[x].as_str())
            .collect::<Vec<_>>()
            .join(", ")
    );
    println!(
        "true parents of the outcome: {}",
        model
            .dag
            .graph()
            .parents(model.outcome)
            .iter()
            .map(|&v| data.names()[v].as_str())
            .collect::<Vec<_>>()
            .join(", ")
    );
}
