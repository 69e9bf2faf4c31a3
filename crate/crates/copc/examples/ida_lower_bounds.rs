//! Estimate lower bounds of covariate effects on the outcome with local
//! IDA: one Firth regression per locally valid parent set, the minimum
//! absolute coefficient as the bound, the multiset size as the ambiguity.
//!
//! ```bash
//! cargo run --example ida_lower_bounds
//! ```

use copc::firth::FitOptions;
use copc::ida::{ida_multiset, lower_bound, rank_covariates};
use copc::pc::{run, LearnConfig, Variant};
use copc::sim::{generate_ar_data, generate_random_time_dag, SimScenario};

fn main() {
    let scenario = SimScenario {
        p_per_visit: 3,
        n_visits: 3,
        n_obs: 600,
        rho: 0.5,
        edge_prob: Some(0.3),
        master_seed: 23,
        ..Default::default()
    };
    let model = generate_random_time_dag(&scenario, 23).unwrap();
    let data = generate_ar_data(&model, &scenario, 24).unwrap();
    let outcome = data.outcome().unwrap();

    let result = run(&data, &LearnConfig::new(0.02, Variant::CopcStable)).unwrap();

    let opts = FitOptions::default();
    let mut summaries = Vec::new();
    for x in data.covariate_indices() {
        let multiset = ida_multiset(&data, &result.graph, x, outcome, &opts).unwrap();
        let summary = lower_bound(&multiset);
        summaries.push(summary);
    }
    let ranked = rank_covariates(summaries, result.graph.vertices());

    let true_parents = model.dag.graph().parents(outcome);
    println!(
        "true parents of the outcome: {}\n",
        true_parents
            .iter()
            .map(|&v| model.dag.graph().vertex(v).name.as_str())
            .collect::<Vec<_>>()
            .join(", ")
    );
    println!(
        "{:<8} {:>11} {:>9} {:>13}",
        "rank", "covariate", "ambiguity", "lower bound"
    );
    for (rank, s) in ranked.iter().enumerate() {
        println!(
            "{:<8} {:>11} {:>9} {:>13.4}",
            rank + 1,
            data.names()[s.covariate],
            s.ambiguity,
            s.lower_bound
        );
    }
}
