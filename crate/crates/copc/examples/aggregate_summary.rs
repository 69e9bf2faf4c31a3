//! Aggregate the CPDAGs learned on many subsamples into one summary graph
//! where only edges present in at least 20% of the runs are kept and each
//! edge carries its frequency.
//!
//! ```bash
//! cargo run --example aggregate_summary
//! ```

use copc::graph::{aggregate_cpdags, summary_to_dot};
use copc::pc::{run, LearnConfig, Variant};
use copc::seeds::derive_seed;
use copc::sim::{generate_ar_data, generate_random_time_dag, SimScenario};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn main() {
    let scenario = SimScenario {
        p_per_visit: 2,
        n_visits: 3,
        n_obs: 300,
        rho: 0.5,
        edge_prob: Some(0.3),
        weight_min: 0.4,
        master_seed: 3,
        ..Default::default()
    };
    let model = generate_random_time_dag(&scenario, 3).unwrap();
    let data = generate_ar_data(&model, &scenario, 4).unwrap();

    // Learn a CPDAG on each of 50 subsamples of 120 rows.
    let config = LearnConfig::new(0.05, Variant::CopcStable);
    let mut graphs = Vec::new();
    for k in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(17, k, 0));
        let mut rows = rand::seq::index::sample(&mut rng, data.n_rows(), 120).into_vec();
        rows.sort_unstable();
        let sub = data.subsample(&rows);
        match run(&sub, &config) {
            Ok(result) => graphs.push(result.graph),
            Err(_) => continue,
        }
    }

    let summary = aggregate_cpdags(&graphs, 0.2).unwrap();
    println!(
        "aggregated {} runs; {} edges kept at frequency >= {}\n",
        summary.n_graphs,
        summary.edges.len(),
        summary.threshold
    );
    for e in &summary.edges {
        println!(
            "{:<8} ~ {:<8} frequency {:.2} ({} ->, {} <-, {} undirected)",
            summary.vertices[e.a].name,
            summary.vertices[e.b].name,
            e.frequency(summary.n_graphs),
            e.n_ab,
            e.n_ba,
            e.n_undirected
        );
    }
    println!("\n{}", summary_to_dot(&summary));
}
