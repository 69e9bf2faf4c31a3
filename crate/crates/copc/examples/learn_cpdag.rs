//! Learn a CPDAG from simulated tiered data with COPC-stable and print it
//! as DOT.
//!
//! ```bash
//! cargo run --example learn_cpdag
//! ```

use copc::graph::{count_edge_kinds, pdag_to_dot};
use copc::pc::{run, LearnConfig, Variant};
use copc::sim::{generate_ar_data, generate_random_time_dag, SimScenario};

fn main() {
    // Three biomarkers measured at three visits plus a binary outcome,
    // with collinear repeats (rho = 0.6).
    let scenario = SimScenario {
        p_per_visit: 3,
        n_visits: 3,
        n_obs: 800,
        rho: 0.6,
        edge_prob: Some(0.25),
        master_seed: 7,
        ..Default::default()
    };
    let model = generate_random_time_dag(&scenario, 7).expect("valid scenario");
    let data = generate_ar_data(&model, &scenario, 8).expect("simulated data");

    let config = LearnConfig::new(0.02, Variant::CopcStable);
    let result = run(&data, &config).expect("learning succeeds");

    let counts = count_edge_kinds(&result.graph);
    println!(
        "learned {} edges: {} directed, {} undirected, {} non-chronological",
        counts.total, counts.directed, counts.undirected, counts.non_chronological
    );
    println!(
        "{} CI tests up to conditioning size {}, {} orientation conflicts\n",
        result.diagnostics.ci_tests,
        result.diagnostics.max_level_reached,
        result.diagnostics.conflicts
    );
    println!("{}", pdag_to_dot(&result.graph));
}
