//! Consistency of the learner: with d-separation on the true DAG as the
//! independence test, PC-stable reproduces the true pattern exactly and
//! COPC-stable reproduces the tier-informed pattern exactly.
//!
//! ```bash
//! cargo run --example dsep_oracle
//! ```

use copc::citest::DsepOracle;
use copc::graph::shd;
use copc::pc::{run_with_test, LearnConfig, Variant};
use copc::seeds::derive_seed;
use copc::sim::{generate_random_time_dag, SimScenario};

fn main() {
    let scenario = SimScenario {
        p_per_visit: 3,
        n_visits: 4,
        edge_prob: Some(0.25),
        ..Default::default()
    };
    let mut exact = (0usize, 0usize);
    let trials = 50;
    for k in 0..trials {
        let model = generate_random_time_dag(&scenario, derive_seed(1, k, 0)).unwrap();
        let oracle = DsepOracle::new(model.dag.graph());
        let vertices = model.dag.graph().vertices().to_vec();

        let pc = run_with_test(
            vertices.clone(),
            &oracle,
            &LearnConfig::new(0.02, Variant::PcStable),
            None,
        )
        .unwrap();
        if shd(&pc.graph, &model.cpdag).unwrap() == 0 {
            exact.0 += 1;
        }

        let copc = run_with_test(
            vertices,
            &oracle,
            &LearnConfig::new(0.02, Variant::CopcStable),
            None,
        )
        .unwrap();
        if shd(&copc.graph, &model.tiered_cpdag).unwrap() == 0 {
            exact.1 += 1;
        }
    }
    println!("pc-stable   recovered the true pattern on {}/{} models", exact.0, trials);
    println!("copc-stable recovered the tiered pattern on {}/{} models", exact.1, trials);
}
