//! Dataset ingestion: the `NAME.vK` header convention, tier-map
//! overrides, the outcome column, and mean imputation of missing cells.
//!
//! ```bash
//! cargo run --example ingest_csv
//! ```

use copc::data::{ingest_csv, Impute, TierSpec};

fn main() {
    let dir = std::env::temp_dir().join("copc-ingest-example");
    std::fs::create_dir_all(&dir).unwrap();

    // `crp` has no .vK suffix, so the tier map must place it.
    let csv = dir.join("biomarkers.csv");
    std::fs::write(
        &csv,
        "BM1.v1,BM1.v2,crp,tox\n\
         0.41,0.52,1.2,0\n\
         -0.13,NA,0.9,1\n\
         0.77,0.68,1.5,0\n\
         -0.51,-0.43,0.7,1\n\
         0.02,0.11,1.1,0\n",
    )
    .unwrap();

    let mut tiers = TierSpec::default();
    tiers.insert("crp", 1);

    let report = ingest_csv(&csv, Some(&tiers), Some("tox"), Impute::Mean).unwrap();
    let data = &report.dataset;

    println!(
        "{} rows x {} columns, outcome = column {}",
        data.n_rows(),
        data.n_cols(),
        data.outcome().unwrap()
    );
    for v in data.vertices() {
        println!(
            "  {:<8} tier {} {}",
            v.name,
            v.tier,
            if v.is_outcome { "(outcome)" } else { "" }
        );
    }
    println!("\n{} cell(s) imputed", report.imputed_cells);
    for w in &report.warnings {
        println!("warning: {w}");
    }
    println!("\ncontent digest: {}", data.content_digest());

    // Without imputation the same file is rejected, naming the cell.
    match ingest_csv(&csv, Some(&tiers), Some("tox"), Impute::Reject) {
        Err(e) => println!("strict mode: {e}"),
        Ok(_) => unreachable!("missing cell must be rejected"),
    }
}
