//! Tiered datasets: an n x p matrix of Gaussian measurements with a visit
//! (tier) per column and optionally one binary outcome column.
//!
//! CSV ingestion maps `NAME.vK` headers to biomarker NAME at tier K; a
//! tier-map sidecar file overrides the convention for non-conforming
//! headers. Missing cells are rejected unless mean imputation is requested.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use sha2::{Digest, Sha256};

use crate::error::DataError;
use crate::graph::Vertex;

/// Missing-cell policy during ingestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Impute {
    #[default]
    Reject,
    Mean,
}

/// Explicit column -> tier assignments, overriding the `.vK` convention.
#[derive(Debug, Clone, Default)]
pub struct TierSpec {
    map: BTreeMap<String, usize>,
}

impl TierSpec {
    /// Parse a flat `column = tier` file, one entry per line. Blank lines
    /// and `#` comments are skipped.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, DataError> {
        let text = std::fs::read_to_string(path)?;
        let mut map = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || DataError::BadTierMapLine {
                line: lineno + 1,
                text: line.to_string(),
            };
            let (name, tier) = line.split_once('=').ok_or_else(bad)?;
            let tier: usize = tier.trim().parse().map_err(|_| bad())?;
            map.insert(name.trim().to_string(), tier);
        }
        Ok(TierSpec { map })
    }

    pub fn insert(&mut self, column: impl Into<String>, tier: usize) {
        self.map.insert(column.into(), tier);
    }

    pub fn get(&self, column: &str) -> Option<usize> {
        self.map.get(column).copied()
    }
}

/// Parse the `NAME.vK` tier suffix convention.
fn tier_from_name(name: &str) -> Option<usize> {
    let (_, suffix) = name.rsplit_once(".v")?;
    if suffix.is_empty() || !suffix.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    suffix.parse().ok()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TieredDataset {
    values: DMatrix<f64>,
    names: Vec<String>,
    tiers: Vec<usize>,
    outcome: Option<usize>,
}

impl TieredDataset {
    /// Assemble a dataset from parts. The outcome column must be coded 0/1
    /// and its tier is normalized to one past the maximum covariate tier.
    pub fn new(
        values: DMatrix<f64>,
        names: Vec<String>,
        mut tiers: Vec<usize>,
        outcome: Option<usize>,
    ) -> Result<Self, DataError> {
        assert_eq!(values.ncols(), names.len());
        assert_eq!(values.ncols(), tiers.len());
        if values.nrows() == 0 {
            return Err(DataError::Empty);
        }
        let mut seen = names.clone();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(DataError::DuplicateColumn(w[0].clone()));
        }
        if let Some(y) = outcome {
            for (row, v) in values.column(y).iter().enumerate() {
                if *v != 0.0 && *v != 1.0 {
                    return Err(DataError::OutcomeNotBinary {
                        column: names[y].clone(),
                        row: row + 1,
                        value: *v,
                    });
                }
            }
            let max_cov_tier = tiers
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != y)
                .map(|(_, t)| *t)
                .max()
                .unwrap_or(0);
            tiers[y] = max_cov_tier + 1;
        }
        Ok(TieredDataset {
            values,
            names,
            tiers,
            outcome,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn tiers(&self) -> &[usize] {
        &self.tiers
    }

    pub fn outcome(&self) -> Option<usize> {
        self.outcome
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.column(j).iter().copied().collect()
    }

    /// Column indices of the covariates (everything but the outcome).
    pub fn covariate_indices(&self) -> Vec<usize> {
        (0..self.n_cols())
            .filter(|&j| Some(j) != self.outcome)
            .collect()
    }

    /// The vertex set this dataset induces, in column order.
    pub fn vertices(&self) -> Vec<Vertex> {
        self.names
            .iter()
            .enumerate()
            .map(|(j, name)| {
                if Some(j) == self.outcome {
                    Vertex::outcome(j, name.clone(), self.tiers[j])
                } else {
                    Vertex::new(j, name.clone(), self.tiers[j])
                }
            })
            .collect()
    }

    /// Row subset (without replacement) as a new dataset. Indices are
    /// taken in the order given.
    pub fn subsample(&self, rows: &[usize]) -> TieredDataset {
        let values = DMatrix::from_fn(rows.len(), self.n_cols(), |i, j| {
            self.values[(rows[i], j)]
        });
        TieredDataset {
            values,
            names: self.names.clone(),
            tiers: self.tiers.clone(),
            outcome: self.outcome,
        }
    }

    /// Canonical CSV encoding: header row, then one row per observation
    /// with round-trip float formatting.
    pub fn to_csv_string(&self) -> String {
        let mut out = self.names.join(",");
        out.push('\n');
        for i in 0..self.n_rows() {
            let row: Vec<String> = (0..self.n_cols())
                .map(|j| format!("{}", self.values[(i, j)]))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<(), DataError> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    /// SHA-256 of the canonical CSV encoding, hex-encoded.
    pub fn content_digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.to_csv_string().as_bytes());
        hex::encode(hasher.finalize())
    }
}

/// Result of an ingestion: the dataset plus any imputation warnings.
#[derive(Debug)]
pub struct IngestReport {
    pub dataset: TieredDataset,
    pub warnings: Vec<String>,
    pub imputed_cells: usize,
}

fn is_missing(cell: &str) -> bool {
    let t = cell.trim();
    t.is_empty() || t.eq_ignore_ascii_case("na") || t.eq_ignore_ascii_case("nan")
}

/// Read a CSV file with a header row into a tiered dataset.
///
/// Tier resolution per column: tier-map entry first, then the `NAME.vK`
/// suffix. The outcome column (named via `outcome`) needs no tier. Missing
/// cells are an error under [`Impute::Reject`] and are replaced by the
/// column mean under [`Impute::Mean`] with a warning per column.
pub fn ingest_csv(
    path: impl AsRef<Path>,
    tier_spec: Option<&TierSpec>,
    outcome: Option<&str>,
    impute: Impute,
) -> Result<IngestReport, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path.as_ref())?;

    let headers: Vec<String> = reader.headers()?.iter().map(|h| h.to_string()).collect();
    let p = headers.len();
    let mut seen = headers.clone();
    seen.sort_unstable();
    if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
        return Err(DataError::DuplicateColumn(w[0].clone()));
    }

    let outcome_idx = match outcome {
        Some(name) => Some(
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| DataError::OutcomeNotFound(name.to_string()))?,
        ),
        None => None,
    };

    let mut tiers = Vec::with_capacity(p);
    for (j, name) in headers.iter().enumerate() {
        let spec_tier = tier_spec.and_then(|t| t.get(name));
        let tier = match (spec_tier, tier_from_name(name)) {
            (Some(t), _) => t, // explicit map wins over the suffix
            (None, Some(t)) => t,
            (None, None) => {
                if Some(j) == outcome_idx {
                    0 // normalized later
                } else {
                    return Err(DataError::MissingTier(name.clone()));
                }
            }
        };
        tiers.push(tier);
    }

    // Cells parse to Some(value) or None for missing.
    let mut cells: Vec<Vec<Option<f64>>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let mut row = Vec::with_capacity(p);
        for (j, cell) in record.iter().enumerate() {
            if is_missing(cell) {
                row.push(None);
            } else {
                let v: f64 = cell.parse().map_err(|_| DataError::BadCell {
                    row: i + 1,
                    column: headers[j].clone(),
                    value: cell.to_string(),
                })?;
                row.push(Some(v));
            }
        }
        cells.push(row);
    }
    if cells.is_empty() {
        return Err(DataError::Empty);
    }

    let n = cells.len();
    let mut warnings = Vec::new();
    let mut imputed_cells = 0;
    let mut values = DMatrix::zeros(n, p);
    for j in 0..p {
        let missing: Vec<usize> = (0..n).filter(|&i| cells[i][j].is_none()).collect();
        if !missing.is_empty() {
            match impute {
                Impute::Reject => {
                    return Err(DataError::MissingCell {
                        row: missing[0] + 1,
                        column: headers[j].clone(),
                    });
                }
                Impute::Mean => {
                    let present: Vec<f64> = (0..n).filter_map(|i| cells[i][j]).collect();
                    if present.is_empty() {
                        return Err(DataError::MissingCell {
                            row: 1,
                            column: headers[j].clone(),
                        });
                    }
                    let mean = present.iter().sum::<f64>() / present.len() as f64;
                    for &i in &missing {
                        cells[i][j] = Some(mean);
                    }
                    imputed_cells += missing.len();
                    warnings.push(format!(
                        "column `{}`: {} missing cell(s) mean-imputed with {}",
                        headers[j],
                        missing.len(),
                        mean
                    ));
                }
            }
        }
        for i in 0..n {
            values[(i, j)] = cells[i][j].unwrap();
        }
    }

    let dataset = TieredDataset::new(values, headers, tiers, outcome_idx)?;
    Ok(IngestReport {
        dataset,
        warnings,
        imputed_cells,
    })
}
