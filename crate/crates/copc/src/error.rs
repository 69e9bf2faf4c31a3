//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by graph construction and structural algorithms.
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex ids must be unique and contiguous from 0 (position {position} holds id {id})")]
    BadVertexIds { position: usize, id: usize },
    #[error("duplicate vertex name `{0}`")]
    DuplicateVertexName(String),
    #[error("at most one vertex may be marked as the outcome")]
    MultipleOutcomes,
    #[error("outcome tier {outcome_tier} must be strictly greater than covariate tier {covariate_tier}")]
    OutcomeTierNotMaximal {
        outcome_tier: usize,
        covariate_tier: usize,
    },
    #[error("operation requires a fully directed graph but `{a}` - `{b}` is undirected")]
    NotFullyDirected { a: String, b: String },
    #[error("graphs have different vertex sets")]
    VertexSetMismatch,
    #[error("missing separation set for non-adjacent pair (`{a}`, `{b}`)")]
    MissingSepset { a: String, b: String },
    #[error("{undirected} undirected edges exceed the DAG-extension guard of {guard}")]
    ExtensionGuardExceeded { undirected: usize, guard: usize },
    #[error("graph admits no DAG extension")]
    NoExtension,
    #[error("cannot aggregate an empty list of graphs")]
    EmptyAggregate,
    #[error("aggregation threshold must lie in (0, 1], got {0}")]
    BadThreshold(f64),
    #[error("edge {from} -> {to} cannot be oriented: {reason}")]
    CannotOrient {
        from: String,
        to: String,
        reason: String,
    },
    #[error("malformed graph file: {0}")]
    BadGraphFile(String),
}

/// Errors raised by conditional-independence testing.
#[derive(Debug, Error)]
pub enum CiError {
    #[error("column `{0}` has zero variance; correlations are undefined")]
    ConstantColumn(String),
    #[error("conditioning submatrix for ({i}, {j}) given {s:?} is singular (collinearity)")]
    SingularSubmatrix { i: usize, j: usize, s: Vec<usize> },
    #[error("Fisher z test needs n - |S| - 3 > 0, got n = {n}, |S| = {s}")]
    DegreesOfFreedom { n: usize, s: usize },
    #[error("indices {i}, {j} with conditioning set {s:?} violate the test contract")]
    BadIndices { i: usize, j: usize, s: Vec<usize> },
}

/// Errors raised by the Firth / maximum-likelihood logistic fitters.
#[derive(Debug, Error)]
pub enum FirthError {
    #[error("outcome vector contains a single class; the model is not identifiable")]
    SingleClass,
    #[error("need at least k + 2 = {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("design and outcome dimensions disagree: X is {rows}x{cols}, y has {y_len} entries")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        y_len: usize,
    },
    #[error("Fisher information is singular even after ridge jitter")]
    SingularInformation,
    #[error("outcome vector must be coded 0/1, found {0}")]
    NotBinary(f64),
}

/// Errors raised while learning a CPDAG.
#[derive(Debug, Error)]
pub enum LearnError {
    #[error(transparent)]
    Ci(#[from] CiError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("chronologically ordered variants require a tier for every vertex")]
    MissingTiers,
    #[error("vertex order must be a permutation of 0..{expected}")]
    BadVertexOrder { expected: usize },
    #[error("dataset columns do not match the requested vertex set")]
    DataMismatch,
}

/// Errors raised by IDA effect estimation.
#[derive(Debug, Error)]
pub enum IdaError {
    #[error("vertex {0} is not a covariate of the graph")]
    NotACovariate(usize),
    #[error("every parent-set regression failed for covariate `{0}`")]
    AllFitsFailed(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Errors raised by stability selection.
#[derive(Debug, Error)]
pub enum StabilityError {
    #[error("subsample size {size} must lie in 1..={n}")]
    BadSubsampleSize { size: usize, n: usize },
    #[error("top-list size q = {q} must lie in 1..={p}")]
    BadTopListSize { q: usize, p: usize },
    #[error("{failed} of {total} subsample runs failed (more than 10%)")]
    TooManyFailedRuns { failed: usize, total: usize },
    #[error("dataset has no outcome column; stability selection needs one")]
    NoOutcome,
    #[error(transparent)]
    Learn(#[from] LearnError),
}

/// Errors raised by the simulation harness.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("assembled residual covariance is not positive definite (rho = {rho})")]
    NotPositiveDefinite { rho: f64 },
    #[error("scenario field {field} = {value} is out of range")]
    BadScenario { field: &'static str, value: f64 },
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Firth(#[from] FirthError),
    #[error(transparent)]
    Ida(#[from] IdaError),
}

/// Errors raised during dataset ingestion and emission.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("unparseable cell at row {row}, column `{column}`: `{value}`")]
    BadCell {
        row: usize,
        column: String,
        value: String,
    },
    #[error("missing cell at row {row}, column `{column}` (pass --impute mean to mean-impute)")]
    MissingCell { row: usize, column: String },
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("column `{0}` has no `.v<K>` suffix and no tier-map entry")]
    MissingTier(String),
    #[error("outcome column `{column}` is not binary 0/1 (row {row} holds {value})")]
    OutcomeNotBinary {
        column: String,
        row: usize,
        value: f64,
    },
    #[error("outcome column `{0}` not found")]
    OutcomeNotFound(String),
    #[error("dataset has no rows")]
    Empty,
    #[error("tier map line {line} is not `column = tier`: `{text}`")]
    BadTierMapLine { line: usize, text: String },
}
