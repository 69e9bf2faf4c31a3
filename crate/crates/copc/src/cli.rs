//! Command-line entry points: `learn`, `ida`, `cstar`, `simulate`, and
//! `aggregate`. Each command writes its artifacts plus a JSON manifest
//! into the output directory and exits 0 on success, 2 on an input error,
//! and 3 on a numerical failure.
//!
//! Flag precedence is command line > config file > built-in defaults; the
//! config file is flat `key = value` text using the long flag names.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::RngCore;

use crate::data::{ingest_csv, Impute, IngestReport, TierSpec};
use crate::error::{
    CiError, DataError, FirthError, IdaError, LearnError, SimError, StabilityError,
};
use crate::firth::FitOptions;
use crate::graph::{
    aggregate_cpdags, count_edge_kinds, pdag_from_json, pdag_to_dot, pdag_to_json,
    summary_to_dot, MeekConfig, ShdMode,
};
use crate::ida::{ida_multiset, lower_bound, rank_covariates};
use crate::manifest::RunManifest;
use crate::pc::{run, LearnConfig, Variant};
use crate::sim::{run_comparison, ComparisonOptions, SimScenario};
use crate::stability::{cstar, select, StabilityConfig};

/// Error carrying the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unusable inputs or flags: exit code 2.
    Input(String),
    /// A numerical routine failed: exit code 3.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<LearnError> for CliError {
    fn from(e: LearnError) -> Self {
        match &e {
            LearnError::Ci(CiError::ConstantColumn(_)) => CliError::Input(e.to_string()),
            LearnError::Ci(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<FirthError> for CliError {
    fn from(e: FirthError) -> Self {
        match &e {
            FirthError::SingleClass | FirthError::NotBinary(_) => CliError::Input(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<IdaError> for CliError {
    fn from(e: IdaError) -> Self {
        match &e {
            IdaError::NotACovariate(_) => CliError::Input(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<StabilityError> for CliError {
    fn from(e: StabilityError) -> Self {
        match &e {
            StabilityError::TooManyFailedRuns { .. } => CliError::Numerical(e.to_string()),
            StabilityError::Learn(LearnError::Ci(CiError::ConstantColumn(_))) => {
                CliError::Input(e.to_string())
            }
            StabilityError::Learn(LearnError::Ci(_)) => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match &e {
            SimError::BadScenario { .. } => CliError::Input(e.to_string()),
            SimError::NotPositiveDefinite { .. } => CliError::Input(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<crate::error::GraphError> for CliError {
    fn from(e: crate::error::GraphError) -> Self {
        CliError::Input(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "copc",
    version,
    about = "Causal structure learning over repeated measurements: PC / COPC, IDA effect bounds, stability selection"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a CPDAG from a CSV dataset and emit it as DOT + JSON.
    Learn(LearnArgs),
    /// Rank covariate effects on the outcome via local IDA.
    Ida(IdaArgs),
    /// Stability selection over subsample runs with a PCER bound.
    Cstar(CstarArgs),
    /// Simulated comparison of PC-stable and COPC-stable.
    Simulate(SimulateArgs),
    /// Aggregate a directory of CPDAG JSON files into a summary graph.
    Aggregate(AggregateArgs),
}

/// Flat `key = value` config file; keys use the long flag names.
struct ConfigFile(BTreeMap<String, String>);

impl ConfigFile {
    fn load(path: Option<&PathBuf>) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("cannot read config {path:?}: {e}")))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    CliError::Input(format!(
                        "config line {} is not `key = value`: `{line}`",
                        lineno + 1
                    ))
                })?;
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        Ok(ConfigFile(map))
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                CliError::Input(format!("config key `{key}` has unusable value `{raw}`"))
            }),
        }
    }
}

/// Resolve an optional CLI flag against the config file and a default.
fn resolve<T: std::str::FromStr + Clone>(
    cli: &Option<T>,
    config: &ConfigFile,
    key: &str,
    default: T,
) -> Result<T, CliError> {
    if let Some(v) = cli {
        return Ok(v.clone());
    }
    Ok(config.get::<T>(key)?.unwrap_or(default))
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Input CSV with a header row; `NAME.vK` columns map to tier K.
    data: PathBuf,
    /// Name of the binary outcome column.
    #[arg(long)]
    outcome: Option<String>,
    /// Tier-map sidecar file (`column = tier` lines) overriding the
    /// `NAME.vK` convention.
    #[arg(long)]
    tier_map: Option<PathBuf>,
    /// Missing-cell policy: `reject` (default) or `mean`.
    #[arg(long)]
    impute: Option<String>,
}

impl DataArgs {
    fn ingest(&self, config: &ConfigFile) -> Result<IngestReport, CliError> {
        let impute = match resolve(&self.impute, config, "impute", "reject".to_string())?.as_str()
        {
            "reject" => Impute::Reject,
            "mean" => Impute::Mean,
            other => {
                return Err(CliError::Input(format!(
                    "unknown --impute policy `{other}` (expected reject or mean)"
                )))
            }
        };
        let tier_spec = match &self.tier_map {
            Some(path) => Some(TierSpec::from_file(path)?),
            None => None,
        };
        let outcome = match &self.outcome {
            Some(o) => Some(o.clone()),
            None => config.get::<String>("outcome")?,
        };
        let report = ingest_csv(&self.data, tier_spec.as_ref(), outcome.as_deref(), impute)?;
        Ok(report)
    }
}

#[derive(Args, Clone)]
struct LearnFlags {
    /// Significance level for the conditional-independence tests.
    #[arg(long)]
    alpha: Option<f64>,
    /// Learner variant: pc, pc-stable, copc, copc-stable.
    #[arg(long)]
    variant: Option<Variant>,
    /// Cap on the conditioning-set size.
    #[arg(long)]
    max_cond: Option<usize>,
    /// Disable orientation rule 4 (kept on by default because the
    /// chronological pre-orientation is background knowledge).
    #[arg(long)]
    no_rule4: bool,
    /// Only orient v-structures whose prongs are both undirected.
    #[arg(long)]
    vstruct_within_tier_only: bool,
}

impl LearnFlags {
    fn build(&self, config: &ConfigFile) -> Result<LearnConfig, CliError> {
        let alpha = resolve(&self.alpha, config, "alpha", 0.02)?;
        let variant_str = resolve(
            &self.variant.map(|v| v.as_str().to_string()),
            config,
            "variant",
            "copc-stable".to_string(),
        )?;
        let variant: Variant = variant_str
            .parse()
            .map_err(CliError::Input)?;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(CliError::Input(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        let mut learn = LearnConfig::new(alpha, variant);
        learn.max_cond_size = match self.max_cond {
            Some(m) => Some(m),
            None => config.get::<usize>("max_cond")?,
        };
        let rule4_default = !self.no_rule4;
        learn.meek = MeekConfig {
            rule4: if self.no_rule4 {
                false
            } else {
                config.get::<bool>("rule4")?.unwrap_or(rule4_default)
            },
        };
        learn.vstruct_within_tier_only = self.vstruct_within_tier_only
            || config
                .get::<bool>("vstruct_within_tier_only")?
                .unwrap_or(false);
        Ok(learn)
    }
}

#[derive(Args)]
struct CommonOut {
    /// Directory the artifacts are written to.
    #[arg(long, default_value = "copc-out")]
    out_dir: PathBuf,
    /// Flat `key = value` config file consulted for unset flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Record wall times in the manifest (off by default so identical
    /// runs emit identical bytes).
    #[arg(long)]
    timings: bool,
    /// Worker-thread cap; also settable through COPC_THREADS.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct LearnArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    learn: LearnFlags,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args)]
struct IdaArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    learn: LearnFlags,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args)]
struct CstarArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    learn: LearnFlags,
    #[command(flatten)]
    out: CommonOut,
    /// Number of subsample runs.
    #[arg(long)]
    runs: Option<usize>,
    /// Rows per subsample (drawn without replacement).
    #[arg(long)]
    subsample: Option<usize>,
    /// Top-list size; defaults to ceil(p / 10).
    #[arg(long)]
    q: Option<usize>,
    /// PCER selection threshold.
    #[arg(long)]
    pcer: Option<f64>,
    /// Master seed; generated and printed when absent.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario file (flat `key = value`); defaults apply when omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Master seed; generated and printed when absent.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the scenario's replicate count.
    #[arg(long)]
    replicates: Option<usize>,
    /// Evaluate true effects by Monte Carlo and report MSE.
    #[arg(long)]
    with_mse: bool,
    /// SHD scoring: full (marks count) or adjacency-only.
    #[arg(long, default_value = "full")]
    shd_mode: String,
    #[command(flatten)]
    out: CommonOut,
}

#[derive(Args)]
struct AggregateArgs {
    /// Directory of per-run CPDAG `.json` files.
    runs_dir: PathBuf,
    /// Minimum edge frequency to keep.
    #[arg(long, default_value_t = 0.2)]
    threshold: f64,
    #[command(flatten)]
    out: CommonOut,
}

fn init_threads(requested: Option<usize>) {
    let n = requested.or_else(|| {
        std::env::var("COPC_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = n {
        // Ignore failure: the global pool can only be set once.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Input(format!("cannot create {dir:?}: {e}")))?;
    std::fs::write(dir.join(name), contents)
        .map_err(|e| CliError::Input(format!("cannot write {name}: {e}")))?;
    Ok(())
}

fn seed_or_generate(seed: Option<u64>) -> u64 {
    match seed {
        Some(s) => s,
        None => {
            let s = rand::thread_rng().next_u64();
            println!("generated master seed: {s}");
            s
        }
    }
}

fn cmd_learn(args: LearnArgs) -> Result<(), CliError> {
    init_threads(args.out.threads);
    let config = ConfigFile::load(args.out.config.as_ref())?;
    let learn = args.learn.build(&config)?;
    let started = std::time::Instant::now();
    let report = args.data.ingest(&config)?;

    let result = run(&report.dataset, &learn)?;
    let counts = count_edge_kinds(&result.graph);

    let mut manifest = RunManifest::new("learn");
    manifest.config = serde_json::json!({
        "alpha": learn.alpha,
        "variant": learn.variant.as_str(),
        "max_cond": learn.max_cond_size,
        "rule4": learn.meek.rule4,
        "vstruct_within_tier_only": learn.vstruct_within_tier_only,
        "impute": report.imputed_cells > 0,
        "outcome": args.data.outcome,
    });
    manifest.digest_input("data", &args.data.data)?;
    manifest.warnings = report.warnings.clone();
    if args.out.timings {
        manifest.record_timing("total", started.elapsed().as_millis());
    }

    let dir = &args.out.out_dir;
    write_out(dir, "cpdag.dot", &pdag_to_dot(&result.graph))?;
    write_out(dir, "cpdag.json", &pdag_to_json(&result.graph))?;
    write_out(
        dir,
        "diagnostics.json",
        &serde_json::to_string_pretty(&result.diagnostics).unwrap(),
    )?;
    write_out(dir, "manifest.json", &manifest.to_json())?;

    println!(
        "{}: {} edges ({} directed, {} undirected, {} non-chronological), {} CI tests, {} conflicts",
        learn.variant.as_str(),
        counts.total,
        counts.directed,
        counts.undirected,
        counts.non_chronological,
        result.diagnostics.ci_tests,
        result.diagnostics.conflicts
    );
    Ok(())
}

fn format_parent_sets(names: &[String], sets: &[Vec<usize>]) -> String {
    sets.iter()
        .map(|s| {
            s.iter()
                .map(|&v| names[v].as_str())
                .collect::<Vec<_>>()
                .join("+")
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn cmd_ida(args: IdaArgs) -> Result<(), CliError> {
    init_threads(args.out.threads);
    let config = ConfigFile::load(args.out.config.as_ref())?;
    let learn = args.learn.build(&config)?;
    let report = args.data.ingest(&config)?;
    let data = &report.dataset;
    let outcome = data
        .outcome()
        .ok_or_else(|| CliError::Input("ida needs --outcome".into()))?;

    let started = std::time::Instant::now();
    let result = run(data, &learn)?;
    let opts = FitOptions::default();
    let mut summaries = Vec::new();
    let mut rows: BTreeMap<usize, (usize, f64, f64, String)> = BTreeMap::new();
    for x in data.covariate_indices() {
        let m = ida_multiset(data, &result.graph, x, outcome, &opts)?;
        let s = lower_bound(&m);
        rows.insert(
            x,
            (
                s.ambiguity,
                s.lower_bound,
                s.median_effect,
                format_parent_sets(data.names(), &m.parent_sets),
            ),
        );
        summaries.push(s);
    }
    let ranked = rank_covariates(summaries, result.graph.vertices());

    let mut csv = String::from("covariate,visit,ambiguity,lower_bound,median_effect,parent_sets\n");
    for s in &ranked {
        let (ambiguity, lb, med, sets) = &rows[&s.covariate];
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            data.names()[s.covariate],
            data.tiers()[s.covariate],
            ambiguity,
            lb,
            med,
            sets
        ));
    }

    let mut manifest = RunManifest::new("ida");
    manifest.config = serde_json::json!({
        "alpha": learn.alpha,
        "variant": learn.variant.as_str(),
        "outcome": data.names()[outcome],
    });
    manifest.digest_input("data", &args.data.data)?;
    manifest.warnings = report.warnings.clone();
    if args.out.timings {
        manifest.record_timing("total", started.elapsed().as_millis());
    }

    let dir = &args.out.out_dir;
    write_out(dir, "effects.csv", &csv)?;
    write_out(dir, "manifest.json", &manifest.to_json())?;
    println!(
        "ranked {} covariates; top: {}",
        ranked.len(),
        ranked
            .first()
            .map(|s| data.names()[s.covariate].as_str())
            .unwrap_or("-")
    );
    Ok(())
}

fn cmd_cstar(args: CstarArgs) -> Result<(), CliError> {
    init_threads(args.out.threads);
    let config = ConfigFile::load(args.out.config.as_ref())?;
    let learn = args.learn.build(&config)?;
    let report = args.data.ingest(&config)?;
    let data = &report.dataset;

    let seed = seed_or_generate(match args.seed {
        Some(s) => Some(s),
        None => config.get::<u64>("seed")?,
    });
    let mut stability = StabilityConfig::new(learn.clone(), seed);
    stability.n_runs = resolve(&args.runs, &config, "runs", stability.n_runs)?;
    stability.subsample_size =
        resolve(&args.subsample, &config, "subsample", stability.subsample_size)?;
    stability.q = match args.q {
        Some(q) => Some(q),
        None => config.get::<usize>("q")?,
    };
    stability.pcer_threshold = resolve(&args.pcer, &config, "pcer", stability.pcer_threshold)?;

    let started = std::time::Instant::now();
    let stab_report = cstar(data, &stability)?;
    let selected = select(&stab_report, stability.pcer_threshold);

    let mut records = stab_report.per_covariate.clone();
    records.sort_by(|a, b| {
        a.pcer
            .partial_cmp(&b.pcer)
            .unwrap()
            .then_with(|| b.pi.partial_cmp(&a.pi).unwrap())
            .then_with(|| a.name.cmp(&b.name))
    });
    let mut csv = String::from("covariate,visit,pi,pcer,selected,median_effect\n");
    for c in &records {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            c.name, c.tier, c.pi, c.pcer, c.selected, c.median_effect
        ));
    }

    let mut manifest = RunManifest::new("cstar");
    manifest.config = serde_json::json!({
        "alpha": learn.alpha,
        "variant": learn.variant.as_str(),
        "runs": stability.n_runs,
        "subsample": stability.subsample_size,
        "q": stab_report.q,
        "pcer_threshold": stability.pcer_threshold,
        "outcome": args.data.outcome,
    });
    manifest.seeds.push(seed);
    manifest.digest_input("data", &args.data.data)?;
    manifest.warnings = report.warnings.clone();
    manifest
        .warnings
        .extend((stab_report.failed_runs > 0).then(|| {
            format!("{} of {} subsample runs failed", stab_report.failed_runs, stability.n_runs)
        }));
    if args.out.timings {
        manifest.record_timing("total", started.elapsed().as_millis());
    }

    let dir = &args.out.out_dir;
    write_out(dir, "stability.csv", &csv)?;
    write_out(dir, "manifest.json", &manifest.to_json())?;
    println!(
        "q = {}, selected {} covariate(s) at PCER <= {}: {}",
        stab_report.q,
        selected.len(),
        stability.pcer_threshold,
        selected
            .iter()
            .map(|&x| data.names()[x].as_str())
            .collect::<Vec<_>>()
            .join(", ")
    );
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    init_threads(args.out.threads);
    let mut scenario = match &args.scenario {
        Some(path) => SimScenario::from_file(path)?,
        None => SimScenario::default(),
    };
    if let Some(r) = args.replicates {
        scenario.n_replicates = r;
    }
    if let Some(s) = args.seed {
        scenario.master_seed = s;
    }

    let shd_mode = match args.shd_mode.as_str() {
        "full" => ShdMode::Full,
        "adjacency-only" => ShdMode::AdjacencyOnly,
        other => {
            return Err(CliError::Input(format!(
                "unknown --shd-mode `{other}` (expected full or adjacency-only)"
            )))
        }
    };
    let options = ComparisonOptions {
        with_mse: args.with_mse,
        shd_mode,
        ..Default::default()
    };

    let started = std::time::Instant::now();
    let result = run_comparison(&scenario, &options)?;

    let mut replicate_csv =
        String::from("replicate,variant,sensitivity,specificity,shd,mse\n");
    for (k, pair) in result.replicates.iter().enumerate() {
        for (name, m) in [("pc-stable", &pair.pc), ("copc-stable", &pair.copc)] {
            replicate_csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                k,
                name,
                m.sensitivity,
                m.specificity,
                m.shd,
                m.mse.map(|v| v.to_string()).unwrap_or_default()
            ));
        }
    }

    let mut manifest = RunManifest::new("simulate");
    manifest.config = serde_json::to_value(&scenario).unwrap();
    manifest.seeds.push(scenario.master_seed);
    if let Some(path) = &args.scenario {
        manifest.digest_input("scenario", path)?;
    }
    manifest
        .warnings
        .extend((result.failed_replicates > 0).then(|| {
            format!("{} replicate(s) failed and were skipped", result.failed_replicates)
        }));
    if args.out.timings {
        manifest.record_timing("total", started.elapsed().as_millis());
    }

    let dir = &args.out.out_dir;
    write_out(dir, "comparison.csv", &result.to_csv_string())?;
    write_out(dir, "replicates.csv", &replicate_csv)?;
    write_out(dir, "manifest.json", &manifest.to_json())?;

    for s in &result.summaries {
        println!(
            "{}: sensitivity {:.3} ({:.3}), specificity {:.3} ({:.3}), shd {:.1} ({:.1})",
            s.variant,
            s.sensitivity_mean,
            s.sensitivity_sd,
            s.specificity_mean,
            s.specificity_sd,
            s.shd_mean,
            s.shd_sd
        );
    }
    Ok(())
}

fn cmd_aggregate(args: AggregateArgs) -> Result<(), CliError> {
    let started = std::time::Instant::now();
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&args.runs_dir)
        .map_err(|e| CliError::Input(format!("cannot read {:?}: {e}", args.runs_dir)))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .filter(|p| {
            p.file_name()
                .is_some_and(|n| n != "manifest.json" && n != "diagnostics.json")
        })
        .collect();
    paths.sort();
    let mut graphs = Vec::with_capacity(paths.len());
    for p in &paths {
        let text = std::fs::read_to_string(p)
            .map_err(|e| CliError::Input(format!("cannot read {p:?}: {e}")))?;
        graphs.push(pdag_from_json(&text)?);
    }
    let summary = aggregate_cpdags(&graphs, args.threshold)?;

    let mut manifest = RunManifest::new("aggregate");
    manifest.config = serde_json::json!({
        "threshold": args.threshold,
        "n_graphs": graphs.len(),
    });
    for p in &paths {
        manifest.digest_input(&p.file_name().unwrap().to_string_lossy(), p)?;
    }
    if args.out.timings {
        manifest.record_timing("total", started.elapsed().as_millis());
    }

    let dir = &args.out.out_dir;
    write_out(dir, "summary.dot", &summary_to_dot(&summary))?;
    write_out(
        dir,
        "summary.json",
        &serde_json::to_string_pretty(&summary).unwrap(),
    )?;
    write_out(dir, "manifest.json", &manifest.to_json())?;
    println!(
        "aggregated {} graphs; {} edges at frequency >= {}",
        graphs.len(),
        summary.edges.len(),
        args.threshold
    );
    Ok(())
}

/// Parse the process arguments, run the requested command, and return the
/// exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Learn(args) => cmd_learn(args),
        Command::Ida(args) => cmd_ida(args),
        Command::Cstar(args) => cmd_cstar(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Aggregate(args) => cmd_aggregate(args),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
